#pragma once

#include <stdexcept>
#include <string>

namespace poshan {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or size disagreement between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

class EmptyAttentionError : public Error {
public:
    using Error::Error;
};

class LabelRangeError : public Error {
public:
    using Error::Error;
};

class NonScalarLossError : public Error {
public:
    using Error::Error;
};

class DeterminismError : public Error {
public:
    using Error::Error;
};

class TaggingError : public Error {
public:
    using Error::Error;
};

class NoCardinalError : public Error {
public:
    using Error::Error;
};

// Malformed or missing input data (files, records, lines).
class DataError : public Error {
public:
    using Error::Error;
};

// Bad configuration values or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

class NonFiniteLossError : public Error {
public:
    using Error::Error;
};

class MetricError : public Error {
public:
    using Error::Error;
};

}  // namespace poshan

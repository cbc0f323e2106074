#include "poshan/log.hpp"

#include <iostream>

namespace poshan {

namespace {

WarningSink& sink() {
    static WarningSink s = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink next) {
    auto prev = std::move(sink());
    sink() = std::move(next);
    return prev;
}

void warn(const std::string& message) {
    if (sink()) sink()(message);
}

}  // namespace poshan

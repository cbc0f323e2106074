#pragma once

#include <cstdint>
#include <vector>

#include "poshan/gradcheck.hpp"
#include "poshan/model.hpp"

namespace poshan {

// Two featurized toy records, each with a 2-sentence x 3-word body.
std::vector<DatasetRecord> gradcheck_records();

// Small-dimension model of `kind` built over gradcheck_records().
Model gradcheck_model(ModelKind kind, std::uint64_t seed);

// Finite-difference check of the summed cross-entropy over the toy records,
// covering every parameter group of the model. A group whose analytic
// gradient is identically zero on the toys is reported as failed.
GradcheckReport run_gradcheck(ModelKind kind, std::uint64_t seed, const GradcheckOptions& options = {});

}  // namespace poshan

#pragma once

#include "bench500/ops.hpp"

namespace bench500 {

struct GradCheckReport {
    // max over elements of |analytic - numeric| / max(1, |analytic|), per
    // differentiable input.
    std::vector<double> max_rel_error;
    double worst = 0.0;
    bool full_jacobian = false;  // unit cotangents per output element were used
};

// Central-difference validation of Operator::backward, always evaluated in
// f64 regardless of the inputs' nominal precision. Outputs are contracted
// with random cotangents; when the total output element count is <= 64 every
// unit cotangent is checked instead (full Jacobian).
GradCheckReport grad_check(Operator& op, std::span<const Tensor> inputs, Rng& rng,
                           double step = 1e-5);

}  // namespace bench500

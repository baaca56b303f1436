#pragma once

#include "pitchstab/errors.hpp"
#include "pitchstab/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pitchstab::detail {

// Iterates p <- rhs(p) until the step is below tolerance relative to |p|, then keeps
// going while the step still shrinks and exceeds an absolute floor, so that large
// solutions also reach a small absolute residual.
template <class Rhs>
Matrix riccati_fixed_point(Matrix p, Rhs rhs, const RiccatiOptions& opt, int* iterations, const char* which) {
    constexpr double kAbsoluteFloor = 1e-11;
    bool relative_met = false;
    double prev_delta = 0.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Matrix next = rhs(p);
        next = 0.5 * (next + next.transpose());
        const double delta = (next - p).norm();
        if (!next.allFinite() || !std::isfinite(next.norm()) || !std::isfinite(delta))
            throw NumericalError("Riccati non-convergence: iterate became non-finite");
        if (relative_met && delta >= prev_delta) {
            if (iterations) *iterations = it - 1;
            return p;
        }
        p = std::move(next);
        relative_met = relative_met || delta < opt.tolerance * std::max(1.0, p.norm());
        if (relative_met && delta < kAbsoluteFloor) {
            if (iterations) *iterations = it;
            return p;
        }
        prev_delta = delta;
    }
    throw NumericalError(std::string("Riccati non-convergence: ") + which + " iteration cap of " +
                         std::to_string(opt.max_iterations) + " reached");
}

}  // namespace pitchstab::detail

#pragma once

#include <cstddef>
#include <vector>

namespace oheat {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double residual_rms = 0.0;
    std::size_t n_points = 0;
};

/// Ordinary least squares of ys against xs. Requires xs.size() >= 2 and at
/// least two distinct abscissae.
SlopeFit least_squares(const std::vector<double>& xs,
                       const std::vector<double>& ys);

} // namespace oheat

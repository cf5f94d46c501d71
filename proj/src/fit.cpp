#include "orbitalheat/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace oheat {

SlopeFit least_squares(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) {
        throw std::invalid_argument("least_squares: need >= 2 paired points");
    }
    SlopeFit fit;
    fit.n_points = n;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("least_squares: degenerate abscissae");
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += r * r;
    }
    fit.residual_rms = std::sqrt(ssr / static_cast<double>(n));
    if (n > 2) {
        fit.stderr_slope =
            std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx);
    }
    return fit;
}

} // namespace oheat

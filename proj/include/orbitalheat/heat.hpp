#pragma once

#include "orbitalheat/groups.hpp"

#include <functional>
#include <vector>

namespace oheat {

// Closed-form heat kernel of H^3 between points at distance rho,
//   p3(rho, t) = (4 pi t)^{-3/2} * rho/sinh(rho) * exp(-t - rho^2/(4t)),
// its radial derivative, the dimension-5 kernel obtained from the recurrence
// p_{n+2} = -e^{-nt} / (2 pi sinh rho) * d_rho p_n, and the quotient kernel
// p_Gamma(x, y, t) = sum over the orbit of p3.

/// Valid for rho >= 0, t > 0. Below rho = 1e-6 the removable singularity is
/// handled by the series rho/sinh(rho) = 1 - rho^2/6 + 7 rho^4/360.
double p3(double rho, double t);

/// d/d rho of p3; strictly negative for rho > 0. Requires rho > 0, t > 0.
double dp3_drho(double rho, double t);

/// Heat kernel of H^5 via the dimension recurrence at n = 3. rho > 0, t > 0.
double p5(double rho, double t);

/// Volume of a hyperbolic 3-ball: pi (sinh(2r) - 2r).
double ball_volume(double r);

/// log of ball_volume, safe for large r.
double log_ball_volume(double r);

/// A truncated group sum with an explicit bound on the dropped tail.
struct HeatValue {
    double value = 0.0;       ///< sum of p3 over the enumerated orbit
    double tail_bound = 0.0;  ///< upper bound on the dropped part; 0 if exact
    double t = 0.0;
    double rho = 0.0;         ///< d(x, y)
};

/// Quotient-manifold kernel from a complete orbit ball. `inj_lower` is a
/// caller-asserted positive lower bound for the injectivity radius at y
/// (see injectivity_lower_bound); it feeds the packing bound
///   N(rho) <= vol(rho + d(x,y) + r0) / vol(r0)
/// used to certify the tail
///   tail = -integral_R^inf  Nbar(rho) d_rho p3(rho, t) d rho.
/// Throws when the ball is incomplete or when tail_bound > value (the
/// enumeration radius is too small for this t).
HeatValue quotient_kernel(const OrbitBall& ball, double t, double inj_lower);

/// Relative residual of the counting-function identity
///   sum_i p3(d_i, t) = N(R) p3(R, t) - integral_0^R N(rho) d_rho p3 d rho,
/// with the integral evaluated exactly by telescoping between jumps.
double stieltjes_residual(const OrbitBall& ball, double t);

/// [N(rho) e^{-2 rho}] / [sqrt(rho) p_Gamma(x, y, rho/2)]. Requires rho > 1
/// and a ball adequate for the kernel at t = rho/2 with tail/value < 1e-2.
double upper_bound_ratio(const OrbitBall& ball, double rho, double inj_lower);

/// -e^{2 rho} d_rho p3(rho, t) divided by the model t^{-1/2} e^{-t - rho^2/4t + rho}.
/// Bounded between two positive constants for t > 1, rho in (t, 3t).
double annulus_ratio(double t, double rho);

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

/// Extrema of annulus_ratio over a (t, rho/t) grid with t in [t_lo, t_hi],
/// rho/t in (1, 3).
Band sandwich_constants(double t_lo, double t_hi, int nt, int nrho);

struct ChoppedIntegrals {
    double i1 = 0.0;  ///< [t, 2t - k sqrt(t)]
    double i2 = 0.0;  ///< [2t - k sqrt(t), 2t + k sqrt(t)]
    double i3 = 0.0;  ///< [2t + k sqrt(t), 3t]
};

/// Integrals of profile(rho) * t^{-1/2} e^{-(rho - 2t)^2 / 4t} over the three
/// windows. Requires 0 < k < sqrt(t) so the cut points stay inside [t, 3t].
ChoppedIntegrals chopped_integrals(const std::function<double(double)>& profile,
                                   double t, double k);

struct GaussianTail {
    double integral = 0.0;   ///< quadrature value of int_{k/2}^inf e^{-u^2} du
    double remainder = 0.0;  ///< certified bound on the truncated part + quad error
    double bound = 0.0;      ///< e^{-k^2/4}
    bool ok = false;         ///< integral + remainder <= bound
};

GaussianTail gaussian_tail_check(double k);

/// Least-squares slope of ln p_Gamma(x, y, t) against t over the top dyadic
/// window [t_max/2, t_max] of the grid. Every kernel evaluation must satisfy
/// tail/value < 1e-3, else throws.
SlopeFit log_limit_estimate(const OrbitBall& ball,
                            const std::vector<double>& t_grid,
                            double inj_lower);

/// Adaptive Gauss-Kronrod integration (relative tolerance ~1e-10) with an
/// error estimate; thin wrapper used by the checks above and by tests.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double* error_estimate = nullptr);

} // namespace oheat

#include "orbitalheat/heat.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oheat {

namespace {

constexpr double kPi = 3.14159265358979323846;

double prefactor(double t) { return std::pow(4.0 * kPi * t, -1.5); }

// rho * coth(rho) - 1, series-protected against cancellation near 0.
double rho_coth_minus_one(double rho) {
    if (rho < 1e-3) {
        const double r2 = rho * rho;
        return r2 / 3.0 - r2 * r2 / 45.0;
    }
    return rho * std::cosh(rho) / std::sinh(rho) - 1.0;
}

// e^{E} / sinh(rho) computed with a single exponential so the pair never
// hits a spurious overflow/underflow for large rho.
double exp_over_sinh(double E, double rho) {
    return 2.0 * std::exp(E - rho) / (1.0 - std::exp(-2.0 * rho));
}

void require_positive_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("heat kernel: t must be > 0");
}

} // namespace

double p3(double rho, double t) {
    require_positive_time(t);
    if (rho < 0.0) throw std::domain_error("p3: rho must be >= 0");
    const double E = -t - rho * rho / (4.0 * t);
    if (rho < 1e-6) {
        const double r2 = rho * rho;
        const double f = 1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0;
        return prefactor(t) * f * std::exp(E);
    }
    return prefactor(t) * rho * exp_over_sinh(E, rho);
}

double dp3_drho(double rho, double t) {
    require_positive_time(t);
    if (!(rho > 0.0)) throw std::domain_error("dp3_drho: rho must be > 0");
    const double bracket = -(rho_coth_minus_one(rho) + rho * rho / (2.0 * t));
    const double E = -t - rho * rho / (4.0 * t);
    return prefactor(t) * bracket * exp_over_sinh(E, rho);
}

double p5(double rho, double t) {
    require_positive_time(t);
    if (!(rho > 0.0)) throw std::domain_error("p5: rho must be > 0");
    const double bracket = rho_coth_minus_one(rho) + rho * rho / (2.0 * t);
    const double E = -4.0 * t - rho * rho / (4.0 * t);
    const double em = std::exp(-2.0 * rho);
    // -e^{-3t}/(2 pi sinh rho) * d_rho p3, with all exponentials combined.
    return prefactor(t) / (2.0 * kPi) * bracket * 4.0 * std::exp(E - 2.0 * rho) /
           ((1.0 - em) * (1.0 - em));
}

double ball_volume(double r) {
    if (r < 0.0) throw std::domain_error("ball_volume: r must be >= 0");
    if (r < 1e-4) {
        // pi (sinh 2r - 2r) = pi ( (2r)^3/6 + (2r)^5/120 + ... )
        const double u = 2.0 * r;
        return kPi * (u * u * u / 6.0) * (1.0 + u * u / 20.0);
    }
    return kPi * (std::sinh(2.0 * r) - 2.0 * r);
}

double log_ball_volume(double r) {
    if (r < 177.0) return std::log(ball_volume(r));
    // sinh(2r) dominates; pi/2 e^{2r} (1 - (4r+1) e^{-2r} ...) to double precision.
    return std::log(kPi / 2.0) + 2.0 * r;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double* error_estimate) {
    double err = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, a, b, 14, 1e-10, &err);
    if (error_estimate) *error_estimate = err;
    return v;
}

namespace {

double kahan_sum(const std::vector<double>& terms) {
    double s = 0.0, c = 0.0;
    for (double v : terms) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// log of the integrand of the tail certificate: Nbar(rho) * (-d_rho p3).
double log_tail_integrand(double rho, double t, double d, double r0) {
    const double log_nbar = log_ball_volume(rho + d + r0) - log_ball_volume(r0);
    const double bracket = rho_coth_minus_one(rho) + rho * rho / (2.0 * t);
    const double E = -t - rho * rho / (4.0 * t);
    const double log_dp3 = std::log(prefactor(t)) + std::log(bracket) + E - rho +
                           std::log(2.0 / (1.0 - std::exp(-2.0 * rho)));
    return log_nbar + log_dp3;
}

} // namespace

HeatValue quotient_kernel(const OrbitBall& ball, double t, double inj_lower) {
    require_positive_time(t);
    if (!ball.complete) {
        throw std::runtime_error("quotient_kernel: ball is not complete");
    }
    if (!(inj_lower > 0.0)) {
        throw std::invalid_argument("quotient_kernel: inj_lower must be > 0");
    }

    std::vector<double> terms;
    terms.reserve(ball.size());
    for (double d : ball.distances) terms.push_back(p3(d, t));
    HeatValue hv;
    hv.value = kahan_sum(terms);
    hv.t = t;
    hv.rho = dist(ball.x, ball.y);

    if (ball.exhausted_group) {
        hv.tail_bound = 0.0;
        return hv;
    }

    const double R = ball.radius;
    const double d = hv.rho;
    // The log-integrand peaks near max(R, 4t) and then falls off like a
    // Gaussian of width ~ 2 sqrt(t); 20 widths bound the cut remainder by
    // e^{-100} of the peak.
    const double cut = std::max(R, 4.0 * t) + 40.0 * std::sqrt(std::max(t, 1.0)) + 10.0;
    double quad_err = 0.0;
    const double tail = integrate(
        [&](double rho) { return std::exp(log_tail_integrand(rho, t, d, inj_lower)); },
        R, cut, &quad_err);
    hv.tail_bound = tail + quad_err;
    if (hv.tail_bound > hv.value) {
        throw std::runtime_error(
            "quotient_kernel: tail bound exceeds the partial sum; enlarge the "
            "enumeration radius for this t");
    }
    return hv;
}

double stieltjes_residual(const OrbitBall& ball, double t) {
    require_positive_time(t);
    if (!ball.complete) {
        throw std::runtime_error("stieltjes_residual: ball is not complete");
    }
    if (ball.distances.empty()) return 0.0;

    std::vector<double> jumps;
    std::vector<std::size_t> counts;  // N at and after each jump
    for (double d : ball.distances) {
        if (jumps.empty() || d > jumps.back() + 1e-9) {
            jumps.push_back(d);
            counts.push_back(counts.empty() ? 1 : counts.back() + 1);
        } else {
            ++counts.back();
        }
    }

    const double R = ball.radius;
    // -int_0^R N d_rho p3 by telescoping: N is constant between jumps and
    // each piece integrates to a difference of p3 endpoint values.
    double integral = 0.0;
    for (std::size_t k = 0; k < jumps.size(); ++k) {
        const double lo = jumps[k];
        const double hi = (k + 1 < jumps.size()) ? jumps[k + 1] : R;
        integral += static_cast<double>(counts[k]) * (p3(lo, t) - p3(hi, t));
    }
    const double boundary =
        static_cast<double>(counts.back()) * p3(R, t);
    const double via_parts = boundary + integral;

    std::vector<double> terms;
    terms.reserve(ball.size());
    for (double d : ball.distances) terms.push_back(p3(d, t));
    const double direct = kahan_sum(terms);
    return std::abs(via_parts - direct) / direct;
}

double upper_bound_ratio(const OrbitBall& ball, double rho, double inj_lower) {
    if (!(rho > 1.0)) {
        throw std::domain_error("upper_bound_ratio: rho must exceed 1");
    }
    const HeatValue hv = quotient_kernel(ball, rho / 2.0, inj_lower);
    if (hv.tail_bound > 1e-2 * hv.value) {
        throw std::runtime_error(
            "upper_bound_ratio: tail bound above 1e-2 of the kernel value");
    }
    const double n = static_cast<double>(ball.count(rho));
    return n * std::exp(-2.0 * rho) / (std::sqrt(rho) * hv.value);
}

double annulus_ratio(double t, double rho) {
    require_positive_time(t);
    if (!(rho > 0.0)) throw std::domain_error("annulus_ratio: rho must be > 0");
    const double bracket = rho_coth_minus_one(rho) + rho * rho / (2.0 * t);
    return std::pow(4.0 * kPi, -1.5) * bracket / t * 2.0 /
           (1.0 - std::exp(-2.0 * rho));
}

Band sandwich_constants(double t_lo, double t_hi, int nt, int nrho) {
    if (!(t_lo > 1.0) || !(t_hi > t_lo) || nt < 2 || nrho < 2) {
        throw std::invalid_argument("sandwich_constants: bad grid");
    }
    Band band{std::numeric_limits<double>::infinity(), 0.0};
    for (int i = 0; i < nt; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (nt - 1));
        for (int j = 0; j < nrho; ++j) {
            // interior of (t, 3t)
            const double frac = (j + 0.5) / nrho;
            const double rho = t * (1.0 + 2.0 * frac);
            const double r = annulus_ratio(t, rho);
            band.lo = std::min(band.lo, r);
            band.hi = std::max(band.hi, r);
        }
    }
    return band;
}

ChoppedIntegrals chopped_integrals(
    const std::function<double(double)>& profile, double t, double k) {
    require_positive_time(t);
    if (!(k > 0.0) || !(k < std::sqrt(t))) {
        throw std::domain_error("chopped_integrals: need 0 < k < sqrt(t)");
    }
    const double s = std::sqrt(t);
    const auto integrand = [&](double rho) {
        const double u = (rho - 2.0 * t);
        return profile(rho) * std::exp(-u * u / (4.0 * t)) / s;
    };
    ChoppedIntegrals out;
    out.i1 = integrate(integrand, t, 2.0 * t - k * s);
    out.i2 = integrate(integrand, 2.0 * t - k * s, 2.0 * t + k * s);
    out.i3 = integrate(integrand, 2.0 * t + k * s, 3.0 * t);
    return out;
}

GaussianTail gaussian_tail_check(double k) {
    if (!(k > 0.0)) throw std::domain_error("gaussian_tail_check: k must be > 0");
    GaussianTail r;
    const double a = k / 2.0;
    const double U = a + 40.0;
    double quad_err = 0.0;
    r.integral = integrate([](double u) { return std::exp(-u * u); }, a, U,
                           &quad_err);
    // int_U^inf e^{-u^2} du <= e^{-U^2} / (2U)
    r.remainder = quad_err + std::exp(-U * U) / (2.0 * U);
    r.bound = std::exp(-k * k / 4.0);
    r.ok = r.integral + r.remainder <= r.bound;
    return r;
}

SlopeFit log_limit_estimate(const OrbitBall& ball,
                            const std::vector<double>& t_grid,
                            double inj_lower) {
    if (t_grid.size() < 2) {
        throw std::invalid_argument("log_limit_estimate: grid too short");
    }
    double t_max = 0.0;
    for (double t : t_grid) t_max = std::max(t_max, t);

    std::vector<double> xs, ys;
    for (double t : t_grid) {
        const HeatValue hv = quotient_kernel(ball, t, inj_lower);
        if (hv.tail_bound > 1e-3 * hv.value) {
            throw std::runtime_error(
                "log_limit_estimate: tail above 1e-3 of the kernel value");
        }
        if (t >= t_max / 2.0) {
            xs.push_back(t);
            ys.push_back(std::log(hv.value));
        }
    }
    if (xs.size() < 2) {
        throw std::runtime_error("log_limit_estimate: too few points in window");
    }
    return least_squares(xs, ys);
}

} // namespace oheat

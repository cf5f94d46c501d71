#include "orbitalheat/hyperbolic.hpp"

#include <cmath>
#include <stdexcept>

namespace oheat {

double acosh1p(double s) {
    if (s < 0.0) {
        if (s < -1e-12) throw std::domain_error("acosh1p: argument below 1");
        s = 0.0;
    }
    return std::log1p(s + std::sqrt(s * (s + 2.0)));
}

Isometry canonical(const Isometry& g) {
    const complexd det = g.det();
    const double ad = std::abs(det);
    if (!std::isfinite(ad) || std::abs(ad - 1.0) > 0.5) {
        throw std::invalid_argument("canonical: matrix determinant far from 1");
    }
    const complexd s = std::sqrt(det);
    Isometry r{g.a / s, g.b / s, g.c / s, g.d / s};

    const complexd entries[4] = {r.a, r.b, r.c, r.d};
    for (const complexd& e : entries) {
        const double m = std::abs(e);
        if (m <= 1e-12) continue;
        bool flip;
        if (std::abs(e.real()) <= 1e-12 * m) {
            flip = e.imag() < 0.0;  // purely imaginary entry: keep arg = +pi/2
        } else {
            flip = e.real() < 0.0;
        }
        if (flip) {
            r.a = -r.a;
            r.b = -r.b;
            r.c = -r.c;
            r.d = -r.d;
        }
        break;
    }
    return r;
}

Isometry inverse(const Isometry& g) {
    return canonical(Isometry{g.d, -g.b, -g.c, g.a});
}

Isometry compose(const Isometry& g, const Isometry& h) {
    Isometry r;
    r.a = g.a * h.a + g.b * h.c;
    r.b = g.a * h.b + g.b * h.d;
    r.c = g.c * h.a + g.d * h.c;
    r.d = g.c * h.b + g.d * h.d;
    return canonical(r);
}

PointH3 apply(const Isometry& g, const PointH3& p) {
    const complexd z{p.x1, p.x2};
    const complexd cz_d = g.c * z + g.d;
    const double den = std::norm(cz_d) + std::norm(g.c) * p.h * p.h;
    if (!(den > 0.0) || !std::isfinite(den)) {
        throw std::runtime_error("apply: degenerate Moebius denominator");
    }
    const complexd num = (g.a * z + g.b) * std::conj(cz_d) +
                         g.a * std::conj(g.c) * (p.h * p.h);
    PointH3 q;
    q.x1 = num.real() / den;
    q.x2 = num.imag() / den;
    q.h = p.h / den;
    if (!(q.h > 0.0) || !std::isfinite(q.h)) {
        throw std::runtime_error("apply: image height not positive");
    }
    return q;
}

double dist(const PointH3& p, const PointH3& q) {
    if (!(p.h > 0.0) || !(q.h > 0.0)) {
        throw std::domain_error("dist: points must have positive height");
    }
    const double dx1 = p.x1 - q.x1;
    const double dx2 = p.x2 - q.x2;
    const double dh = p.h - q.h;
    const double s = (dx1 * dx1 + dx2 * dx2 + dh * dh) / (2.0 * p.h * q.h);
    return acosh1p(s);
}

double displacement(const Isometry& g) {
    return acosh1p(0.5 * g.frobenius_sq() - 1.0);
}

bool approx_equal(const Isometry& g, const Isometry& h, double tol) {
    return std::abs(g.a - h.a) <= tol && std::abs(g.b - h.b) <= tol &&
           std::abs(g.c - h.c) <= tol && std::abs(g.d - h.d) <= tol;
}

} // namespace oheat

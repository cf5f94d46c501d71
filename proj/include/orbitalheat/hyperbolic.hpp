#pragma once

#include <complex>

namespace oheat {

using complexd = std::complex<double>;

/// Point of the upper half-space model of H^3: two horizontal coordinates
/// and a height h > 0.
struct PointH3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double h = 1.0;
};

/// The reference point j = (0, 0, 1).
inline constexpr PointH3 kBasepoint{0.0, 0.0, 1.0};

/// Orientation-preserving isometry of H^3, stored as a unit-determinant
/// 2x2 complex matrix acting on the upper half-space by the quaternionic
/// extension of the Moebius action on the boundary.
///
/// Matrices are kept in canonical sign form so that the +-M ambiguity of
/// the projective action collapses to a single representative: the first
/// entry of (a, b, c, d) whose modulus exceeds 1e-12 has argument in
/// (-pi/2, pi/2].
struct Isometry {
    complexd a{1.0, 0.0};
    complexd b{0.0, 0.0};
    complexd c{0.0, 0.0};
    complexd d{1.0, 0.0};

    complexd det() const { return a * d - b * c; }

    /// |a|^2 + |b|^2 + |c|^2 + |d|^2. Grouped as (|a|^2+|d|^2) + (|b|^2+|c|^2)
    /// so the value is bit-identical for g and g^{-1}.
    double frobenius_sq() const {
        return (std::norm(a) + std::norm(d)) + (std::norm(b) + std::norm(c));
    }

    static Isometry identity() { return Isometry{}; }
};

/// acosh(1 + s) evaluated without cancellation for small s >= 0.
double acosh1p(double s);

/// Renormalize to unit determinant and fix the canonical sign.
/// Throws std::invalid_argument if the determinant is degenerate
/// (|det| deviating from 1 by more than 0.5 signals broken input upstream).
Isometry canonical(const Isometry& g);

Isometry inverse(const Isometry& g);

/// Canonical matrix product g * h (determinant renormalized after the
/// multiplication so long composition chains stay stable).
Isometry compose(const Isometry& g, const Isometry& h);

/// Moebius action on the upper half-space. Throws std::runtime_error when the
/// image height fails to be positive, which signals a broken invariant
/// upstream (non-invertible or non-finite matrix).
PointH3 apply(const Isometry& g, const PointH3& p);

/// Hyperbolic distance,
///   d(p, q) = acosh(1 + (|z - z'|^2 + (h - h')^2) / (2 h h')).
double dist(const PointH3& p, const PointH3& q);

/// Displacement of the reference point: d(j, g j) = acosh(frobenius_sq / 2).
/// Cheap (no point arithmetic); used as a pruning bound during orbit
/// enumeration.
double displacement(const Isometry& g);

bool approx_equal(const Isometry& g, const Isometry& h, double tol);

} // namespace oheat

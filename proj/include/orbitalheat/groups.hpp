#pragma once

#include "orbitalheat/fit.hpp"
#include "orbitalheat/hyperbolic.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oheat {

/// Raised when two distinct words land suspiciously close in matrix space:
/// nearer than the ambiguity threshold but farther than float noise allows
/// for genuine duplicates. Discreteness of the input group is then in doubt.
class discreteness_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Generator {
    std::string label;
    Isometry mat;
    std::vector<long long> hom;  // exponent image in Z^k; empty if unused
};

/// Finitely generated matrix group given by labelled generators.
/// After finalize() the list is closed under inverse (the inverse of
/// generator "a" is labelled "a'", with negated hom vector).
struct GroupPresentation {
    std::vector<Generator> generators;
    bool inverse_closed = false;

    void finalize();

    bool has_hom() const;
    std::size_t hom_rank() const;

    /// Parse the JSON group file format:
    ///   {"generators": [{"label": "a", "a": [re, im], "b": [...],
    ///                    "c": [...], "d": [...]}, ...],
    ///    "hom": {"a": [1, 0], ...}}   (hom optional)
    static GroupPresentation from_json_text(const std::string& text);
    static GroupPresentation from_file(const std::string& path);

    /// Builtin families: "trivial", "cyclic:<l>" (loxodromic of translation
    /// length l), "schottky:<l>" (rank-2 ping-pong pair of translation
    /// length l, valid for l > 2*acosh(sqrt(2))), "parabolic".
    static GroupPresentation builtin(const std::string& spec);

    /// Either a builtin name or a path to a JSON group file.
    static GroupPresentation resolve(const std::string& name_or_path);
};

struct EnumerationOptions {
    /// Expansion continues while d(x, gamma y) <= R + prune_margin; the margin
    /// absorbs the non-geodesy of word prefixes. Negative: use
    /// max(1, 2 * max generator displacement).
    double prune_margin = -1.0;
    std::size_t max_elements = 50'000'000;
    bool keep_words = true;
};

/// The sorted multiset { d(x, gamma y) : gamma in Gamma, d <= R }. One entry
/// per group element; `complete` asserts the search frontier emptied before
/// the element cap was hit. `exhausted_group` additionally records that no
/// word was ever pruned, i.e. the entire (necessarily finite) group is here.
struct OrbitBall {
    PointH3 x, y;
    double radius = 0.0;
    std::vector<double> distances;               // ascending, <= R + 1e-9
    std::vector<std::vector<int32_t>> words;     // parallel to distances; may be empty
    bool complete = false;
    bool exhausted_group = false;

    /// Counting function N(rho): entries <= rho (with a 1e-9 absolute slack
    /// so jumps computed through acosh round-trips count exactly).
    /// Requires rho <= radius and a complete ball.
    std::size_t count(double rho) const;

    std::size_t size() const { return distances.size(); }
};

OrbitBall enumerate_ball(const GroupPresentation& G, const PointH3& x,
                         const PointH3& y, double R,
                         const EnumerationOptions& opts = {});

/// N(rho) e^{-2 rho}; e^{2 rho} is the rough volume of a hyperbolic rho-ball.
double averaged_orbital(const OrbitBall& ball, double rho);

/// Least-squares slope of ln N(rho) against rho over the jump points in
/// [R/2, R]. Constant N on the window gives 0 by convention; otherwise
/// fewer than 5 points raise std::runtime_error.
SlopeFit critical_exponent_estimate(const OrbitBall& ball);

/// sup over rho0 <= rho1 <= rho2 <= R of Ntilde(rho2) / Ntilde(rho1),
/// evaluated exactly on the jump grid of N (Ntilde decays between jumps,
/// so the sup is attained at post-jump values against pre-jump infima).
double rough_decrease_sup(const OrbitBall& ball, double rho0);

/// Sub-ball of the elements whose exponent vector under the presentation's
/// hom is 0 in Z^k. Requires words and a hom on every generator.
OrbitBall kernel_restrict(const OrbitBall& ball, const GroupPresentation& G);

/// Rebuild the matrix of a recorded word (generator indices).
Isometry evaluate_word(const GroupPresentation& G,
                       const std::vector<int32_t>& word);

/// Smallest nonzero orbit distance / 2 from a complete ball at x == y;
/// R/2 if the ball only holds the identity. A valid lower bound for the
/// injectivity radius of the quotient at y.
double injectivity_lower_bound(const OrbitBall& ball);

/// CSV with header "rho_jump,count": one row per jump of N.
void write_ball_csv(const OrbitBall& ball, std::ostream& out);

} // namespace oheat

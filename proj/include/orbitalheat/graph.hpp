#pragma once

#include "orbitalheat/fit.hpp"
#include "orbitalheat/hyperbolic.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace oheat {

/// Vertex-weighted graph with symmetric edges. Edges carry an explicit
/// conductance, defaulting to (m(u) + m(v)) / 2; the random walk below is the
/// lazy conductance walk, whose stationary vertex measure is
/// pi(u) = sum of incident conductances.
struct WeightedGraph {
    std::vector<double> weight;       // vertex weights m, > 0
    std::vector<int> edge_u, edge_v;  // undirected edges, u < v
    std::vector<double> edge_cond;    // parallel to edges

    // Builder metadata. component: 0 for the shared root, then one id per
    // attached component; depth: graph distance to the root inside the
    // component. Empty for generic graphs.
    std::vector<int> component;
    std::vector<int> depth;
    // Far-layer vertices of diffusive components, where reflecting truncation
    // error is measured. Components with exponentially growing conductances
    // are excluded: backflow from their far layer is suppressed by the
    // conductance ratio and checked separately in tests.
    std::vector<int> diffusive_boundary;

    int size() const { return static_cast<int>(weight.size()); }
    void add_edge(int u, int v);
    void add_edge(int u, int v, double cond);

    /// Build adjacency, validate weights/edges. `require_connected` is on for
    /// model builders; discretisations of sparse point clouds may legally be
    /// disconnected.
    void finalize(bool require_connected = true);

    bool finalized() const { return !offsets.empty(); }
    std::pair<const int*, const int*> neighbors(int u) const;
    double conductance_at(int u, int k) const;  // k-th incident edge of u

    /// Walk vertex measure pi(u) = sum of incident conductances.
    double vertex_measure(int u) const;

    /// BFS distances from x (graph metric).
    std::vector<int> bfs_depths(int x) const;
    /// Vertices within graph distance r of x.
    std::vector<int> ball(int x, int r) const;
    /// Weighted ball volume: sum of m over ball(x, r).
    double mu_ball(int x, int r) const;

    /// {"vertices":[{"id":i,"weight":w}],"edges":[[u,v]]}
    std::string to_json() const;
    static WeightedGraph from_json_text(const std::string& text);

  private:
    std::vector<int> offsets;  // CSR over both edge directions
    std::vector<int> adj;
    std::vector<int> adj_edge;
};

enum class GfModel { weighted_ray, binary_tree };

/// Star of d unit-weight rays of length L glued at a root.
WeightedGraph build_star(int d, int L);

/// Path of L + 1 unit-weight vertices rooted at one end.
WeightedGraph build_unit_ray(int L);

/// d rays carrying the squared linear weight (1 + n)^2 at depth n, glued at
/// the root with p positive-spectral-bottom model components:
///  - GfModel::weighted_ray: weights e^{2n};
///  - GfModel::binary_tree: the exact depth projection of the rooted binary
///    tree (level weight 2^k, level conductance 2^{k+1}), which reproduces
///    the tree's radial walk and volumes without materializing 2^k vertices.
/// gf_depth < 0 picks min(L, 330); the cap keeps e^{2n} conductances finite
/// and is harmless because backflow across it is suppressed by e^{-2 depth}.
WeightedGraph build_mixed(int d, int p, int L, GfModel gf, int gf_depth = -1);

/// Ray with weights e^{2n} (depth capped at 330).
WeightedGraph build_gf_ray(int L);

/// Literal rooted binary tree of the given depth, for validating the depth
/// projection. Keep depth modest: 2^depth vertices.
WeightedGraph build_binary_tree(int depth);

/// Discrete derivative delta f(x) = sqrt(sum over neighbors of (f(y)-f(x))^2).
double delta_f(const WeightedGraph& G, const std::vector<double>& f, int x);

/// Sharp Poincare constant at (x, r): the largest ratio
///   sum_{B(x,r)} (f - mean)^2 / (r^2 sum_{B(x,2r)} (delta f)^2)
/// over functions on B(x, 2r), computed as a generalized eigenvalue with the
/// constants deflated. Counting measure; r = 0 returns 0.
double poincare_sup(const WeightedGraph& G, int x, int r);

/// Max of the same Rayleigh quotient over `trials` random functions. Never
/// exceeds poincare_sup.
double poincare_random_max(const WeightedGraph& G, int x, int r, int trials,
                           std::uint64_t seed);

/// max over integer 1 <= r <= r_max of mu(B(x, 2r)) / mu(B(x, r)).
double doubling_constant(const WeightedGraph& G, int x, int r_max);

struct SobolevScale {
    int radius = 0;
    double bump_ratio = 0.0;
    double random_max = 0.0;
};

/// ||f||_{L^p(m)} / ||delta f||_{L^q(m)} for tent bumps of dyadic widths at x
/// plus random functions supported on the same balls. Bounded ratios across
/// radii are the S_{q,p} evidence; growth documents failure.
std::vector<SobolevScale> sobolev_report(const WeightedGraph& G, double q,
                                         double p, int x, int trials,
                                         std::uint64_t seed);

/// Continuum radial reduction on ([1, inf), r^2 dr):
///   (4 pi)^{1/6} ||f||_{L^6} / (2 sqrt(pi) ||f'||_{L^2}).
/// f must be compactly supported: f(r) = 0 for r >= support_end.
struct RadialFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;
    double support_end = 0.0;
};
double radial_sobolev_ratio(const RadialFunction& fn);

struct WalkSeries {
    std::vector<double> kernel;  ///< kernel[n-1] = p_n(x,y) / pi(y), n = 1..n_max
    double boundary_mass = 0.0;  ///< final mass on the diffusive far layer
};

/// Lazy conductance walk (hold 1/2) started at x on the reflecting truncated
/// graph. The caller builds components deep enough (>= 4 sqrt(n_max) for
/// diffusive parts); boundary_mass > 1e-9 flags an undersized truncation via
/// std::runtime_error unless `allow_boundary_mass`.
WalkSeries walk_kernel(const WeightedGraph& G, int x, int y, int n_max,
                       bool allow_boundary_mass = false);

struct AbsorbedSeries {
    std::vector<double> at_start;  ///< p_n(1,1): mass still at the start vertex
    std::vector<double> absorbed;  ///< cumulative absorbed mass, nondecreasing
};

/// Lazy walk on {0, 1, 2, ...} absorbed at 0, started at 1.
AbsorbedSeries absorbed_ray_return(int n_max);

struct DecayFit {
    double alpha = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    int n_lo = 0, n_hi = 0;
    int points = 0;
};

/// Fit p_n ~ C n^{-alpha} by least squares of ln p against ln n at the dyadic
/// times n = 2^j inside [n_lo, n_hi]. Requires >= 5 such points.
DecayFit decay_fit(const std::vector<double>& series, int n_lo, int n_hi);

/// Bottom of the spectrum of the component rooted at vertex 0:
///   inf over f vanishing beyond depth L of
///   sum_x m(x) (delta f)^2(x) / sum_x m(x) f(x)^2,
/// via the smallest generalized eigenvalue of the Dirichlet truncation.
double spectral_bottom(const WeightedGraph& G, int L);

struct NetGraph {
    WeightedGraph graph;
    std::vector<PointH3> points;
};

/// Greedy maximal eps-separated subnet of the cloud (insertion order: by
/// distance to the first point), edges between net points at hyperbolic
/// distance <= 2 eps, uniform weight vol(eps).
NetGraph discretise(const std::vector<PointH3>& points, double eps);

struct QuasiIsometryFit {
    double a = 0.0;       ///< fitted metric distortion slope
    double b = 0.0;       ///< max additive defect observed
    int pairs = 0;        ///< connected pairs sampled
    int components = 0;   ///< connected components of the net
};

/// Compare graph distances (scaled by eps jumps) to hyperbolic distances over
/// sampled pairs of net points.
QuasiIsometryFit quasi_isometry_fit(const NetGraph& net);

} // namespace oheat

#include "orbitalheat/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace oheat {

WalkSeries walk_kernel(const WeightedGraph& G, int x, int y, int n_max,
                       bool allow_boundary_mass) {
    if (!G.finalized()) throw std::invalid_argument("walk_kernel: finalize first");
    if (x < 0 || x >= G.size() || y < 0 || y >= G.size()) {
        throw std::invalid_argument("walk_kernel: vertex out of range");
    }
    if (n_max < 1) throw std::invalid_argument("walk_kernel: n_max >= 1");

    const int n = G.size();
    std::vector<double> pi(n);
    for (int u = 0; u < n; ++u) {
        pi[u] = G.vertex_measure(u);
        if (!(pi[u] > 0.0)) {
            throw std::invalid_argument("walk_kernel: isolated vertex");
        }
    }

    // rate[k] for the k-th incidence of u: c(u, v) / (2 pi(u)).
    std::vector<double> rate;
    std::vector<int> offsets(n + 1, 0);
    std::vector<int> target;
    for (int u = 0; u < n; ++u) {
        auto [beg, end] = G.neighbors(u);
        offsets[u + 1] = offsets[u] + static_cast<int>(end - beg);
        for (int k = 0; beg + k != end; ++k) {
            target.push_back(beg[k]);
            rate.push_back(G.conductance_at(u, k) / (2.0 * pi[u]));
        }
    }

    std::vector<double> v(n, 0.0), w(n, 0.0);
    v[x] = 1.0;
    WalkSeries out;
    out.kernel.resize(n_max);
    for (int step = 1; step <= n_max; ++step) {
        for (int u = 0; u < n; ++u) w[u] = 0.5 * v[u];
        for (int u = 0; u < n; ++u) {
            const double mass = v[u];
            if (mass == 0.0) continue;
            for (int k = offsets[u]; k < offsets[u + 1]; ++k) {
                w[target[k]] += mass * rate[k];
            }
        }
        v.swap(w);
        out.kernel[step - 1] = v[y] / pi[y];
    }
    for (int b : G.diffusive_boundary) out.boundary_mass += v[b];
    if (!allow_boundary_mass && out.boundary_mass > 1e-9) {
        throw std::runtime_error(
            "walk_kernel: boundary mass above 1e-9; deepen the truncation "
            "(diffusive components need depth >= 4 sqrt(n_max))");
    }
    return out;
}

AbsorbedSeries absorbed_ray_return(int n_max) {
    if (n_max < 8) throw std::invalid_argument("absorbed_ray_return: n_max >= 8");
    const int D = static_cast<int>(std::ceil(4.0 * std::sqrt(double(n_max)))) + 2;

    // States 1..D of the half line; 0 is the absorbing endpoint.
    std::vector<double> v(D + 1, 0.0), w(D + 1, 0.0);
    v[1] = 1.0;
    AbsorbedSeries out;
    out.at_start.resize(n_max);
    out.absorbed.resize(n_max);
    double absorbed = 0.0;
    for (int step = 1; step <= n_max; ++step) {
        for (int i = 1; i <= D; ++i) w[i] = 0.5 * v[i];
        absorbed += 0.25 * v[1];
        w[2] += 0.25 * v[1];
        for (int i = 2; i < D; ++i) {
            w[i - 1] += 0.25 * v[i];
            w[i + 1] += 0.25 * v[i];
        }
        w[D - 1] += 0.5 * v[D];  // reflecting far endpoint: pi(D) = c(D-1, D)
        v.swap(w);
        out.at_start[step - 1] = v[1];
        out.absorbed[step - 1] = absorbed;
    }
    return out;
}

DecayFit decay_fit(const std::vector<double>& series, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi <= n_lo) {
        throw std::invalid_argument("decay_fit: bad window");
    }
    std::vector<double> xs, ys;
    for (int n = 1; n <= n_hi; n *= 2) {
        if (n < n_lo || n > static_cast<int>(series.size())) continue;
        const double p = series[n - 1];
        if (!(p > 0.0)) {
            throw std::invalid_argument("decay_fit: nonpositive series value");
        }
        xs.push_back(std::log(double(n)));
        ys.push_back(std::log(p));
    }
    if (xs.size() < 5) {
        throw std::runtime_error("decay_fit: fewer than 5 dyadic points in window");
    }
    const SlopeFit s = least_squares(xs, ys);
    DecayFit fit;
    fit.alpha = -s.slope;
    fit.intercept = s.intercept;
    fit.residual_rms = s.residual_rms;
    fit.n_lo = n_lo;
    fit.n_hi = n_hi;
    fit.points = static_cast<int>(xs.size());
    return fit;
}

} // namespace oheat

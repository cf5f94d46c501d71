#include "orbitalheat/graph.hpp"

#include "orbitalheat/heat.hpp"
#include "orbitalheat/parallel.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oheat {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

void WeightedGraph::add_edge(int u, int v) { add_edge(u, v, -1.0); }

void WeightedGraph::add_edge(int u, int v, double cond) {
    if (u == v) throw std::invalid_argument("graph: self loop");
    if (u > v) std::swap(u, v);
    edge_u.push_back(u);
    edge_v.push_back(v);
    edge_cond.push_back(cond);
}

void WeightedGraph::finalize(bool require_connected) {
    const int n = size();
    if (n == 0) throw std::invalid_argument("graph: empty vertex set");
    for (double w : weight) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("graph: weights must be positive finite");
        }
    }
    for (std::size_t e = 0; e < edge_u.size(); ++e) {
        if (edge_u[e] < 0 || edge_v[e] >= n) {
            throw std::invalid_argument("graph: edge endpoint out of range");
        }
        if (edge_cond[e] < 0.0) {
            edge_cond[e] = 0.5 * (weight[edge_u[e]] + weight[edge_v[e]]);
        }
    }
    std::vector<int> deg(n, 0);
    for (std::size_t e = 0; e < edge_u.size(); ++e) {
        ++deg[edge_u[e]];
        ++deg[edge_v[e]];
    }
    offsets.assign(n + 1, 0);
    for (int u = 0; u < n; ++u) offsets[u + 1] = offsets[u] + deg[u];
    adj.assign(offsets[n], 0);
    adj_edge.assign(offsets[n], 0);
    std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t e = 0; e < edge_u.size(); ++e) {
        const int u = edge_u[e], v = edge_v[e];
        adj[cursor[u]] = v;
        adj_edge[cursor[u]++] = static_cast<int>(e);
        adj[cursor[v]] = u;
        adj_edge[cursor[v]++] = static_cast<int>(e);
    }
    if (require_connected) {
        const auto d = bfs_depths(0);
        for (int u = 0; u < n; ++u) {
            if (d[u] < 0) throw std::invalid_argument("graph: not connected");
        }
    }
}

std::pair<const int*, const int*> WeightedGraph::neighbors(int u) const {
    return {adj.data() + offsets[u], adj.data() + offsets[u + 1]};
}

double WeightedGraph::conductance_at(int u, int k) const {
    return edge_cond[adj_edge[offsets[u] + k]];
}

double WeightedGraph::vertex_measure(int u) const {
    double s = 0.0;
    for (int k = offsets[u]; k < offsets[u + 1]; ++k) s += edge_cond[adj_edge[k]];
    return s;
}

std::vector<int> WeightedGraph::bfs_depths(int x) const {
    std::vector<int> d(size(), -1);
    std::deque<int> q{x};
    d[x] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int k = offsets[u]; k < offsets[u + 1]; ++k) {
            const int v = adj[k];
            if (d[v] < 0) {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    return d;
}

std::vector<int> WeightedGraph::ball(int x, int r) const {
    const auto d = bfs_depths(x);
    std::vector<int> out;
    for (int u = 0; u < size(); ++u) {
        if (d[u] >= 0 && d[u] <= r) out.push_back(u);
    }
    return out;
}

double WeightedGraph::mu_ball(int x, int r) const {
    double s = 0.0;
    for (int u : ball(x, r)) s += weight[u];
    return s;
}

std::string WeightedGraph::to_json() const {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (int u = 0; u < size(); ++u) {
        j["vertices"].push_back({{"id", u}, {"weight", weight[u]}});
    }
    j["edges"] = nlohmann::json::array();
    for (std::size_t e = 0; e < edge_u.size(); ++e) {
        j["edges"].push_back({edge_u[e], edge_v[e]});
    }
    return j.dump(2);
}

WeightedGraph WeightedGraph::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("graph file: ") + e.what());
    }
    if (!j.contains("vertices") || !j.contains("edges")) {
        throw std::invalid_argument("graph file: needs 'vertices' and 'edges'");
    }
    WeightedGraph G;
    G.weight.assign(j["vertices"].size(), 0.0);
    for (const auto& v : j["vertices"]) {
        const int id = v.at("id").get<int>();
        if (id < 0 || id >= G.size()) {
            throw std::invalid_argument("graph file: vertex id out of range");
        }
        G.weight[id] = v.at("weight").get<double>();
    }
    for (const auto& e : j["edges"]) {
        G.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    }
    G.finalize(false);
    return G;
}

WeightedGraph build_star(int d, int L) {
    if (d < 1 || L < 1) throw std::invalid_argument("build_star: need d, L >= 1");
    WeightedGraph G;
    G.weight.assign(1 + static_cast<std::size_t>(d) * L, 1.0);
    G.component.assign(G.weight.size(), 0);
    G.depth.assign(G.weight.size(), 0);
    int next = 1;
    for (int r = 0; r < d; ++r) {
        int prev = 0;
        for (int k = 1; k <= L; ++k, ++next) {
            G.add_edge(prev, next);
            G.component[next] = r + 1;
            G.depth[next] = k;
            prev = next;
        }
        G.diffusive_boundary.push_back(prev);
    }
    G.finalize();
    return G;
}

WeightedGraph build_unit_ray(int L) { return build_star(1, L); }

namespace {
constexpr int kGfDepthCap = 330;
}

WeightedGraph build_gf_ray(int L) {
    L = std::min(L, kGfDepthCap);
    if (L < 1) throw std::invalid_argument("build_gf_ray: need L >= 1");
    WeightedGraph G;
    G.weight.resize(L + 1);
    G.component.assign(L + 1, 1);
    G.depth.resize(L + 1);
    for (int k = 0; k <= L; ++k) {
        G.weight[k] = std::exp(2.0 * k);
        G.depth[k] = k;
        if (k > 0) G.add_edge(k - 1, k);
    }
    G.component[0] = 0;
    G.finalize();
    return G;
}

WeightedGraph build_binary_tree(int depth) {
    if (depth < 1 || depth > 20) {
        throw std::invalid_argument("build_binary_tree: depth in [1, 20]");
    }
    WeightedGraph G;
    const std::size_t n = (std::size_t{1} << (depth + 1)) - 1;
    G.weight.assign(n, 1.0);
    G.component.assign(n, 1);
    G.depth.assign(n, 0);
    G.component[0] = 0;
    // Heap layout: children of i are 2i+1, 2i+2.
    for (std::size_t i = 0; 2 * i + 2 < n; ++i) {
        G.add_edge(static_cast<int>(i), static_cast<int>(2 * i + 1));
        G.add_edge(static_cast<int>(i), static_cast<int>(2 * i + 2));
    }
    const auto d = [&] {
        std::vector<int> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            int dep = 0;
            for (std::size_t j = i; j > 0; j = (j - 1) / 2) ++dep;
            v[i] = dep;
        }
        return v;
    }();
    G.depth = d;
    G.finalize();
    return G;
}

WeightedGraph build_mixed(int d, int p, int L, GfModel gf, int gf_depth) {
    if (d < 1) throw std::invalid_argument("build_mixed: need d >= 1");
    if (p < 0 || L < 1) throw std::invalid_argument("build_mixed: bad p or L");
    if (gf_depth < 0) gf_depth = std::min(L, kGfDepthCap);
    gf_depth = std::min(gf_depth, kGfDepthCap);

    WeightedGraph G;
    G.weight.push_back(1.0);  // root carries the depth-0 degenerate weight
    G.component.push_back(0);
    G.depth.push_back(0);

    for (int r = 0; r < d; ++r) {
        int prev = 0;
        for (int k = 1; k <= L; ++k) {
            G.weight.push_back(double(1 + k) * double(1 + k));
            G.component.push_back(r + 1);
            G.depth.push_back(k);
            G.add_edge(prev, static_cast<int>(G.weight.size()) - 1);
            prev = static_cast<int>(G.weight.size()) - 1;
        }
        G.diffusive_boundary.push_back(prev);
    }

    for (int c = 0; c < p; ++c) {
        int prev = 0;
        for (int k = 1; k <= gf_depth; ++k) {
            const int id = static_cast<int>(G.weight.size());
            if (gf == GfModel::weighted_ray) {
                G.weight.push_back(std::exp(2.0 * k));
                G.add_edge(prev, id);
            } else {
                // Depth projection of the unit binary tree: level size 2^k,
                // level-to-level conductance = number of crossing edges.
                G.weight.push_back(std::ldexp(1.0, k));
                G.add_edge(prev, id, std::ldexp(1.0, k));
            }
            G.component.push_back(d + 1 + c);
            G.depth.push_back(k);
            prev = id;
        }
    }
    G.finalize();
    return G;
}

double delta_f(const WeightedGraph& G, const std::vector<double>& f, int x) {
    if (f.size() != static_cast<std::size_t>(G.size())) {
        throw std::invalid_argument("delta_f: f must be total on G");
    }
    double s = 0.0;
    auto [beg, end] = G.neighbors(x);
    for (const int* it = beg; it != end; ++it) {
        const double d = f[*it] - f[x];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

// Numerator and denominator quadratic forms of the Poincare quotient on
// B(x, 2r), in the index space of that ball.
struct PoincareForms {
    Eigen::MatrixXd mass;       // centered mass on B(x, r)
    Eigen::MatrixXd dirichlet;  // sum over B(x,2r) of (delta f)^2, edges inside
    std::vector<int> ball2;
};

PoincareForms poincare_forms(const WeightedGraph& G, int x, int r) {
    PoincareForms F;
    F.ball2 = G.ball(x, 2 * r);
    const int n = static_cast<int>(F.ball2.size());
    std::vector<int> pos(G.size(), -1);
    for (int i = 0; i < n; ++i) pos[F.ball2[i]] = i;

    const auto depths = G.bfs_depths(x);
    std::vector<int> inner;
    for (int i = 0; i < n; ++i) {
        if (depths[F.ball2[i]] <= r) inner.push_back(i);
    }

    F.mass = Eigen::MatrixXd::Zero(n, n);
    for (int i : inner) F.mass(i, i) += 1.0;
    const double inv = 1.0 / static_cast<double>(inner.size());
    for (int i : inner) {
        for (int j : inner) F.mass(i, j) -= inv;
    }

    F.dirichlet = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int u = F.ball2[i];
        auto [beg, end] = G.neighbors(u);
        for (const int* it = beg; it != end; ++it) {
            const int j = pos[*it];
            if (j < 0) continue;
            F.dirichlet(i, i) += 1.0;
            F.dirichlet(j, j) += 1.0;
            F.dirichlet(i, j) -= 1.0;
            F.dirichlet(j, i) -= 1.0;
        }
    }
    // Each unordered ball-internal edge was visited from both endpoints,
    // matching the per-vertex (delta f)^2 convention.
    return F;
}

} // namespace

double poincare_sup(const WeightedGraph& G, int x, int r) {
    if (r < 0) throw std::invalid_argument("poincare_sup: r must be >= 0");
    if (r == 0) return 0.0;
    const PoincareForms F = poincare_forms(G, x, r);
    const int n = static_cast<int>(F.ball2.size());
    if (n < 2) return 0.0;

    // Deflate the constants (kernel of the Dirichlet form on a connected
    // ball) with an orthonormal basis of 1^perp.
    Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, 1, 1.0 / std::sqrt(n));
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - ones * ones.transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q);
    Eigen::MatrixXd V =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, n - 1);
    // Guard: make the basis exactly orthogonal to 1.
    Eigen::VectorXd one = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));
    V -= one * (one.transpose() * V);

    Eigen::MatrixXd A = V.transpose() * F.mass * V;
    Eigen::MatrixXd D = V.transpose() * F.dirichlet * V;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, D);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("poincare_sup: eigensolver failed");
    }
    const double lambda = solver.eigenvalues().maxCoeff();
    return lambda / (static_cast<double>(r) * static_cast<double>(r));
}

double poincare_random_max(const WeightedGraph& G, int x, int r, int trials,
                           std::uint64_t seed) {
    if (r <= 0 || trials <= 0) return 0.0;
    const PoincareForms F = poincare_forms(G, x, r);
    const int n = static_cast<int>(F.ball2.size());
    std::vector<double> best(trials, 0.0);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
        std::mt19937_64 rng(splitmix64(seed + i));
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Eigen::VectorXd f(n);
        for (int k = 0; k < n; ++k) f[k] = uni(rng);
        const double num = f.dot(F.mass * f);
        const double den = f.dot(F.dirichlet * f);
        if (den > 0.0) best[i] = num / den;
    });
    double m = 0.0;
    for (double v : best) m = std::max(m, v);
    return m / (static_cast<double>(r) * static_cast<double>(r));
}

double doubling_constant(const WeightedGraph& G, int x, int r_max) {
    if (r_max < 1) throw std::invalid_argument("doubling_constant: r_max >= 1");
    double worst = 0.0;
    for (int r = 1; r <= r_max; ++r) {
        worst = std::max(worst, G.mu_ball(x, 2 * r) / G.mu_ball(x, r));
    }
    return worst;
}

namespace {

double lp_norm(const WeightedGraph& G, const std::vector<double>& f, double p) {
    double s = 0.0;
    for (int u = 0; u < G.size(); ++u) {
        s += G.weight[u] * std::pow(std::abs(f[u]), p);
    }
    return std::pow(s, 1.0 / p);
}

double delta_lq_norm(const WeightedGraph& G, const std::vector<double>& f,
                     double q) {
    double s = 0.0;
    for (int u = 0; u < G.size(); ++u) {
        s += G.weight[u] * std::pow(delta_f(G, f, u), q);
    }
    return std::pow(s, 1.0 / q);
}

} // namespace

std::vector<SobolevScale> sobolev_report(const WeightedGraph& G, double q,
                                         double p, int x, int trials,
                                         std::uint64_t seed) {
    if (q < 1.0 || p < 1.0) {
        throw std::invalid_argument("sobolev_report: need p, q >= 1");
    }
    const auto depths = G.bfs_depths(x);
    int max_depth = 0;
    for (int d : depths) max_depth = std::max(max_depth, d);

    std::vector<SobolevScale> out;
    for (int r = 1; r <= std::max(1, max_depth - 1); r *= 2) {
        SobolevScale sc;
        sc.radius = r;

        std::vector<double> bump(G.size(), 0.0);
        for (int u = 0; u < G.size(); ++u) {
            if (depths[u] <= r) bump[u] = 1.0 - double(depths[u]) / (r + 1.0);
        }
        const double dn = delta_lq_norm(G, bump, q);
        sc.bump_ratio = dn > 0.0 ? lp_norm(G, bump, p) / dn : 0.0;

        std::vector<double> best(std::max(trials, 0), 0.0);
        parallel_for(static_cast<std::size_t>(std::max(trials, 0)),
                     [&](std::size_t i) {
                         std::mt19937_64 rng(splitmix64(seed + 7919 * r + i));
                         std::uniform_real_distribution<double> uni(-1.0, 1.0);
                         std::vector<double> f(G.size(), 0.0);
                         for (int u = 0; u < G.size(); ++u) {
                             if (depths[u] <= r) f[u] = uni(rng);
                         }
                         const double den = delta_lq_norm(G, f, q);
                         if (den > 0.0) best[i] = lp_norm(G, f, p) / den;
                     });
        for (double v : best) sc.random_max = std::max(sc.random_max, v);
        out.push_back(sc);
    }
    return out;
}

double radial_sobolev_ratio(const RadialFunction& fn) {
    if (!(fn.support_end > 1.0) || !std::isfinite(fn.support_end)) {
        throw std::invalid_argument(
            "radial_sobolev_ratio: need compact support inside [1, inf)");
    }
    const double b = fn.support_end;
    const double i6 = integrate(
        [&](double r) { return std::pow(fn.f(r), 6.0) * r * r; }, 1.0, b);
    const double i2 = integrate(
        [&](double r) {
            const double d = fn.df(r);
            return d * d * r * r;
        },
        1.0, b);
    if (!(i6 > 0.0)) {
        throw std::invalid_argument("radial_sobolev_ratio: zero function");
    }
    constexpr double kPi = 3.14159265358979323846;
    return std::pow(4.0 * kPi, 1.0 / 6.0) * std::pow(i6, 1.0 / 6.0) /
           (2.0 * std::sqrt(kPi) * std::sqrt(i2));
}

double spectral_bottom(const WeightedGraph& G, int L) {
    if (L < 2) throw std::invalid_argument("spectral_bottom: L >= 2");
    const auto depths = G.bfs_depths(0);
    std::vector<int> kept;
    std::vector<int> pos(G.size(), -1);
    for (int u = 0; u < G.size(); ++u) {
        if (depths[u] >= 0 && depths[u] < L) {
            pos[u] = static_cast<int>(kept.size());
            kept.push_back(u);
        }
    }
    const int n = static_cast<int>(kept.size());
    if (n < 1) throw std::invalid_argument("spectral_bottom: empty truncation");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int u = 0; u < G.size(); ++u) {
        auto [beg, end] = G.neighbors(u);
        for (const int* it = beg; it != end; ++it) {
            const int v = *it;
            const int iu = pos[u], iv = pos[v];
            if (iu >= 0 && iv >= 0) {
                A(iu, iu) += G.weight[u];
                A(iv, iv) += G.weight[u];
                A(iu, iv) -= G.weight[u];
                A(iv, iu) -= G.weight[u];
            } else if (iu < 0 && iv >= 0) {
                A(iv, iv) += G.weight[u];  // f vanishes at u
            } else if (iu >= 0 && iv < 0) {
                A(iu, iu) += G.weight[u];
            }
        }
    }
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) m[i] = G.weight[kept[i]];
    Eigen::MatrixXd M = m.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, M);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectral_bottom: eigensolver failed");
    }
    return solver.eigenvalues().minCoeff();
}

NetGraph discretise(const std::vector<PointH3>& points, double eps) {
    if (points.empty()) throw std::invalid_argument("discretise: empty cloud");
    if (!(eps > 0.0)) throw std::invalid_argument("discretise: eps must be > 0");

    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> to_first(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        to_first[i] = dist(points[0], points[i]);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (to_first[a] != to_first[b]) return to_first[a] < to_first[b];
        const PointH3 &pa = points[a], &pb = points[b];
        if (pa.x1 != pb.x1) return pa.x1 < pb.x1;
        if (pa.x2 != pb.x2) return pa.x2 < pb.x2;
        return pa.h < pb.h;
    });

    NetGraph net;
    for (std::size_t idx : order) {
        bool separated = true;
        for (const PointH3& kept : net.points) {
            if (dist(points[idx], kept) < eps) {
                separated = false;
                break;
            }
        }
        if (separated) net.points.push_back(points[idx]);
    }

    net.graph.weight.assign(net.points.size(), ball_volume(eps));
    for (std::size_t i = 0; i < net.points.size(); ++i) {
        for (std::size_t j = i + 1; j < net.points.size(); ++j) {
            if (dist(net.points[i], net.points[j]) <= 2.0 * eps) {
                net.graph.add_edge(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    net.graph.finalize(false);
    return net;
}

QuasiIsometryFit quasi_isometry_fit(const NetGraph& net) {
    const int n = net.graph.size();
    QuasiIsometryFit fit;

    std::vector<char> seen(n, 0);
    for (int u = 0; u < n; ++u) {
        if (seen[u]) continue;
        ++fit.components;
        const auto d = net.graph.bfs_depths(u);
        for (int v = 0; v < n; ++v) {
            if (d[v] >= 0) seen[v] = 1;
        }
    }

    std::vector<double> xs, ys;
    const int stride = n > 150 ? n / 150 + 1 : 1;
    for (int u = 0; u < n; u += stride) {
        const auto d = net.graph.bfs_depths(u);
        for (int v = u + 1; v < n; v += stride) {
            if (d[v] <= 0) continue;
            xs.push_back(dist(net.points[u], net.points[v]));
            ys.push_back(static_cast<double>(d[v]));
            ++fit.pairs;
        }
    }
    if (xs.size() >= 2) {
        const SlopeFit s = least_squares(xs, ys);
        fit.a = s.slope;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            fit.b = std::max(fit.b, std::abs(ys[i] - s.slope * xs[i]));
        }
    }
    return fit;
}

} // namespace oheat

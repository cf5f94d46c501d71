#include "orbitalheat/groups.hpp"

#include "orbitalheat/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace oheat {

namespace {

using json = nlohmann::json;

// Deduplication works on the Frobenius-normalized matrix (entries / ||g||_F
// plus ln ||g||_F as a ninth coordinate). Floating-point spread between two
// evaluations of the same element is relative to the entry scale, so an
// absolute grid on raw entries would stop deduplicating far out in the orbit.
// Two interleaved grids (the second offset by half a cell) guarantee that
// duplicates closer than a quarter cell share a cell in at least one grid.
constexpr double kFineCell = 1e-8;
constexpr double kCoarseCell = 1e-6;

using Key9 = std::array<std::int64_t, 9>;

struct Key9Hash {
    std::size_t operator()(const Key9& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : k) {
            std::uint64_t u;
            std::memcpy(&u, &v, sizeof(u));
            h = (h ^ u) * 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

std::array<double, 9> normalized_coords(const Isometry& g) {
    const double f = std::sqrt(g.frobenius_sq());
    return {g.a.real() / f, g.a.imag() / f, g.b.real() / f, g.b.imag() / f,
            g.c.real() / f, g.c.imag() / f, g.d.real() / f, g.d.imag() / f,
            std::log(f)};
}

Key9 grid_key(const std::array<double, 9>& v, double cell, double offset,
              bool negate) {
    Key9 k;
    for (int i = 0; i < 9; ++i) {
        double x = (i < 8 && negate) ? -v[i] : v[i];
        k[i] = static_cast<std::int64_t>(std::llround(x / cell + offset));
    }
    return k;
}

class DedupStore {
  public:
    // True if g is new. Throws discreteness_error when g falls inside the
    // ambiguity zone of a previously seen element (same coarse cell, distinct
    // fine cells: closer than ~1e-6 without being a genuine duplicate).
    bool insert(const Isometry& g) {
        const auto v = normalized_coords(g);
        bool fine_hit = false;
        for (bool neg : {false, true}) {
            for (double off : {0.0, 0.5}) {
                if (fine_.count(grid_key(v, kFineCell, off, neg))) {
                    fine_hit = true;
                }
            }
        }
        bool coarse_hit = false;
        for (bool neg : {false, true}) {
            for (double off : {0.0, 0.5}) {
                if (coarse_.count(grid_key(v, kCoarseCell, off, neg))) {
                    coarse_hit = true;
                }
            }
        }
        if (fine_hit) return false;
        if (coarse_hit) {
            throw discreteness_error(
                "two words collide within ~1e-6 but beyond the duplicate "
                "grid; the generator set looks non-discrete");
        }
        for (double off : {0.0, 0.5}) {
            fine_.insert(grid_key(v, kFineCell, off, false));
            coarse_.insert(grid_key(v, kCoarseCell, off, false));
        }
        return true;
    }

  private:
    std::unordered_set<Key9, Key9Hash> fine_;
    std::unordered_set<Key9, Key9Hash> coarse_;
};

complexd parse_complex(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_array() || j[field].size() != 2) {
        throw std::invalid_argument(std::string("group file: entry '") + field +
                                    "' must be [re, im]");
    }
    return complexd{j[field][0].get<double>(), j[field][1].get<double>()};
}

std::vector<long long> negated(const std::vector<long long>& v) {
    std::vector<long long> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = -v[i];
    return r;
}

} // namespace

void GroupPresentation::finalize() {
    for (auto& g : generators) g.mat = canonical(g.mat);

    const std::size_t rank = hom_rank();
    for (const auto& g : generators) {
        if (!g.hom.empty() && g.hom.size() != rank) {
            throw std::invalid_argument(
                "group: hom vectors must share one dimension");
        }
        if (has_hom() && g.hom.empty()) {
            throw std::invalid_argument(
                "group: hom must be given on every generator");
        }
    }

    const std::size_t original = generators.size();
    for (std::size_t i = 0; i < original; ++i) {
        const Isometry inv = inverse(generators[i].mat);
        bool present = false;
        for (const auto& g : generators) {
            if (approx_equal(g.mat, inv, 1e-9)) {
                present = true;
                break;
            }
        }
        if (!present) {
            generators.push_back(Generator{generators[i].label + "'", inv,
                                           negated(generators[i].hom)});
        }
    }
    inverse_closed = true;
}

bool GroupPresentation::has_hom() const {
    for (const auto& g : generators) {
        if (!g.hom.empty()) return true;
    }
    return false;
}

std::size_t GroupPresentation::hom_rank() const {
    for (const auto& g : generators) {
        if (!g.hom.empty()) return g.hom.size();
    }
    return 0;
}

GroupPresentation GroupPresentation::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("group file: ") + e.what());
    }
    if (!j.contains("generators") || !j["generators"].is_array()) {
        throw std::invalid_argument("group file: missing 'generators' array");
    }
    GroupPresentation G;
    for (const auto& item : j["generators"]) {
        Generator gen;
        gen.label = item.value("label", std::string{});
        if (gen.label.empty()) {
            throw std::invalid_argument("group file: generator without label");
        }
        gen.mat.a = parse_complex(item, "a");
        gen.mat.b = parse_complex(item, "b");
        gen.mat.c = parse_complex(item, "c");
        gen.mat.d = parse_complex(item, "d");
        if (std::abs(gen.mat.det() - complexd{1.0, 0.0}) > 1e-6) {
            throw std::invalid_argument("group file: generator '" + gen.label +
                                        "' determinant is not 1");
        }
        G.generators.push_back(std::move(gen));
    }
    if (j.contains("hom")) {
        for (auto& gen : G.generators) {
            if (!j["hom"].contains(gen.label)) continue;
            for (const auto& v : j["hom"][gen.label]) {
                gen.hom.push_back(v.get<long long>());
            }
        }
    }
    G.finalize();
    return G;
}

GroupPresentation GroupPresentation::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open group file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

GroupPresentation GroupPresentation::builtin(const std::string& spec) {
    std::string name = spec;
    double param = 0.0;
    bool has_param = false;
    if (auto pos = spec.find(':'); pos != std::string::npos) {
        name = spec.substr(0, pos);
        try {
            param = std::stod(spec.substr(pos + 1));
        } catch (...) {
            throw std::invalid_argument("builtin group: bad parameter in '" +
                                        spec + "'");
        }
        has_param = true;
    }

    GroupPresentation G;
    if (name == "trivial") {
        G.finalize();
        return G;
    }
    if (name == "cyclic") {
        const double l = has_param ? param : 1.0;
        if (!(l > 0.0)) throw std::invalid_argument("cyclic: length must be > 0");
        Isometry g;
        g.a = std::exp(l / 2.0);
        g.d = std::exp(-l / 2.0);
        G.generators.push_back({"g", g, {}});
        G.finalize();
        return G;
    }
    if (name == "parabolic") {
        Isometry g;
        g.b = 1.0;
        G.generators.push_back({"t", g, {}});
        G.finalize();
        return G;
    }
    if (name == "schottky") {
        // Rank-2 ping-pong pair. The generator of translation length l pairs
        // the circles |z + A| = 1 and |z - A| = 1 with A = cosh(l/2); its
        // conjugate by z -> iz pairs the same circles rotated to the
        // imaginary axis. The four circles are pairwise disjoint as soon as
        // A > sqrt(2), i.e. l > 2 acosh(sqrt(2)), which certifies the group
        // free and discrete.
        const double l = has_param ? param : 3.0;
        const double l_min = 2.0 * std::acosh(std::sqrt(2.0));
        if (!(l > l_min)) {
            throw std::invalid_argument(
                "schottky: translation length must exceed 2*acosh(sqrt(2)) "
                "~= 1.7627 for the ping-pong circles to separate");
        }
        const double A = std::cosh(l / 2.0);
        Isometry g1;
        g1.a = A;
        g1.b = A * A - 1.0;
        g1.c = 1.0;
        g1.d = A;
        Isometry g2;
        g2.a = A;
        g2.b = complexd{0.0, A * A - 1.0};
        g2.c = complexd{0.0, -1.0};
        g2.d = A;
        G.generators.push_back({"a", g1, {1, 0}});
        G.generators.push_back({"b", g2, {0, 1}});
        G.finalize();
        return G;
    }
    throw std::invalid_argument("unknown builtin group: " + spec);
}

GroupPresentation GroupPresentation::resolve(const std::string& name_or_path) {
    const std::string base = name_or_path.substr(0, name_or_path.find(':'));
    if (base == "trivial" || base == "cyclic" || base == "parabolic" ||
        base == "schottky") {
        return builtin(name_or_path);
    }
    return from_file(name_or_path);
}

namespace {

struct Explored {
    Isometry g;
    double d = 0.0;
    std::int32_t parent = -1;  // index into the explored list
    std::int32_t gen = -1;     // generator applied to the parent
};

struct Candidate {
    Isometry g;
    double d = 0.0;
    std::int32_t parent = -1;
    std::int32_t gen = -1;
    bool kept = false;
};

std::vector<int32_t> word_of(const std::vector<Explored>& all, std::int32_t i) {
    std::vector<int32_t> w;
    while (i >= 0 && all[i].gen >= 0) {
        w.push_back(all[i].gen);
        i = all[i].parent;
    }
    std::reverse(w.begin(), w.end());
    return w;
}

bool matrix_less(const Isometry& a, const Isometry& b) {
    const double va[8] = {a.a.real(), a.a.imag(), a.b.real(), a.b.imag(),
                          a.c.real(), a.c.imag(), a.d.real(), a.d.imag()};
    const double vb[8] = {b.a.real(), b.a.imag(), b.b.real(), b.b.imag(),
                          b.c.real(), b.c.imag(), b.d.real(), b.d.imag()};
    for (int i = 0; i < 8; ++i) {
        if (va[i] != vb[i]) return va[i] < vb[i];
    }
    return false;
}

} // namespace

OrbitBall enumerate_ball(const GroupPresentation& G, const PointH3& x,
                         const PointH3& y, double R,
                         const EnumerationOptions& opts) {
    if (!(R >= 0.0)) throw std::invalid_argument("enumerate_ball: R must be >= 0");
    if (!G.inverse_closed) {
        throw std::invalid_argument("enumerate_ball: presentation not finalized");
    }

    double max_disp = 0.0;
    for (const auto& g : G.generators) {
        max_disp = std::max(max_disp, displacement(g.mat));
    }
    const double margin =
        opts.prune_margin >= 0.0 ? opts.prune_margin : std::max(1.0, 2.0 * max_disp);
    const double dxy = dist(x, y);
    const double barrier = std::max(R, dxy) + margin;
    const double include_limit = R + 1e-9;
    const double frob_offset = dist(kBasepoint, x) + dist(kBasepoint, y);

    std::vector<Explored> all;
    all.push_back(Explored{Isometry::identity(), dxy, -1, -1});
    DedupStore seen;
    seen.insert(all[0].g);

    std::vector<std::int32_t> frontier{0};
    bool pruned_any = false;
    bool capped = false;
    const std::size_t n_gens = G.generators.size();

    while (!frontier.empty() && !capped && n_gens > 0) {
        const std::size_t tasks = frontier.size();
        std::vector<std::vector<Candidate>> per_parent(tasks);
        std::vector<char> pruned_flag(tasks, 0);

        parallel_for(tasks, [&](std::size_t ti) {
            const std::int32_t pi = frontier[ti];
            const Explored parent = all[pi];
            auto& out = per_parent[ti];
            out.reserve(n_gens);
            for (std::size_t s = 0; s < n_gens; ++s) {
                Candidate c;
                c.g = compose(parent.g, G.generators[s].mat);
                c.parent = pi;
                c.gen = static_cast<std::int32_t>(s);
                // Cheap lower bound d(x, g y) >= d(j, g j) - d(j,x) - d(j,y).
                const double lb = displacement(c.g) - frob_offset;
                if (lb > barrier) {
                    pruned_flag[ti] = 1;
                    continue;
                }
                c.d = dist(x, apply(c.g, y));
                if (c.d > barrier) {
                    pruned_flag[ti] = 1;
                    continue;
                }
                c.kept = true;
                out.push_back(c);
            }
        });

        std::vector<std::int32_t> next;
        for (std::size_t ti = 0; ti < tasks && !capped; ++ti) {
            pruned_any = pruned_any || pruned_flag[ti];
            for (const Candidate& c : per_parent[ti]) {
                if (!c.kept || !seen.insert(c.g)) continue;
                if (all.size() >= opts.max_elements) {
                    capped = true;
                    break;
                }
                all.push_back(Explored{c.g, c.d, c.parent, c.gen});
                next.push_back(static_cast<std::int32_t>(all.size() - 1));
            }
        }
        frontier = std::move(next);
    }

    // Collect ball members (d <= R) in deterministic order.
    std::vector<std::int32_t> members;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(all.size()); ++i) {
        if (all[i].d <= include_limit) members.push_back(i);
    }
    std::sort(members.begin(), members.end(), [&](std::int32_t a, std::int32_t b) {
        if (all[a].d != all[b].d) return all[a].d < all[b].d;
        return matrix_less(all[a].g, all[b].g);
    });

    OrbitBall ball;
    ball.x = x;
    ball.y = y;
    ball.radius = R;
    ball.complete = !capped;
    ball.exhausted_group = !capped && !pruned_any;
    ball.distances.reserve(members.size());
    for (std::int32_t i : members) ball.distances.push_back(all[i].d);
    if (opts.keep_words) {
        ball.words.reserve(members.size());
        for (std::int32_t i : members) ball.words.push_back(word_of(all, i));
    }
    return ball;
}

std::size_t OrbitBall::count(double rho) const {
    if (!complete) throw std::runtime_error("count: ball is not complete");
    if (rho > radius + 1e-9) {
        throw std::domain_error("count: rho exceeds the enumeration radius");
    }
    return static_cast<std::size_t>(
        std::upper_bound(distances.begin(), distances.end(), rho + 1e-9) -
        distances.begin());
}

double averaged_orbital(const OrbitBall& ball, double rho) {
    return static_cast<double>(ball.count(rho)) * std::exp(-2.0 * rho);
}

namespace {

std::vector<double> distinct_jumps(const OrbitBall& ball) {
    std::vector<double> jumps;
    for (double d : ball.distances) {
        if (jumps.empty() || d > jumps.back() + 1e-9) jumps.push_back(d);
    }
    return jumps;
}

} // namespace

SlopeFit critical_exponent_estimate(const OrbitBall& ball) {
    if (!ball.complete) {
        throw std::runtime_error("critical_exponent: ball is not complete");
    }
    const double lo = ball.radius / 2.0;
    std::vector<double> xs, ys;
    for (double j : distinct_jumps(ball)) {
        if (j < lo || j > ball.radius + 1e-9) continue;
        xs.push_back(j);
        ys.push_back(std::log(static_cast<double>(ball.count(j))));
    }
    if (xs.size() < 5) {
        // Constant N over the window: exponent 0 by convention.
        if (ball.count(ball.radius) == ball.count(lo)) {
            SlopeFit fit;
            fit.intercept = std::log(static_cast<double>(ball.count(ball.radius)));
            fit.n_points = xs.size();
            return fit;
        }
        throw std::runtime_error(
            "critical_exponent: too few jump points in the top window");
    }
    return least_squares(xs, ys);
}

double rough_decrease_sup(const OrbitBall& ball, double rho0) {
    if (!ball.complete) {
        throw std::runtime_error("rough_decrease: ball is not complete");
    }
    if (rho0 < 0.0 || rho0 > ball.radius) {
        throw std::domain_error("rough_decrease: rho0 outside [0, R]");
    }
    double sup = 1.0;
    double run_min =
        static_cast<double>(ball.count(rho0)) * std::exp(-2.0 * rho0);
    for (double j : distinct_jumps(ball)) {
        if (j <= rho0) continue;
        const std::size_t post = ball.count(j);
        const std::size_t pre = ball.count(std::nextafter(j - 2e-9, 0.0));
        run_min = std::min(run_min,
                           static_cast<double>(pre) * std::exp(-2.0 * j));
        if (run_min > 0.0) {
            sup = std::max(sup, static_cast<double>(post) *
                                    std::exp(-2.0 * j) / run_min);
        }
    }
    return sup;
}

OrbitBall kernel_restrict(const OrbitBall& ball, const GroupPresentation& G) {
    if (ball.words.size() != ball.distances.size()) {
        throw std::invalid_argument("kernel_restrict: ball carries no words");
    }
    if (!G.has_hom()) {
        throw std::invalid_argument("kernel_restrict: presentation has no hom");
    }
    const std::size_t rank = G.hom_rank();
    OrbitBall out;
    out.x = ball.x;
    out.y = ball.y;
    out.radius = ball.radius;
    out.complete = ball.complete;
    out.exhausted_group = ball.exhausted_group;
    std::vector<long long> acc(rank);
    for (std::size_t i = 0; i < ball.distances.size(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (int32_t s : ball.words[i]) {
            const auto& h = G.generators.at(static_cast<std::size_t>(s)).hom;
            for (std::size_t k = 0; k < rank; ++k) acc[k] += h[k];
        }
        if (std::all_of(acc.begin(), acc.end(), [](long long v) { return v == 0; })) {
            out.distances.push_back(ball.distances[i]);
            out.words.push_back(ball.words[i]);
        }
    }
    return out;
}

Isometry evaluate_word(const GroupPresentation& G,
                       const std::vector<int32_t>& word) {
    Isometry g = Isometry::identity();
    for (int32_t s : word) {
        g = compose(g, G.generators.at(static_cast<std::size_t>(s)).mat);
    }
    return g;
}

double injectivity_lower_bound(const OrbitBall& ball) {
    if (!ball.complete) {
        throw std::runtime_error("injectivity bound: ball is not complete");
    }
    if (dist(ball.x, ball.y) > 1e-9) {
        throw std::invalid_argument("injectivity bound: needs a ball at x == y");
    }
    for (double d : ball.distances) {
        if (d > 1e-9) return d / 2.0;
    }
    return ball.radius / 2.0;
}

void write_ball_csv(const OrbitBall& ball, std::ostream& out) {
    out << "rho_jump,count\n";
    char buf[64];
    const auto jumps = distinct_jumps(ball);
    std::size_t cum = 0;
    std::size_t i = 0;
    for (double j : jumps) {
        while (i < ball.distances.size() && ball.distances[i] <= j + 1e-9) {
            ++cum;
            ++i;
        }
        std::snprintf(buf, sizeof(buf), "%.17g,%zu\n", j, cum);
        out << buf;
    }
}

} // namespace oheat

// Command-line surface: orbit counting, kernel identity checks and graph
// model experiments, emitting CSV/JSON artifacts for plotting.
//
// Exit codes: 0 pass, 1 input error, 2 resource or tolerance failure.

#include "orbitalheat/graph.hpp"
#include "orbitalheat/groups.hpp"
#include "orbitalheat/heat.hpp"
#include "orbitalheat/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

using json = nlohmann::json;

namespace {

struct Options {
    std::string group = "cyclic:1.0";
    double radius = 10.0;
    std::string time_grid = "1:4:4";
    double eps = 0.4;
    int d = 3;
    int p = 1;
    int depth = 64;
    int n_steps = 16384;
    int r_max = 16;
    std::vector<double> k_values;
    std::vector<double> alpha_values;
    std::string gf_model = "ray";
    std::uint64_t seed = 12345;
    std::string out = "";
};

json provenance(const std::string& command, const Options& o) {
    json cfg;
    cfg["group"] = o.group;
    cfg["radius"] = o.radius;
    cfg["time_grid"] = o.time_grid;
    cfg["eps"] = o.eps;
    cfg["d"] = o.d;
    cfg["p"] = o.p;
    cfg["depth"] = o.depth;
    cfg["n"] = o.n_steps;
    cfg["r"] = o.r_max;
    cfg["k"] = o.k_values;
    cfg["alpha"] = o.alpha_values;
    cfg["gf_model"] = o.gf_model;
    cfg["seed"] = o.seed;
    json j;
    j["command"] = command;
    j["config"] = cfg;
    j["version"] = oheat::kVersion;
    return j;
}

std::string out_prefix(const Options& o, const std::string& fallback) {
    return o.out.empty() ? fallback : o.out;
}

oheat::OrbitBall make_ball(const Options& o) {
    const auto G = oheat::GroupPresentation::resolve(o.group);
    return oheat::enumerate_ball(G, oheat::kBasepoint, oheat::kBasepoint,
                                 o.radius);
}

json fit_json(const oheat::SlopeFit& f) {
    return json{{"slope", f.slope},
                {"stderr", f.stderr_slope},
                {"rms", f.residual_rms},
                {"points", f.n_points}};
}

int cmd_count(const Options& o) {
    const auto ball = make_ball(o);
    if (!ball.complete) {
        std::cerr << "count: element cap hit, ball incomplete\n";
        return 2;
    }
    std::string csv = "rho_jump,count,count_averaged\n";
    for (std::size_t i = 0; i < ball.distances.size(); ++i) {
        const double dcur = ball.distances[i];
        if (i + 1 < ball.distances.size() &&
            ball.distances[i + 1] <= dcur + 1e-9) {
            continue;  // not the last entry of this jump
        }
        csv += oheat::format_double(dcur) + "," + std::to_string(i + 1) + "," +
               oheat::format_double(double(i + 1) * std::exp(-2.0 * dcur)) + "\n";
    }

    json j = provenance("count", o);
    j["elements"] = ball.size();
    j["complete"] = ball.complete;
    j["exhausted_group"] = ball.exhausted_group;
    try {
        j["critical_exponent"] = fit_json(oheat::critical_exponent_estimate(ball));
    } catch (const std::exception& e) {
        j["critical_exponent"] = nullptr;
        j["critical_exponent_note"] = e.what();
    }
    const double rho0 = std::min(1.0, o.radius);
    j["rough_decrease_sup"] = oheat::rough_decrease_sup(ball, rho0);
    j["rough_decrease_rho0"] = rho0;

    const std::string prefix = out_prefix(o, "count");
    oheat::write_text_file(prefix + ".csv", csv);
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << prefix << ".csv " << prefix << ".json\n";
    return 0;
}

int verify_stieltjes(const Options& o) {
    const auto ball = make_ball(o);
    const auto grid = oheat::parse_time_grid(o.time_grid);
    json rows = json::array();
    bool pass = true;
    for (double t : grid) {
        const double res = oheat::stieltjes_residual(ball, t);
        pass = pass && res <= 1e-10;
        rows.push_back({{"t", t}, {"residual", res}});
    }
    json j = provenance("verify stieltjes", o);
    j["rows"] = rows;
    j["tolerance"] = 1e-10;
    j["pass"] = pass;
    oheat::write_text_file(out_prefix(o, "stieltjes") + ".json", j.dump(2) + "\n");
    std::cout << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

int verify_upper_bound(const Options& o) {
    const auto ball = make_ball(o);
    const double r0 = oheat::injectivity_lower_bound(ball);
    std::string csv = "rho,ratio\n";
    json rows = json::array();
    double sup = 0.0;
    for (double rho = 4.0; rho <= std::min(10.0, o.radius) + 1e-9; rho += 1.0) {
        const double ratio = oheat::upper_bound_ratio(ball, rho, r0);
        sup = std::max(sup, ratio);
        rows.push_back({{"rho", rho}, {"ratio", ratio}, {"running_sup", sup}});
        csv += oheat::format_double(rho) + "," + oheat::format_double(ratio) + "\n";
    }
    json j = provenance("verify upper-bound", o);
    j["inj_lower"] = r0;
    j["rows"] = rows;
    j["sup"] = sup;
    j["pass"] = std::isfinite(sup);
    const std::string prefix = out_prefix(o, "upper_bound");
    oheat::write_text_file(prefix + ".csv", csv);
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << "sup " << sup << "\n";
    return std::isfinite(sup) ? 0 : 2;
}

int verify_sandwich(const Options& o) {
    const auto band = oheat::sandwich_constants(1.5, 20.0, 40, 40);
    const auto refined = oheat::sandwich_constants(1.5, 20.0, 160, 160);
    const double drift = std::max(std::abs(refined.lo - band.lo) / band.lo,
                                  std::abs(refined.hi - band.hi) / band.hi);
    const bool pass = band.lo > 0.0 && drift < 0.05;
    json j = provenance("verify sandwich", o);
    j["band"] = {band.lo, band.hi};
    j["band_refined"] = {refined.lo, refined.hi};
    j["refinement_drift"] = drift;
    j["pass"] = pass;
    oheat::write_text_file(out_prefix(o, "sandwich") + ".json", j.dump(2) + "\n");
    std::cout << "[" << band.lo << ", " << band.hi << "] "
              << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

int verify_chop(const Options& o) {
    const std::vector<double> alphas =
        o.alpha_values.empty() ? std::vector<double>{0.0, 0.5, 1.5} : o.alpha_values;
    const std::vector<double> ks =
        o.k_values.empty() ? std::vector<double>{2.0, 4.0} : o.k_values;
    json rows = json::array();
    bool pass = true;
    for (double alpha : alphas) {
        for (double k : ks) {
            for (double t : {10.0, 100.0, 1000.0, 10000.0}) {
                const double level = std::pow(t, -alpha);
                const auto I = oheat::chopped_integrals(
                    [&](double) { return level; }, t, k);
                const double scale = std::exp(-k * k / 4.0) * level;
                const double r1 = I.i1 / scale, r3 = I.i3 / scale;
                pass = pass && r1 <= 2.0 + 1e-9 && r3 <= 2.0 + 1e-9;
                rows.push_back({{"alpha", alpha},
                                {"k", k},
                                {"t", t},
                                {"i1_over_bound", r1},
                                {"i3_over_bound", r3}});
            }
        }
    }
    json j = provenance("verify chop", o);
    j["rows"] = rows;
    j["bound"] = 2.0;
    j["pass"] = pass;
    oheat::write_text_file(out_prefix(o, "chop") + ".json", j.dump(2) + "\n");
    std::cout << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

int verify_gaussian_tail(const Options& o) {
    const std::vector<double> ks =
        o.k_values.empty() ? std::vector<double>{0.5, 1.0, 2.0, 4.0, 8.0}
                           : o.k_values;
    json rows = json::array();
    bool pass = true;
    for (double k : ks) {
        const auto r = oheat::gaussian_tail_check(k);
        pass = pass && r.ok;
        rows.push_back({{"k", k},
                        {"integral", r.integral},
                        {"remainder", r.remainder},
                        {"bound", r.bound},
                        {"ok", r.ok}});
    }
    json j = provenance("verify gaussian-tail", o);
    j["rows"] = rows;
    j["pass"] = pass;
    oheat::write_text_file(out_prefix(o, "gaussian_tail") + ".json",
                           j.dump(2) + "\n");
    std::cout << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

int verify_log_limit(const Options& o) {
    const auto ball = make_ball(o);
    const double r0 = oheat::injectivity_lower_bound(ball);
    const auto grid = oheat::parse_time_grid(o.time_grid);
    std::string csv = "t,p_gamma,tail_bound\n";
    for (double t : grid) {
        const auto hv = oheat::quotient_kernel(ball, t, r0);
        csv += oheat::format_double(t) + "," + oheat::format_double(hv.value) +
               "," + oheat::format_double(hv.tail_bound) + "\n";
    }
    const auto fit = oheat::log_limit_estimate(ball, grid, r0);
    json j = provenance("verify log-limit", o);
    j["slope"] = fit_json(fit);
    j["pass"] = true;
    const std::string prefix = out_prefix(o, "log_limit");
    oheat::write_text_file(prefix + ".csv", csv);
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << "slope " << fit.slope << "\n";
    return 0;
}

oheat::WeightedGraph build_model(const std::string& model, const Options& o,
                                 int depth) {
    if (model == "star") return oheat::build_star(o.d, depth);
    if (model == "mixed") {
        const auto gf = o.gf_model == "tree" ? oheat::GfModel::binary_tree
                                             : oheat::GfModel::weighted_ray;
        return oheat::build_mixed(o.d, o.p, depth, gf);
    }
    throw std::invalid_argument("graph model must be star, mixed or absorbed");
}

int graph_decay(const std::string& model, const Options& o) {
    std::vector<double> series;
    if (model == "absorbed") {
        series = oheat::absorbed_ray_return(o.n_steps).at_start;
    } else {
        const int depth = std::max(
            o.depth, static_cast<int>(std::ceil(5.0 * std::sqrt(o.n_steps))) + 2);
        const auto G = build_model(model, o, depth);
        series = oheat::walk_kernel(G, 0, 0, o.n_steps).kernel;
    }
    const int n_lo = std::max(256, o.n_steps / 64);
    const auto fit = oheat::decay_fit(series, n_lo, o.n_steps);
    const std::string prefix = out_prefix(o, model + "_decay");
    oheat::write_text_file(prefix + ".csv", oheat::series_csv(series));
    json j = provenance("graph " + model + " decay", o);
    j["fit"] = json::parse(oheat::fit_to_json(fit));
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << "alpha " << fit.alpha << "\n";
    return 0;
}

int graph_poincare(const std::string& model, const Options& o) {
    const auto G = build_model(model, o, std::max(o.depth, 2 * o.r_max));
    json rows = json::array();
    bool pass = true;
    const double bound = 2.0 * std::pow(double(o.d), 3.0);
    for (int r = 2; r <= o.r_max; r *= 2) {
        const double sup = oheat::poincare_sup(G, 0, r);
        const double rnd = oheat::poincare_random_max(G, 0, r, 2000, o.seed);
        pass = pass && rnd <= sup && (model != "star" || sup <= bound);
        rows.push_back({{"r", r}, {"sup", sup}, {"random_max", rnd}});
    }
    json j = provenance("graph " + model + " poincare", o);
    j["rows"] = rows;
    if (model == "star") j["bound"] = bound;
    j["pass"] = pass;
    oheat::write_text_file(out_prefix(o, model + "_poincare") + ".json",
                           j.dump(2) + "\n");
    std::cout << (pass ? "pass" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

int graph_sobolev(const std::string& model, const Options& o) {
    const auto G = build_model(model, o, o.depth);
    const auto scales = oheat::sobolev_report(G, 2.0, 6.0, 0, 200, o.seed);
    std::string csv = "radius,bump_ratio,random_max\n";
    json rows = json::array();
    for (const auto& s : scales) {
        csv += std::to_string(s.radius) + "," +
               oheat::format_double(s.bump_ratio) + "," +
               oheat::format_double(s.random_max) + "\n";
        rows.push_back({{"radius", s.radius},
                        {"bump_ratio", s.bump_ratio},
                        {"random_max", s.random_max}});
    }
    json j = provenance("graph " + model + " sobolev", o);
    j["rows"] = rows;
    const std::string prefix = out_prefix(o, model + "_sobolev");
    oheat::write_text_file(prefix + ".csv", csv);
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << prefix << ".csv\n";
    return 0;
}

int graph_doubling(const std::string& model, const Options& o) {
    const auto G = build_model(model, o, std::max(o.depth, 2 * o.r_max + 2));
    std::string csv = "r,ratio\n";
    for (int r = 1; r <= o.r_max; ++r) {
        csv += std::to_string(r) + "," +
               oheat::format_double(G.mu_ball(0, 2 * r) / G.mu_ball(0, r)) + "\n";
    }
    json j = provenance("graph " + model + " doubling", o);
    j["max_ratio"] = oheat::doubling_constant(G, 0, o.r_max);
    const std::string prefix = out_prefix(o, model + "_doubling");
    oheat::write_text_file(prefix + ".csv", csv);
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << "max ratio " << j["max_ratio"] << "\n";
    return 0;
}

int graph_spectrum(const std::string& model, const Options& o) {
    json rows = json::array();
    std::vector<double> values;
    for (int L : {16, 32, 64}) {
        oheat::WeightedGraph comp;
        if (model == "star") {
            comp = oheat::build_unit_ray(L + 2);
        } else if (model == "mixed") {
            comp = o.gf_model == "tree"
                       ? oheat::build_mixed(1, 1, 2, oheat::GfModel::binary_tree,
                                            L + 2)
                       : oheat::build_gf_ray(L + 2);
        } else {
            throw std::invalid_argument("spectrum: model must be star or mixed");
        }
        const double lam = oheat::spectral_bottom(comp, L);
        values.push_back(lam);
        rows.push_back({{"L", L}, {"lambda0", lam}});
    }
    json j = provenance("graph " + model + " spectrum", o);
    j["rows"] = rows;
    j["stable"] = std::abs(values[2] - values[1]) <= 0.1 * values[1];
    oheat::write_text_file(out_prefix(o, model + "_spectrum") + ".json",
                           j.dump(2) + "\n");
    std::cout << "lambda0(64) " << values[2] << "\n";
    return 0;
}

int graph_volume(const std::string& model, const Options& o) {
    const auto G = build_model(model, o, std::max(o.depth, o.r_max + 1));
    std::string csv = "r,mu\n";
    bool cubic_ok = true;
    for (int r = 1; r <= o.r_max; ++r) {
        const double mu = G.mu_ball(0, r);
        csv += std::to_string(r) + "," + oheat::format_double(mu) + "\n";
        if (model == "mixed" && o.d == 1 && o.p == 0 && r >= 3) {
            cubic_ok = cubic_ok && mu >= 0.25 * std::pow(double(r), 3.0) &&
                       mu <= 3.0 * std::pow(double(r), 3.0);
        }
    }
    json j = provenance("graph " + model + " volume", o);
    if (model == "mixed" && o.d == 1 && o.p == 0) j["cubic_window_ok"] = cubic_ok;
    const std::string prefix = out_prefix(o, model + "_volume");
    oheat::write_text_file(prefix + ".csv", csv);
    oheat::write_text_file(prefix + ".json", j.dump(2) + "\n");
    std::cout << prefix << ".csv\n";
    return cubic_ok ? 0 : 2;
}

int cmd_graph(const std::string& model, const std::string& analysis,
              const Options& o) {
    if (analysis == "decay") return graph_decay(model, o);
    if (model == "absorbed") {
        throw std::invalid_argument("absorbed model supports only decay");
    }
    if (analysis == "poincare") return graph_poincare(model, o);
    if (analysis == "sobolev") return graph_sobolev(model, o);
    if (analysis == "doubling") return graph_doubling(model, o);
    if (analysis == "spectrum") return graph_spectrum(model, o);
    if (analysis == "volume") return graph_volume(model, o);
    throw std::invalid_argument("unknown graph analysis: " + analysis);
}

int cmd_discretise(const Options& o) {
    const auto G = oheat::GroupPresentation::resolve(o.group);
    oheat::EnumerationOptions eo;
    eo.keep_words = true;
    const auto ball = oheat::enumerate_ball(G, oheat::kBasepoint,
                                            oheat::kBasepoint, o.radius, eo);
    if (!ball.complete) {
        std::cerr << "discretise: ball incomplete\n";
        return 2;
    }
    std::vector<oheat::PointH3> cloud;
    cloud.reserve(ball.size());
    for (const auto& w : ball.words) {
        cloud.push_back(oheat::apply(oheat::evaluate_word(G, w), oheat::kBasepoint));
    }
    const auto net = oheat::discretise(cloud, o.eps);
    const auto fit = oheat::quasi_isometry_fit(net);
    json j = provenance("discretise", o);
    j["net_points"] = net.points.size();
    j["a"] = fit.a;
    j["b"] = fit.b;
    j["pairs"] = fit.pairs;
    j["components"] = fit.components;
    const std::string prefix = out_prefix(o, "net");
    oheat::write_text_file(prefix + "_graph.json", net.graph.to_json() + "\n");
    oheat::write_text_file(prefix + "_report.json", j.dump(2) + "\n");
    std::cout << "net " << net.points.size() << " points, a = " << fit.a << "\n";
    return 0;
}

void add_common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--group", o.group, "builtin name or group JSON file");
    cmd->add_option("--radius", o.radius, "enumeration radius");
    cmd->add_option("--time-grid", o.time_grid, "a:b:n linear grid");
    cmd->add_option("--eps", o.eps, "discretisation scale");
    cmd->add_option("--d", o.d, "number of rays");
    cmd->add_option("--p", o.p, "number of attached spectral-gap components");
    cmd->add_option("--depth", o.depth, "component depth");
    cmd->add_option("--n", o.n_steps, "walk steps");
    cmd->add_option("--r", o.r_max, "max radius for ball scans");
    cmd->add_option("--k", o.k_values, "annulus half-width(s)");
    cmd->add_option("--alpha", o.alpha_values, "model decay exponent(s)");
    cmd->add_option("--gf-model", o.gf_model, "ray or tree");
    cmd->add_option("--seed", o.seed, "seed for randomized sweeps");
    cmd->add_option("--out", o.out, "output path prefix");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbit counting and heat-kernel laboratory for H^3 quotients"};
    app.require_subcommand(1);
    Options o;

    auto* count = app.add_subcommand("count", "orbital counting function");
    add_common_flags(count, o);

    auto* verify = app.add_subcommand("verify", "kernel and counting checks");
    verify->require_subcommand(1);
    const std::vector<std::string> checks = {"stieltjes", "upper-bound",
                                             "sandwich",  "chop",
                                             "gaussian-tail", "log-limit"};
    for (const auto& name : checks) {
        add_common_flags(verify->add_subcommand(name), o);
    }

    auto* graph = app.add_subcommand("graph", "coarse model experiments");
    std::string model, analysis;
    graph->add_option("model", model, "star | mixed | absorbed")->required();
    graph->add_option("analysis", analysis,
                      "decay | poincare | sobolev | doubling | spectrum | volume")
        ->required();
    add_common_flags(graph, o);

    auto* disc = app.add_subcommand("discretise", "epsilon-net of an orbit");
    add_common_flags(disc, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (count->parsed()) return cmd_count(o);
        if (verify->parsed()) {
            const std::string name = verify->get_subcommands().front()->get_name();
            if (name == "stieltjes") return verify_stieltjes(o);
            if (name == "upper-bound") return verify_upper_bound(o);
            if (name == "sandwich") return verify_sandwich(o);
            if (name == "chop") return verify_chop(o);
            if (name == "gaussian-tail") return verify_gaussian_tail(o);
            if (name == "log-limit") return verify_log_limit(o);
        }
        if (graph->parsed()) return cmd_graph(model, analysis, o);
        if (disc->parsed()) return cmd_discretise(o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

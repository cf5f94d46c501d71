#include "orbitalheat/graph.hpp"
#include "orbitalheat/groups.hpp"
#include "orbitalheat/heat.hpp"
#include "orbitalheat/parallel.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace oheat;

namespace {

PointH3 as_point(const std::tuple<double, double, double>& t) {
    return PointH3{std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

OrbitBall ball_from(const std::string& group, double radius,
                    const std::tuple<double, double, double>& x,
                    const std::tuple<double, double, double>& y) {
    const auto G = GroupPresentation::resolve(group);
    return enumerate_ball(G, as_point(x), as_point(y), radius);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Orbit counting and heat kernels for Kleinian groups on H^3, "
              "with the weighted-graph walk models.";

    m.def("p3", &p3, py::arg("rho"), py::arg("t"),
          "Heat kernel of H^3 at distance rho, time t.");
    m.def("dp3_drho", &dp3_drho, py::arg("rho"), py::arg("t"));
    m.def("p5", &p5, py::arg("rho"), py::arg("t"));
    m.def("ball_volume", &ball_volume, py::arg("r"));
    m.def(
        "dist",
        [](const std::tuple<double, double, double>& p,
           const std::tuple<double, double, double>& q) {
            return dist(as_point(p), as_point(q));
        },
        py::arg("p"), py::arg("q"),
        "Hyperbolic distance between upper half-space points (x1, x2, h).");
    m.def("set_thread_cap", &set_thread_cap, py::arg("n"));

    py::class_<OrbitBall>(m, "OrbitBall")
        .def_readonly("distances", &OrbitBall::distances)
        .def_readonly("radius", &OrbitBall::radius)
        .def_readonly("complete", &OrbitBall::complete)
        .def_readonly("exhausted_group", &OrbitBall::exhausted_group)
        .def("count", &OrbitBall::count, py::arg("rho"))
        .def("__len__", [](const OrbitBall& b) { return b.size(); });

    m.def("enumerate_ball", &ball_from, py::arg("group"), py::arg("radius"),
          py::arg("x") = std::make_tuple(0.0, 0.0, 1.0),
          py::arg("y") = std::make_tuple(0.0, 0.0, 1.0),
          "Orbit ball of a builtin group name or group JSON file.");

    m.def(
        "quotient_kernel",
        [](const OrbitBall& b, double t, double inj_lower) {
            const auto hv = quotient_kernel(b, t, inj_lower);
            return py::make_tuple(hv.value, hv.tail_bound);
        },
        py::arg("ball"), py::arg("t"), py::arg("inj_lower"),
        "(value, tail_bound) of the quotient heat kernel sum.");
    m.def("injectivity_lower_bound", &injectivity_lower_bound, py::arg("ball"));
    m.def("stieltjes_residual", &stieltjes_residual, py::arg("ball"),
          py::arg("t"));
    m.def(
        "gaussian_tail_check",
        [](double k) {
            const auto r = gaussian_tail_check(k);
            return py::make_tuple(r.integral, r.bound, r.ok);
        },
        py::arg("k"));

    m.def(
        "star_return_series",
        [](int d, int n_max) {
            const int L = static_cast<int>(std::ceil(5.0 * std::sqrt(n_max))) + 2;
            return walk_kernel(build_star(d, L), 0, 0, n_max).kernel;
        },
        py::arg("d"), py::arg("n_max"),
        "Lazy-walk return kernel at the root of the d-ray star.");
    m.def(
        "mixed_return_series",
        [](int d, int p, int n_max, const std::string& gf_model) {
            const int L = static_cast<int>(std::ceil(5.0 * std::sqrt(n_max))) + 2;
            const auto gf = gf_model == "tree" ? GfModel::binary_tree
                                               : GfModel::weighted_ray;
            return walk_kernel(build_mixed(d, p, L, gf), 0, 0, n_max).kernel;
        },
        py::arg("d"), py::arg("p"), py::arg("n_max"),
        py::arg("gf_model") = "ray");
    m.def(
        "absorbed_return_series",
        [](int n_max) { return absorbed_ray_return(n_max).at_start; },
        py::arg("n_max"));
    m.def(
        "decay_fit",
        [](const std::vector<double>& series, int n_lo, int n_hi) {
            const auto f = decay_fit(series, n_lo, n_hi);
            return py::make_tuple(f.alpha, f.intercept, f.residual_rms);
        },
        py::arg("series"), py::arg("n_lo"), py::arg("n_hi"),
        "(alpha, intercept, rms) of the log-log dyadic fit.");
    m.def(
        "poincare_sup",
        [](int d, int r, int L) { return poincare_sup(build_star(d, L), 0, r); },
        py::arg("d"), py::arg("r"), py::arg("L"),
        "Sharp Poincare constant of the d-ray star at the root.");
    m.def(
        "spectral_bottom",
        [](const std::string& model, int L) {
            if (model == "unit_ray") return spectral_bottom(build_unit_ray(L + 2), L);
            if (model == "gf_ray") return spectral_bottom(build_gf_ray(L + 2), L);
            if (model == "tree") {
                return spectral_bottom(
                    build_mixed(1, 1, 2, GfModel::binary_tree, L + 2), L);
            }
            throw std::invalid_argument("model: unit_ray, gf_ray or tree");
        },
        py::arg("model"), py::arg("L"));
}

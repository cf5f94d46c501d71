#include "orbitalheat/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace oheat {

std::vector<double> parse_time_grid(const std::string& spec) {
    double a = 0.0, b = 0.0;
    int n = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1 ||
        !(b >= a)) {
        throw std::invalid_argument("time grid must be 'a:b:n' with b >= a, n >= 1");
    }
    std::vector<double> grid;
    grid.reserve(n);
    for (int i = 0; i < n; ++i) {
        grid.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
    }
    return grid;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fit_to_json(const DecayFit& fit) {
    nlohmann::json j;
    j["alpha"] = fit.alpha;
    j["intercept"] = fit.intercept;
    j["rms"] = fit.residual_rms;
    j["window"] = {fit.n_lo, fit.n_hi};
    return j.dump(2);
}

std::string series_csv(const std::vector<double>& series) {
    std::string out = "n,p_n\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_double(series[i]);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace oheat

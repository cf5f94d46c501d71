#pragma once

#include "orbitalheat/fit.hpp"
#include "orbitalheat/graph.hpp"

#include <string>
#include <vector>

namespace oheat {

inline constexpr const char* kVersion = "0.1.0";

/// "a:b:n" -> n points linearly spaced over [a, b].
std::vector<double> parse_time_grid(const std::string& spec);

std::string fit_to_json(const DecayFit& fit);

/// CSV text "n,p_n\n..." for a walk return series.
std::string series_csv(const std::vector<double>& series);

void write_text_file(const std::string& path, const std::string& text);

std::string format_double(double v);

} // namespace oheat

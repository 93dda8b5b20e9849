#pragma once

#include "blockmaps/series.hpp"
#include "blockmaps/upoly.hpp"

#include <nlohmann/json.hpp>

namespace blockmaps {

// On-disk form: {"order": N, "coeffs": ["p/q", ...]} with order+1 entries.
nlohmann::json series_to_json(const TruncSeries& s);
TruncSeries series_from_json(const nlohmann::json& j);

// Bivariate form stores each coefficient as a list of u-coefficients,
// lowest degree first: {"order": N, "coeffs": [["1"], ["0", "2"], ...]}.
nlohmann::json biseries_to_json(const BiSeries& s);
BiSeries biseries_from_json(const nlohmann::json& j);

} // namespace blockmaps

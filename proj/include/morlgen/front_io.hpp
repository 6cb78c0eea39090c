#pragma once

// Front persistence: CSV (header obj_0..obj_{k-1}, one point per row) and
// JSON (array of arrays). Readers reject ragged rows and non-finite values.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "morlgen/pareto.hpp"

namespace morlgen {

/// Shortest round-trip decimal form (17 significant digits at most).
std::string format_double(double v);

void write_front_csv(std::ostream& out, const ParetoFront& front);
/// Raw rows; they need not form an antichain.
std::vector<ValueVector> read_points_csv(std::istream& in);
/// Rows must already be mutually nondominated and distinct.
ParetoFront read_front_csv(std::istream& in);

nlohmann::json front_to_json(const ParetoFront& front);
ParetoFront front_from_json(const nlohmann::json& j);

void save_front_csv(const std::filesystem::path& path, const ParetoFront& front);
ParetoFront load_front_csv(const std::filesystem::path& path);

}  // namespace morlgen

#include "morlgen/front_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace morlgen {

namespace {

double parse_number(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("line " + std::to_string(line) + ": not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) {
    throw FormatError("line " + std::to_string(line) + ": non-finite value");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view row) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = row.find(',', start);
    cells.push_back(row.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                      : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_front_csv(std::ostream& out, const ParetoFront& front) {
  if (front.empty()) return;
  for (std::size_t i = 0; i < front.dim(); ++i) out << (i ? "," : "") << "obj_" << i;
  out << '\n';
  for (const auto& p : front) {
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << format_double(p[i]);
    out << '\n';
  }
}

std::vector<ValueVector> read_points_csv(std::istream& in) {
  std::vector<ValueVector> points;
  std::string row;
  std::size_t line = 0;
  std::size_t k = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    const auto cells = split_commas(row);
    if (k == 0) {
      // Header row fixes the column count.
      k = cells.size();
      for (std::size_t i = 0; i < k; ++i) {
        if (cells[i] != "obj_" + std::to_string(i)) {
          throw FormatError("line " + std::to_string(line) + ": expected header obj_0..obj_" +
                            std::to_string(k - 1));
        }
      }
      if (k < 2) throw FormatError("line 1: fronts need at least 2 objectives");
      continue;
    }
    if (cells.size() != k) {
      throw FormatError("line " + std::to_string(line) + ": ragged row (" +
                        std::to_string(cells.size()) + " columns, expected " + std::to_string(k) + ")");
    }
    std::vector<double> v;
    v.reserve(k);
    for (auto c : cells) v.push_back(parse_number(c, line));
    points.emplace_back(std::move(v));
  }
  return points;
}

ParetoFront read_front_csv(std::istream& in) {
  auto points = read_points_csv(in);
  try {
    return ParetoFront(std::move(points));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

nlohmann::json front_to_json(const ParetoFront& front) {
  auto arr = nlohmann::json::array();
  for (const auto& p : front) {
    arr.push_back(std::vector<double>(p.values().begin(), p.values().end()));
  }
  return arr;
}

ParetoFront front_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("front: expected an array of arrays");
  std::vector<ValueVector> points;
  std::size_t k = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    if (!row.is_array()) throw FormatError("front row " + std::to_string(r) + ": not an array");
    if (r == 0) k = row.size();
    if (row.size() != k) throw FormatError("front row " + std::to_string(r) + ": ragged row");
    std::vector<double> v;
    for (const auto& x : row) {
      if (!x.is_number()) throw FormatError("front row " + std::to_string(r) + ": non-numeric value");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw FormatError("front row " + std::to_string(r) + ": non-finite value");
      v.push_back(d);
    }
    try {
      points.emplace_back(std::move(v));
    } catch (const std::invalid_argument& e) {
      throw FormatError("front row " + std::to_string(r) + ": " + e.what());
    }
  }
  try {
    return ParetoFront(std::move(points));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

void save_front_csv(const std::filesystem::path& path, const ParetoFront& front) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_front_csv(out, front);
}

ParetoFront load_front_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  return read_front_csv(in);
}

}  // namespace morlgen

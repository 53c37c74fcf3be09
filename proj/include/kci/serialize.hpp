#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kci/equilibria.hpp"
#include "kci/errors.hpp"
#include "kci/pullback.hpp"
#include "kci/regions.hpp"
#include "kci/spatial.hpp"

namespace kci {

using json = nlohmann::json;

// Shortest round-trip decimal form. Used for every CSV number so that output
// bytes depend only on the values, never on locale or format state.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    require(row.size() == header.size(),
            "csv row has " + std::to_string(row.size()) + " cells, header has " +
                std::to_string(header.size()));
    rows.push_back(std::move(row));
  }

  std::string to_text() const {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i)
      out << (i ? "," : "") << csv_escape(header[i]);
    out << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
      out << "\n";
    }
    return out.str();
  }
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot open for writing: " + path);
  out << content;
  out.flush();
  require(static_cast<bool>(out), "write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline json profile_json(const Profile& u) {
  return json{{"n", u.grid.n}, {"length", u.grid.length}, {"values", u.values}};
}

inline json equilibrium_json(const EquilibriumRecord& rec) {
  json out{{"j", rec.j},
           {"sign", rec.sign},
           {"method", method_name(rec.method)},
           {"c_star", rec.c_star},
           {"h10", rec.h10},
           {"residual", rec.residual},
           {"multiple_roots", rec.multiple_roots},
           {"c_roots", rec.c_roots}};
  auto zf = zero_crossings(rec.profile);
  out["zeros"] = zf.identically_small ? json::array() : json(zf.zeros);
  return out;
}

inline json region_json(const RegionSpec& spec) {
  return json{{"j", spec.j},
              {"sign", spec.sign},
              {"lambda", spec.lambda},
              {"b1", spec.b1},
              {"b2", spec.b2},
              {"n", spec.lower.grid.n},
              {"length", spec.lower.grid.length},
              {"lower", spec.lower.values},
              {"upper", spec.upper.values}};
}

inline json trace_json(const TraceRecord& rec) {
  json samples = json::array();
  for (const auto& s : rec.samples) {
    samples.push_back(json{{"t", s.t},
                           {"gap", s.run.final_gap()},
                           {"converged", s.run.converged},
                           {"zeros", s.zeros},
                           {"zeros_ok", s.zeros_ok},
                           {"sandwich_ok", s.sandwich_ok},
                           {"floor_ok", s.floor_ok}});
  }
  json out{{"j", rec.j},
           {"sign", rec.sign},
           {"window_start", rec.window_start},
           {"window_end", rec.window_end},
           {"valid", rec.valid},
           {"failure_reason", rec.failure_reason},
           {"samples", samples}};
  out["first_failure_time"] =
      rec.first_failure_time ? json(*rec.first_failure_time) : json(nullptr);
  return out;
}

}  // namespace kci

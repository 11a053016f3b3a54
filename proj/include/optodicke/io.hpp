#pragma once

// CSV and manifest emission. Floating-point values are written in the
// shortest decimal form that round-trips to the same IEEE double, so emitted
// files are byte-deterministic and lossless.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "optodicke/dynamics.hpp"
#include "optodicke/semiclassical.hpp"

namespace optodicke {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open output file: " + path.string());
  return out;
}

}  // namespace detail

inline void write_time_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  auto out = detail::open_output(path);
  out << "t,value,label\n";
  for (std::size_t i = 0; i < series.times.size(); ++i)
    out << format_double(series.times[i]) << ',' << format_double(series.values[i]) << ','
        << series.label << '\n';
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = detail::open_output(path);
  out << "t,q1,p1,q2,p2,q3,p3,energy\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const ClassicalState& s = traj.states[i];
    out << format_double(traj.times[i]) << ',' << format_double(s.q1) << ',' << format_double(s.p1)
        << ',' << format_double(s.q2) << ',' << format_double(s.p2) << ',' << format_double(s.q3)
        << ',' << format_double(s.p3) << ',' << format_double(traj.energies[i]) << '\n';
  }
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

// Small string table for scan/report CSVs.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("Table: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline void write_table_csv(const std::filesystem::path& path, const Table& table) {
  auto out = detail::open_output(path);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << table.columns[c] << (c + 1 < table.columns.size() ? ',' : '\n');
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < row.size(); ++c) out << row[c] << (c + 1 < row.size() ? ',' : '\n');
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

// Flat key=value run record, emitted for every run, success or failure.
// Insertion order is preserved.
class Manifest {
public:
  void set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_)
      if (k == key) {
        v = std::move(value);
        return;
      }
    entries_.emplace_back(key, std::move(value));
  }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

  void add_artifact(const std::string& name) {
    set("artifact." + std::to_string(n_artifacts_++), name);
    set("artifact.count", n_artifacts_);
  }

  void write(const std::filesystem::path& path) const {
    auto out = detail::open_output(path);
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    if (!out) throw std::ios_base::failure("write failed: " + path.string());
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
  int n_artifacts_ = 0;
};

}  // namespace optodicke

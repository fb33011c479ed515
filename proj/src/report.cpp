#include "eip/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "eip/errors.hpp"

namespace eip {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : m_out(path), m_columns(columns.size()) {
  if (!m_out) throw ValidationError("csv: cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < columns.size(); ++i)
    m_out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != m_columns) throw ValidationError("csv: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i)
    m_out << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

void write_manifest(const std::string& path, const std::string& subcommand,
                    std::uint64_t config_hash, double wall_seconds,
                    const std::vector<std::string>& artifacts, bool all_passed) {
  nlohmann::json m;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  m["subcommand"] = subcommand;
  m["config_hash"] = hash;
  m["version"] = "0.1.0";
  m["wall_time_s"] = wall_seconds;
  m["artifacts"] = artifacts;
  m["all_passed"] = all_passed;
  std::ofstream out(path);
  if (!out) throw ValidationError("manifest: cannot open '" + path + "' for writing");
  out << m.dump(2) << "\n";
}

namespace {
int log_level() {
  static const int level = [] {
    const char* env = std::getenv("EIP_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
  }();
  return level;
}
} // namespace

bool log_enabled(int level) { return log_level() >= level; }

void log_line(int level, const std::string& msg) {
  if (log_enabled(level)) std::cerr << "[eip] " << msg << "\n";
}

} // namespace eip

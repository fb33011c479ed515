#ifndef EIP_REPORT_HPP
#define EIP_REPORT_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace eip {

// Deterministic CSV writer: doubles rendered with %.17g so repeated runs are
// byte-identical.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  static std::string num(double v);
  static std::string num(int v);

private:
  std::ofstream m_out;
  std::size_t m_columns;
};

// Run manifest: config hash, version, wall time and produced artifacts.
void write_manifest(const std::string& path, const std::string& subcommand,
                    std::uint64_t config_hash, double wall_seconds,
                    const std::vector<std::string>& artifacts, bool all_passed);

// EIP_LOG: off | info | debug (default off)
bool log_enabled(int level); // 1 = info, 2 = debug
void log_line(int level, const std::string& msg);

} // namespace eip

#endif

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shiftdyn/operator_core.hpp"

namespace shiftdyn {

/// Evidence table emitted as CSV with a header row.
struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const ReportTable&) const = default;
};

/// 17 significant digits; round-trips doubles exactly.
std::string format_double(double v);

/// Deterministic run report: an ordered key/value summary plus evidence
/// tables. Identical configs produce byte-identical renderings.
class RunReport {
 public:
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, const char* value);
  void put(const std::string& key, double value);
  void put(const std::string& key, index_t value);
  void put(const std::string& key, int value);
  void put(const std::string& key, std::size_t value);
  void put(const std::string& key, bool value);
  void add_table(ReportTable table);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::vector<ReportTable>& tables() const { return tables_; }

  /// Key/value summary document.
  std::string to_kv() const;
  /// Evidence tables document (CSV blocks with table markers).
  std::string to_csv() const;
  std::string render(const std::string& format) const;

  /// Re-parse either document format (detected from the header line).
  static RunReport parse(const std::string& text);

  bool operator==(const RunReport&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<ReportTable> tables_;
};

}  // namespace shiftdyn

#include "shiftdyn/report.hpp"

#include <cstdio>
#include <sstream>

#include "shiftdyn/errors.hpp"

namespace shiftdyn {

namespace {
constexpr const char* kKvHeader = "# shiftdyn kv v1";
constexpr const char* kCsvHeader = "# shiftdyn csv v1";
}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RunReport::put(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void RunReport::put(const std::string& key, const char* value) {
  entries_.emplace_back(key, std::string(value));
}

void RunReport::put(const std::string& key, double value) { put(key, format_double(value)); }

void RunReport::put(const std::string& key, index_t value) { put(key, std::to_string(value)); }

void RunReport::put(const std::string& key, int value) { put(key, std::to_string(value)); }

void RunReport::put(const std::string& key, std::size_t value) {
  put(key, std::to_string(value));
}

void RunReport::put(const std::string& key, bool value) {
  put(key, value ? std::string("true") : std::string("false"));
}

void RunReport::add_table(ReportTable table) { tables_.push_back(std::move(table)); }

std::string RunReport::to_kv() const {
  std::ostringstream os;
  os << kKvHeader << "\n";
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  return os.str();
}

std::string RunReport::to_csv() const {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& t : tables_) {
    os << "[table " << t.name << "]\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      os << (c ? "," : "") << t.columns[c];
    }
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

std::string RunReport::render(const std::string& format) const {
  if (format == "kv") return to_kv();
  if (format == "csv") return to_csv();
  throw InvalidParameter("unknown report format '" + format + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

RunReport RunReport::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("empty report document");
  RunReport report;
  if (line == kKvHeader) {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::size_t sep = line.find(" = ");
      if (sep == std::string::npos) {
        throw InvalidParameter("malformed kv report line: " + line);
      }
      report.entries_.emplace_back(line.substr(0, sep), line.substr(sep + 3));
    }
    return report;
  }
  if (line == kCsvHeader) {
    ReportTable table;
    bool in_table = false;
    bool header_pending = false;
    auto flush = [&] {
      if (in_table) report.tables_.push_back(std::move(table));
      table = ReportTable{};
      in_table = false;
      header_pending = false;
    };
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.rfind("[table ", 0) == 0 && line.back() == ']') {
        flush();
        table.name = line.substr(7, line.size() - 8);
        in_table = true;
        header_pending = true;
        continue;
      }
      if (!in_table) throw InvalidParameter("csv report row outside any table: " + line);
      if (header_pending) {
        table.columns = split_csv(line);
        header_pending = false;
      } else {
        table.rows.push_back(split_csv(line));
      }
    }
    flush();
    return report;
  }
  throw InvalidParameter("unknown report header: " + line);
}

}  // namespace shiftdyn

#include "hfrac/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "hfrac/errors.hpp"

namespace hfrac {

std::string format_real(double v) {
  if (v == 0.0) return "0";  // also folds -0
  return fmt::format("{:.17g}", v);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::Row::sep() {
  if (!first_) line_->push_back(',');
  first_ = false;
}

CsvTable::Row& CsvTable::Row::add(double v) {
  sep();
  line_->append(format_real(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::add(long v) {
  sep();
  line_->append(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::add(const std::string& v) {
  sep();
  line_->append(v);
  return *this;
}

CsvTable::Row CsvTable::row() {
  lines_.emplace_back();
  return Row(&lines_.back());
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) {
    if (k) out.push_back(',');
    out += header_[k];
  }
  out.push_back('\n');
  for (const auto& l : lines_) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw ConfigError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::size_t CsvData::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw ConfigError("CSV has no column '" + name + "'");
}

namespace {

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open CSV file " + path.string());
  CsvData d;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_line(line);
    if (!have_header) {
      d.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != d.header.size()) {
        throw ConfigError(path.string() + ": row has " + std::to_string(cells.size()) +
                          " cells, header has " + std::to_string(d.header.size()));
      }
      d.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw ConfigError(path.string() + ": missing header row");
  return d;
}

double parse_real(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(context + ": '" + s + "' is not a number");
  }
  return v;
}

long parse_integer(const std::string& s, const std::string& context) {
  long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(context + ": '" + s + "' is not an integer");
  }
  return v;
}

}  // namespace hfrac

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hfrac {

/// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_real(double v);

/// In-memory CSV table with '\n' line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  class Row {
   public:
    Row& add(double v);
    Row& add(long v);
    Row& add(int v) { return add(static_cast<long>(v)); }
    Row& add(const std::string& v);
    Row& add(const char* v) { return add(std::string(v)); }

   private:
    friend class CsvTable;
    explicit Row(std::string* line) : line_(line) {}
    void sep();
    std::string* line_;
    bool first_ = true;
  };

  Row row();
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> lines_;
};

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a comma-separated file with a header row. Throws ConfigError.
CsvData read_csv(const std::filesystem::path& path);

double parse_real(const std::string& s, const std::string& context);
long parse_integer(const std::string& s, const std::string& context);

}  // namespace hfrac

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace afcsim::cli {

/// Locale-independent decimal with 9 significant digits; "nan" for NaN.
std::string format_number(double v);

/// Plot-ready table with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::string body_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace afcsim::cli

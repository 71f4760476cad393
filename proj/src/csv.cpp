#include "swingpide/csv.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace swingpide {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell_text(const CsvCell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::to_string(std::get<long long>(c));
}

}  // namespace

void write_csv(std::ostream& os, std::uint64_t hash, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows) {
  std::ostringstream h;
  h << std::hex << std::setw(16) << std::setfill('0') << hash;
  os << "# config_hash=" << h.str() << '\n';
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("CSV row width does not match the header");
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, std::uint64_t hash, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(f, hash, header, rows);
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace swingpide

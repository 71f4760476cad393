#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace swingpide {

using CsvCell = std::variant<std::string, double, long long>;
using CsvRow = std::vector<CsvCell>;

/// Round-trip formatting with 17 significant digits.
std::string format_number(double v);

/// Writes "# config_hash=<16 hex digits>", the header row and the rows.
void write_csv(std::ostream& os, std::uint64_t config_hash, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows);

void write_csv(const std::filesystem::path& path, std::uint64_t config_hash, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows);

}  // namespace swingpide

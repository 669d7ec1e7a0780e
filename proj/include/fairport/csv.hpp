#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairport {

/// A parsed CSV file: header plus rows of raw string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row, for error messages.
    std::vector<std::size_t> lines;

    std::optional<std::size_t> column(std::string_view name) const;
};

/// RFC 4180 style: comma separated, optional double-quoted cells with "" escapes.
/// Every row must have as many cells as the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view cell);
void append_csv_row(std::string& out, const std::vector<std::string>& cells);

/// Shortest decimal that reads back to the same double (at most 17 digits).
std::string format_real(double x);

/// Strict double parse of the whole cell; nullopt on any trailing junk.
std::optional<double> parse_real(std::string_view cell);

/// Writes to a sibling temporary file and renames it over `path`, so a failed
/// run never leaves a partial file behind.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace fairport

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "famoel/common.hpp"

namespace famoel::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180 style: quoted fields may contain commas, doubled quotes and newlines.
// Throws MalformedCsv on unterminated quotes or ragged rows.
Table parse(std::string_view text, bool has_header = true);
Table read_file(const std::filesystem::path& path, bool has_header = true);

// Numeric matrix from a CSV; a header row is skipped if its first cell does not parse as a number.
Matrix read_matrix(const std::filesystem::path& path);

std::string escape(std::string_view field);

// Shortest representation that round-trips through strtod.
std::string format_double(double value);

void write_row(std::ostream& out, std::span<const std::string> fields);
void write_row(std::ostream& out, std::span<const double> values);

double parse_double(std::string_view field);

}  // namespace famoel::csv

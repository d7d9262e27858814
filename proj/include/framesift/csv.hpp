#pragma once

#include "framesift/core.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace framesift::csv {

/// Plain comma-separated table. Fields never contain commas or quotes in
/// the formats this project reads and writes.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position, or throws naming the file's missing column.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

/// Reads a file whose first non-empty line is the header.
Table read(const std::filesystem::path& path);

/// Reads rows without a header. When `header_prefix` is non-empty and the
/// first row's first field equals it, that row is skipped.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                std::string_view header_prefix = {});

double to_double(std::string_view s);
std::int64_t to_int(std::string_view s);

/// Shortest text that reads back to the same double; used by every numeric
/// CSV column.
std::string num(double v);

}  // namespace framesift::csv

#include "framesift/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>

namespace framesift::csv {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string_view::npos)
        return {};
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                std::string_view header_prefix)
{
    std::ifstream in(path);
    if (!in)
        throw Error(fmt::format("cannot open '{}'", path.string()));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto fields = split(line);
        if (first && !header_prefix.empty() && fields.front() == header_prefix) {
            first = false;
            continue;
        }
        first = false;
        rows.push_back(std::move(fields));
    }
    return rows;
}

Table read(const std::filesystem::path& path)
{
    auto rows = read_rows(path);
    if (rows.empty())
        throw Error(fmt::format("'{}' is empty", path.string()));
    Table t;
    t.header = std::move(rows.front());
    t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].size() != t.header.size())
            throw Error(fmt::format("'{}' row {} has {} fields, expected {}", path.string(), i + 2,
                                    t.rows[i].size(), t.header.size()));
    return t;
}

bool Table::has_column(std::string_view name) const
{
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t Table::column(std::string_view name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error(fmt::format("missing CSV column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
}

double to_double(std::string_view s)
{
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(fmt::format("not a number: '{}'", s));
    return v;
}

std::int64_t to_int(std::string_view s)
{
    s = trim(s);
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(fmt::format("not an integer: '{}'", s));
    return v;
}

std::string num(double v)
{
    return fmt::format("{}", v);
}

}  // namespace framesift::csv

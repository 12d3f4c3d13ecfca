#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace firth::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
    const std::string where = "line " + std::to_string(line) + ", column " + std::to_string(column);
    if (field.empty()) throw ParseError(where + ": missing value");
    if (field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    // from_chars also accepts "nan" and "inf", which are not decimal numbers.
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(where + ": '" + std::string(field) + "' is not a decimal number");
    }
    return value;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t width = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (!have_header) {
            if (fields.size() < 3 || fields[0] != "y" || fields[1] != "m") {
                throw ParseError("line " + std::to_string(line_no) + ": header must be y,m,x1,...,xp");
            }
            for (std::size_t j = 2; j < fields.size(); ++j) {
                if (fields[j].empty()) throw ParseError("line " + std::to_string(line_no) + ": empty column name");
                table.covariate_names.emplace_back(fields[j]);
            }
            width = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != width) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                             " fields, found " + std::to_string(fields.size()));
        }
        RawRecord rec;
        rec.y = parse_number(fields[0], line_no, 1);
        rec.m = parse_number(fields[1], line_no, 2);
        for (std::size_t j = 2; j < fields.size(); ++j) rec.x.push_back(parse_number(fields[j], line_no, j + 1));
        table.rows.push_back(std::move(rec));
    }
    if (!have_header) throw ParseError("input is empty");
    return table;
}

}  // namespace firth::cli

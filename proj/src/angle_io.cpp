#include "gvmbayes/angle_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gvmbayes/errors.hpp"

namespace gvm {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

bool parse_number(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

Sample parse_angles(const std::string& text, const AngleFileSpec& spec) {
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> line_numbers;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    const std::string_view all(text);
    while (pos <= all.size()) {
        auto end = all.find('\n', pos);
        if (end == std::string_view::npos) end = all.size();
        ++line_no;
        const auto line = trim(all.substr(pos, end - pos));
        if (!line.empty()) {
            rows.push_back(split_row(line));
            line_numbers.push_back(line_no);
        }
        pos = end + 1;
    }
    if (rows.empty()) throw ParseError("angle file is empty");

    std::size_t column = 0;
    bool header = false;
    if (const auto* name = std::get_if<std::string>(&spec.column)) {
        header = true;
        if (spec.header.has_value() && !*spec.header) throw ParseError("a named column needs a header row");
        const auto& first = rows.front();
        std::size_t i = 0;
        while (i < first.size() && first[i] != *name) ++i;
        if (i == first.size()) throw ParseError("no column named '" + *name + "'");
        column = i;
    } else {
        column = std::get<std::size_t>(spec.column);
        if (spec.header.has_value()) {
            header = *spec.header;
        } else {
            double dummy;
            header = column < rows.front().size() && !parse_number(rows.front()[column], dummy);
        }
    }

    const double scale = spec.unit == AngleUnit::degrees ? kPi / 180.0 : 1.0;
    std::vector<double> angles;
    for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
        const auto where = "line " + std::to_string(line_numbers[r]);
        if (column >= rows[r].size()) throw ParseError(where + ": missing angle column");
        double v = 0.0;
        if (!parse_number(rows[r][column], v)) throw ParseError(where + ": not a number");
        if (!std::isfinite(v)) throw ParseError(where + ": non-finite angle");
        angles.push_back(v * scale);
    }
    if (angles.empty()) throw ParseError("angle file has no data rows");
    return Sample(std::move(angles));
}

Sample read_angles(const AngleFileSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + spec.path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + spec.path + "'");
    return parse_angles(buf.str(), spec);
}

}  // namespace gvm

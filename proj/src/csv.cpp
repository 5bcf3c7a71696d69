#include "famoel/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace famoel::csv {

namespace {

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

}  // namespace

Table parse(std::string_view text, bool has_header) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool line_has_content = false;

    auto end_field = [&] {
        record.push_back(field_was_quoted ? field : trim_cr(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        if (line_has_content) {
            records.push_back(std::move(record));
        }
        record.clear();
        line_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty()) {
                throw Error(ErrorCode::MalformedCsv, "quote inside unquoted field");
            }
            in_quotes = true;
            field_was_quoted = true;
            line_has_content = true;
            break;
        case ',':
            end_field();
            line_has_content = true;
            break;
        case '\n':
            end_record();
            break;
        default:
            if (c != '\r') {
                line_has_content = true;
            }
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::MalformedCsv, "unterminated quoted field");
    }
    if (line_has_content || !field.empty()) {
        end_record();
    }

    Table table;
    std::size_t first = 0;
    if (has_header) {
        if (records.empty()) {
            throw Error(ErrorCode::MalformedCsv, "missing header row");
        }
        table.header = std::move(records.front());
        first = 1;
    }
    const std::size_t width = has_header ? table.header.size() : (records.empty() ? 0 : records.front().size());
    for (std::size_t r = first; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw Error(ErrorCode::MalformedCsv, "row " + std::to_string(r + 1) + " has " +
                                                     std::to_string(records[r].size()) + " fields, expected " +
                                                     std::to_string(width));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

Table read_file(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), has_header);
}

double parse_double(std::string_view field) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || field.empty()) {
        if (field == "inf" || field == "Inf") {
            return INFINITY;
        }
        throw Error(ErrorCode::MalformedCsv, "not a number: '" + std::string(field) + "'");
    }
    return value;
}

Matrix read_matrix(const std::filesystem::path& path) {
    Table t = read_file(path, false);
    Matrix m;
    std::size_t start = 0;
    if (!t.rows.empty() && !t.rows.front().empty()) {
        try {
            (void)parse_double(t.rows.front().front());
        } catch (const Error&) {
            start = 1;
        }
    }
    for (std::size_t r = start; r < t.rows.size(); ++r) {
        std::vector<double> values;
        values.reserve(t.rows[r].size());
        for (const auto& cell : t.rows[r]) {
            values.push_back(parse_double(cell));
        }
        m.append_row(values);
    }
    return m;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string format_double(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

void write_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_double(values[i]);
    }
    out << '\n';
}

}  // namespace famoel::csv

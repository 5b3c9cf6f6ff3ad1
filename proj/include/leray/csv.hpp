#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "leray/errors.hpp"

namespace leray {

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    double value = 0.0;
    auto res = std::from_chars(b, e, value);
    if (res.ec != std::errc())
        throw FormatError("cannot parse " + what + " from '" + s + "'");
    return value;
}

inline long parse_long(const std::string& s, const std::string& what) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    long value = 0;
    auto res = std::from_chars(b, e, value);
    if (res.ec != std::errc())
        throw FormatError("cannot parse " + what + " from '" + s + "'");
    return value;
}

/// Minimal comma-separated table. No quoting; fields must not contain commas.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column, or -1.
    int column(const std::string& name) const {
        for (size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return static_cast<int>(c);
        return -1;
    }
};

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline CsvTable csv_parse(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("CSV input is empty (missing header row)");
    table.header = csv_split(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = csv_split(line);
        if (fields.size() != table.header.size())
            throw FormatError("CSV row has " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

inline CsvTable csv_parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open CSV file '" + path + "'");
    return csv_parse(in);
}

inline std::string csv_join(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += fields[i];
    }
    line.push_back('\n');
    return line;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("failed while writing '" + path + "'");
}

} // namespace leray

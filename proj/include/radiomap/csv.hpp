#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "radiomap/errors.hpp"

namespace radiomap::detail {

inline std::vector<std::string> split_csv_line(const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(s);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!s.empty() && s.back() == ',') fields.push_back("");
    return fields;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline double parse_csv_number(const std::string& cell, const char* column, std::size_t line_no) {
    const std::string t = trim(cell);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v))
        throw ParseError("non-numeric " + std::string(column) + " \"" + t + "\" (line " +
                         std::to_string(line_no) + ")", 0);
    return v;
}

} // namespace radiomap::detail

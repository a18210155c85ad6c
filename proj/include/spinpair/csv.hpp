#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spinpair/errors.hpp"
#include "spinpair/trajectory.hpp"

namespace spinpair::io {

/// Strict CSV dialect: comma separated, '.' decimal separator, UTF-8, header
/// row required. Parse failures name the offending line and column.
namespace csv {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    out.push_back(field);
    return out;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& raw, const std::string& file, std::size_t line,
                           std::size_t column) {
    const std::string s = trim(raw);
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw input_error(file + ":" + std::to_string(line) + ": column " + std::to_string(column) +
                          ": cannot parse '" + raw + "' as a number");
    return value;
}

}  // namespace csv

/// Reads a population trajectory. `value_names` are the three required series
/// columns after time_s; `error_names`, when all present, fill the standard
/// errors. Extra columns are rejected.
inline PopulationTrajectory read_trajectory(const std::string& path,
                                            const std::array<std::string, 3>& value_names,
                                            const std::array<std::string, 3>& error_names) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw input_error(path + ":1: missing header row");

    const auto header = csv::split_line(line);
    std::vector<std::string> expect = {"time_s", value_names[0], value_names[1], value_names[2]};
    bool with_errors = false;
    if (header.size() == 7) {
        with_errors = true;
        expect.insert(expect.end(), {error_names[0], error_names[1], error_names[2]});
    }
    if (header.size() != expect.size())
        throw input_error(path + ":1: expected " + std::to_string(expect.size()) +
                          " columns, found " + std::to_string(header.size()));
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (csv::trim(header[i]) != expect[i])
            throw input_error(path + ":1: column " + std::to_string(i + 1) + ": expected '" +
                              expect[i] + "', found '" + csv::trim(header[i]) + "'");

    PopulationTrajectory traj;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != expect.size())
            throw input_error(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(expect.size()) + " columns, found " +
                              std::to_string(fields.size()));
        traj.time_s.push_back(csv::parse_double(fields[0], path, line_no, 1));
        std::array<double, 3> p{};
        for (int b = 0; b < 3; ++b)
            p[std::size_t(b)] = csv::parse_double(fields[std::size_t(b) + 1], path, line_no,
                                                  std::size_t(b) + 2);
        traj.p.push_back(p);
        if (with_errors) {
            std::array<double, 3> se{};
            for (int b = 0; b < 3; ++b)
                se[std::size_t(b)] = csv::parse_double(fields[std::size_t(b) + 4], path, line_no,
                                                       std::size_t(b) + 5);
            traj.se.push_back(se);
        }
    }
    if (traj.size() == 0) throw input_error(path + ": no data rows");
    for (std::size_t i = 0; i + 1 < traj.size(); ++i)
        if (traj.time_s[i + 1] < traj.time_s[i])
            throw input_error(path + ":" + std::to_string(i + 3) + ": time column must be sorted");
    return traj;
}

/// time_s, p00, p1m1, p2m2 [, se00, se1m1, se2m2]
inline PopulationTrajectory read_spin_populations(const std::string& path) {
    return read_trajectory(path, {"p00", "p1m1", "p2m2"}, {"se00", "se1m1", "se2m2"});
}

/// time_s, p0, p1, p2 — ejection-outcome tables
inline PopulationTrajectory read_ejection_outcomes(const std::string& path) {
    return read_trajectory(path, {"p0", "p1", "p2"}, {"se0", "se1", "se2"});
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Deterministic CSV writer: fixed %.12g formatting, '\n' line endings.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_number(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    if (!out) throw input_error("write failed for '" + path + "'");
}

}  // namespace spinpair::io

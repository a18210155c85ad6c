#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spinpair/csv.hpp"
#include "spinpair/errors.hpp"

namespace spinpair::io {

/// Resolved run configuration. Defaults encode the trap of the frozen-fraction
/// reference point (8.9 / 55.5 / 1.01*55.5 kHz) at a desk-scale temperature;
/// every field can come from a key=value config file or a CLI override.
struct RunConfig {
    // trap and ensemble
    std::array<double, 3> trap_khz{8.9, 55.5, 56.055};
    double temperature_uk = 2.0;
    double b_field_g = 0.0;
    std::vector<double> b_scan_g{0.0, 0.2, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    // interaction
    std::array<double, 3> lengths_au{-740.0, -570.0, -390.0};
    std::array<double, 3> lengths_err_au{60.0, 50.0, 20.0};
    std::string backend = "gaussian";  // gaussian | delta
    // basis cutoff policy: explicit cutoff (in hbar*wbar) wins when positive,
    // otherwise smallest cutoff reaching `capture`
    double capture = 0.999;
    double e_cut_hw = 0.0;
    // time grids
    double time_max_ms = 80.0;
    int time_points = 161;
    double probe_time_ms = 40.0;    // field scan
    double density_time_ms = 40.0;  // density-matrix snapshot
    std::string initial = "thermal";  // thermal | groundstate
    // rate model
    double rate_ratio = 2.34;
    bool normalize_to_t0 = false;
    // detection model
    double eta_f2 = 0.944;
    double eta_f3 = 0.997;
    double detection_true_p0 = 0.39;
    // execution
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int max_modes = 1500;
    double memory_budget_gb = 4.0;
    bool force = false;

    void validate() const {
        if (backend != "gaussian" && backend != "delta")
            throw input_error("config: backend must be 'gaussian' or 'delta'");
        if (initial != "thermal" && initial != "groundstate")
            throw input_error("config: initial must be 'thermal' or 'groundstate'");
        if (!(temperature_uk > 0.0)) throw input_error("config: temperature_uk must be positive");
        if (!(capture > 0.0) || capture >= 1.0)
            throw input_error("config: capture must lie in (0, 1)");
        if (time_points < 2) throw input_error("config: time_points must be at least 2");
        if (time_max_ms <= 0.0) throw input_error("config: time_max_ms must be positive");
        if (max_modes < 1) throw input_error("config: max_modes must be positive");
    }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = csv::trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw input_error("config: cannot parse '" + item + "' in " + key);
        }
    }
    return out;
}

inline double parse_scalar(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (csv::trim(value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw input_error("config: cannot parse '" + value + "' for " + key);
}

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw input_error("config: cannot parse '" + value + "' as bool for " + key);
}

}  // namespace detail

/// Applies one key=value assignment; unknown keys are errors so typos fail
/// loudly.
inline void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_list;
    using detail::parse_scalar;
    if (key == "trap_khz") {
        const auto v = parse_list(value, key);
        if (v.size() != 3) throw input_error("config: trap_khz needs three values");
        cfg.trap_khz = {v[0], v[1], v[2]};
    } else if (key == "temperature_uk") {
        cfg.temperature_uk = parse_scalar(value, key);
    } else if (key == "b_field_g") {
        cfg.b_field_g = parse_scalar(value, key);
    } else if (key == "b_scan_g") {
        cfg.b_scan_g = parse_list(value, key);
    } else if (key == "lengths_au") {
        const auto v = parse_list(value, key);
        if (v.size() != 3) throw input_error("config: lengths_au needs three values");
        cfg.lengths_au = {v[0], v[1], v[2]};
    } else if (key == "lengths_err_au") {
        const auto v = parse_list(value, key);
        if (v.size() != 3) throw input_error("config: lengths_err_au needs three values");
        cfg.lengths_err_au = {v[0], v[1], v[2]};
    } else if (key == "backend") {
        cfg.backend = value;
    } else if (key == "capture") {
        cfg.capture = parse_scalar(value, key);
    } else if (key == "e_cut_hw") {
        cfg.e_cut_hw = parse_scalar(value, key);
    } else if (key == "time_max_ms") {
        cfg.time_max_ms = parse_scalar(value, key);
    } else if (key == "time_points") {
        cfg.time_points = int(parse_scalar(value, key));
    } else if (key == "probe_time_ms") {
        cfg.probe_time_ms = parse_scalar(value, key);
    } else if (key == "density_time_ms") {
        cfg.density_time_ms = parse_scalar(value, key);
    } else if (key == "initial") {
        cfg.initial = value;
    } else if (key == "rate_ratio") {
        cfg.rate_ratio = parse_scalar(value, key);
    } else if (key == "normalize_to_t0") {
        cfg.normalize_to_t0 = parse_bool(value, key);
    } else if (key == "eta_f2") {
        cfg.eta_f2 = parse_scalar(value, key);
    } else if (key == "eta_f3") {
        cfg.eta_f3 = parse_scalar(value, key);
    } else if (key == "detection_true_p0") {
        cfg.detection_true_p0 = parse_scalar(value, key);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "seed") {
        cfg.seed = std::uint64_t(parse_scalar(value, key));
    } else if (key == "max_modes") {
        cfg.max_modes = int(parse_scalar(value, key));
    } else if (key == "memory_budget_gb") {
        cfg.memory_budget_gb = parse_scalar(value, key);
    } else if (key == "force") {
        cfg.force = parse_bool(value, key);
    } else {
        throw input_error("config: unknown key '" + key + "'");
    }
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = csv::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = csv::trim(line.substr(0, eq));
        const std::string value = csv::trim(line.substr(eq + 1));
        try {
            apply_config_key(cfg, key, value);
        } catch (const input_error& err) {
            throw input_error(path + ":" + std::to_string(line_no) + ": " + err.what());
        }
    }
    return cfg;
}

namespace detail {

inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join17(const double* v, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? "," : "") + num17(v[i]);
    return s;
}

}  // namespace detail

/// Canonical serialization; loading the result reproduces the run settings
/// exactly (round-trip via %.17g). Execution details that do not affect the
/// outputs (out_dir, like the worker count) are deliberately left out, so the
/// file is byte-identical across reruns.
inline std::string resolved_config(const RunConfig& c) {
    using detail::join17;
    using detail::num17;
    std::ostringstream out;
    out << "trap_khz = " << join17(c.trap_khz.data(), 3) << "\n"
        << "temperature_uk = " << num17(c.temperature_uk) << "\n"
        << "b_field_g = " << num17(c.b_field_g) << "\n"
        << "b_scan_g = " << join17(c.b_scan_g.data(), c.b_scan_g.size()) << "\n"
        << "lengths_au = " << join17(c.lengths_au.data(), 3) << "\n"
        << "lengths_err_au = " << join17(c.lengths_err_au.data(), 3) << "\n"
        << "backend = " << c.backend << "\n"
        << "capture = " << num17(c.capture) << "\n"
        << "e_cut_hw = " << num17(c.e_cut_hw) << "\n"
        << "time_max_ms = " << num17(c.time_max_ms) << "\n"
        << "time_points = " << c.time_points << "\n"
        << "probe_time_ms = " << num17(c.probe_time_ms) << "\n"
        << "density_time_ms = " << num17(c.density_time_ms) << "\n"
        << "initial = " << c.initial << "\n"
        << "rate_ratio = " << num17(c.rate_ratio) << "\n"
        << "normalize_to_t0 = " << (c.normalize_to_t0 ? "true" : "false") << "\n"
        << "eta_f2 = " << num17(c.eta_f2) << "\n"
        << "eta_f3 = " << num17(c.eta_f3) << "\n"
        << "detection_true_p0 = " << num17(c.detection_true_p0) << "\n"
        << "seed = " << c.seed << "\n"
        << "max_modes = " << c.max_modes << "\n"
        << "memory_budget_gb = " << num17(c.memory_budget_gb) << "\n"
        << "force = " << (c.force ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace spinpair::io

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinpair/config.hpp"
#include "spinpair/errors.hpp"

namespace spinpair::io {

inline constexpr const char* library_version = "0.1.0";

/// FNV-1a 64-bit digest, hex. Provenance fingerprint for input files, not a
/// cryptographic hash.
inline std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "' for digest");
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= std::uint64_t(static_cast<unsigned char>(buf[i]));
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

/// Written for every run; together with resolved.cfg it pins everything
/// needed to reproduce the output files bit-for-bit.
struct RunManifest {
    std::string command;
    RunConfig config;
    std::size_t basis_size = 0;
    double e_cut_hw = 0.0;
    double captured_weight = 0.0;
    unsigned workers = 1;
    double wall_ms = 0.0;
    std::map<std::string, std::string> input_digests;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["library_version"] = library_version;
        j["resolved_config"] = resolved_config(config);
        j["basis"] = {{"size", basis_size},
                      {"e_cut_hw", e_cut_hw},
                      {"captured_weight", captured_weight}};
        j["workers"] = workers;
        j["wall_ms"] = wall_ms;
        j["input_digests"] = input_digests;
        j["outputs"] = outputs;
        j["warnings"] = warnings;
        return j;
    }
};

inline void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write '" + path + "'");
    out << m.to_json().dump(2) << "\n";
}

}  // namespace spinpair::io

#pragma once

#include <array>
#include <vector>

namespace spinpair {

/// Time series of the three two-atom spin-mode populations P_{|0,0>},
/// P_{S|1,-1>}, P_{S|2,-2>}. Produced by the simulation and the rate model,
/// and ingested from experiment CSVs (optionally with standard errors).
struct PopulationTrajectory {
    std::vector<double> time_s;
    std::vector<std::array<double, 3>> p;
    std::vector<std::array<double, 3>> se;  // empty when absent

    std::size_t size() const { return time_s.size(); }
    bool has_errors() const { return !se.empty(); }
};

}  // namespace spinpair

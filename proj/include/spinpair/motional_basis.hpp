#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"
#include "spinpair/units.hpp"

namespace spinpair::basis {

/// Relative-motion harmonic oscillator quantum numbers.
struct ModeIndex {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    bool parity_even() const { return (nx + ny + nz) % 2 == 0; }
    /// true when every index is even; only these couple under a delta potential
    bool all_even() const { return nx % 2 == 0 && ny % 2 == 0 && nz % 2 == 0; }

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// eps_n = sum_i hbar w_i (n_i + 1/2), joules.
inline double mode_energy(const ModeIndex& n, const TrapFrequencies& trap) {
    trap.validate();
    if (n.nx < 0 || n.ny < 0 || n.nz < 0) throw input_error("mode_energy: negative index");
    return constants::hbar *
           (trap.wx * (n.nx + 0.5) + trap.wy * (n.ny + 0.5) + trap.wz * (n.nz + 0.5));
}

struct PartitionFunctions {
    double even[3] = {0, 0, 0};  // per-axis, even ladder
    double odd[3] = {0, 0, 0};   // per-axis, odd ladder
    double total = 0.0;          // exchange-symmetric (parity-even) space
};

/// Closed-form 1D even/odd partition functions and their parity-even
/// combination: Z = Ze Ze Ze + Zo Zo Ze + Zo Ze Zo + Ze Zo Zo.
inline PartitionFunctions partition_functions(const TrapFrequencies& trap, double temperature_k) {
    trap.validate();
    if (!(temperature_k > 0.0)) throw input_error("partition_functions: T must be positive");
    const double beta = 1.0 / (constants::k_boltzmann * temperature_k);
    const double bw[3] = {beta * constants::hbar * trap.wx, beta * constants::hbar * trap.wy,
                          beta * constants::hbar * trap.wz};
    PartitionFunctions z;
    for (int i = 0; i < 3; ++i) {
        const double denom = -std::expm1(-2.0 * bw[i]);
        z.even[i] = std::exp(-0.5 * bw[i]) / denom;
        z.odd[i] = std::exp(-1.5 * bw[i]) / denom;
    }
    z.total = z.even[0] * z.even[1] * z.even[2] + z.odd[0] * z.odd[1] * z.even[2] +
              z.odd[0] * z.even[1] * z.odd[2] + z.even[0] * z.odd[1] * z.odd[2];
    return z;
}

/// Boltzmann probability of a parity-even mode, normalized over the full
/// (uncut) parity-even space.
inline double boltzmann_probability(const ModeIndex& n, const TrapFrequencies& trap,
                                    double temperature_k) {
    if (!n.parity_even()) throw input_error("boltzmann_probability: parity-odd mode");
    const PartitionFunctions z = partition_functions(trap, temperature_k);
    const double beta = 1.0 / (constants::k_boltzmann * temperature_k);
    return std::exp(-beta * mode_energy(n, trap)) / z.total;
}

/// Thermal weight of the parity classes a delta potential cannot couple
/// (exactly one even index): F = (Zo Zo Ze + Zo Ze Zo + Ze Zo Zo) / Z.
inline double frozen_fraction(const TrapFrequencies& trap, double temperature_k) {
    const PartitionFunctions z = partition_functions(trap, temperature_k);
    const double frozen = z.odd[0] * z.odd[1] * z.even[2] + z.odd[0] * z.even[1] * z.odd[2] +
                          z.even[0] * z.odd[1] * z.odd[2];
    return frozen / z.total;
}

/// Parity-even modes below an energy cutoff, ordered by energy then
/// lexicographic index. Ordering is deterministic so downstream matrices and
/// result files reproduce bit-for-bit.
struct BasisSet {
    TrapFrequencies trap;
    double e_cut_j = 0.0;
    std::vector<ModeIndex> modes;
    std::vector<double> energy_j;  // same order as modes

    std::size_t size() const { return modes.size(); }
    int max_index(int axis) const {
        int m = 0;
        for (const auto& n : modes)
            m = std::max(m, axis == 0 ? n.nx : (axis == 1 ? n.ny : n.nz));
        return m;
    }
};

inline BasisSet enumerate_basis(const TrapFrequencies& trap, double e_cut_j) {
    trap.validate();
    const double ground = mode_energy({0, 0, 0}, trap);
    if (e_cut_j < ground)
        throw input_error("enumerate_basis: cutoff below the ground-state energy leaves an empty basis");

    struct Entry {
        double e;
        ModeIndex n;
    };
    std::vector<Entry> entries;
    const double hw[3] = {constants::hbar * trap.wx, constants::hbar * trap.wy,
                          constants::hbar * trap.wz};
    for (int nx = 0; hw[0] * (nx + 0.5) + 0.5 * (hw[1] + hw[2]) <= e_cut_j; ++nx)
        for (int ny = 0; hw[0] * (nx + 0.5) + hw[1] * (ny + 0.5) + 0.5 * hw[2] <= e_cut_j; ++ny)
            for (int nz = 0;; ++nz) {
                const double e = hw[0] * (nx + 0.5) + hw[1] * (ny + 0.5) + hw[2] * (nz + 0.5);
                if (e > e_cut_j) break;
                if ((nx + ny + nz) % 2 == 0) entries.push_back({e, {nx, ny, nz}});
            }

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.e != b.e) return a.e < b.e;
        return std::tie(a.n.nx, a.n.ny, a.n.nz) < std::tie(b.n.nx, b.n.ny, b.n.nz);
    });

    BasisSet basis;
    basis.trap = trap;
    basis.e_cut_j = e_cut_j;
    basis.modes.reserve(entries.size());
    basis.energy_j.reserve(entries.size());
    for (const auto& en : entries) {
        basis.modes.push_back(en.n);
        basis.energy_j.push_back(en.e);
    }
    return basis;
}

/// Smallest cutoff whose captured thermal weight reaches `fraction`
/// (default policy; an explicit cutoff can be passed to enumerate_basis
/// instead).
inline BasisSet enumerate_basis_capture(const TrapFrequencies& trap, double temperature_k,
                                        double fraction) {
    if (!(fraction > 0.0) || fraction >= 1.0)
        throw input_error("enumerate_basis_capture: fraction must lie in (0, 1)");
    const PartitionFunctions z = partition_functions(trap, temperature_k);
    const double beta = 1.0 / (constants::k_boltzmann * temperature_k);

    double e_guess = std::max(mode_energy({0, 0, 0}, trap) * 2.0,
                              10.0 * constants::k_boltzmann * temperature_k);
    for (int attempt = 0; attempt < 64; ++attempt) {
        BasisSet candidate = enumerate_basis(trap, e_guess);
        double captured = 0.0;
        for (std::size_t i = 0; i < candidate.size(); ++i) {
            captured += std::exp(-beta * candidate.energy_j[i]) / z.total;
            if (captured >= fraction) {
                // keep every mode up to (and degenerate with) this energy
                const double e_cut = candidate.energy_j[i];
                std::size_t count = i + 1;
                while (count < candidate.size() && candidate.energy_j[count] <= e_cut) ++count;
                candidate.modes.resize(count);
                candidate.energy_j.resize(count);
                candidate.e_cut_j = e_cut;
                return candidate;
            }
        }
        e_guess *= 1.5;
    }
    throw numeric_error("enumerate_basis_capture: capture target not reached");
}

/// Boltzmann weights of an enumerated basis. `probability` is normalized over
/// the full parity-even space (sums to the captured weight over the basis);
/// `ensemble_weight` renormalizes within the basis so simulated populations
/// sum to one.
struct ThermalDistribution {
    double temperature_k = 0.0;
    double beta = 0.0;  // 1 / k_B T
    double partition_function = 0.0;
    double captured_weight = 0.0;
    std::vector<double> probability;
    std::vector<double> ensemble_weight;
};

inline ThermalDistribution thermal_distribution(const BasisSet& basis, double temperature_k) {
    ThermalDistribution d;
    d.temperature_k = temperature_k;
    const PartitionFunctions z = partition_functions(basis.trap, temperature_k);
    d.beta = 1.0 / (constants::k_boltzmann * temperature_k);
    d.partition_function = z.total;
    d.probability.resize(basis.size());
    double captured = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        d.probability[i] = std::exp(-d.beta * basis.energy_j[i]) / z.total;
        captured += d.probability[i];
    }
    d.captured_weight = captured;
    d.ensemble_weight.resize(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) d.ensemble_weight[i] = d.probability[i] / captured;
    return d;
}

}  // namespace spinpair::basis

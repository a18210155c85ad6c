#pragma once

namespace spinpair::constants {

// CODATA 2018 (h is exact by definition; hbar derived so h = 2 pi hbar holds
// to the last bit)
inline constexpr double planck_h = 6.62607015e-34;            // J s
inline constexpr double hbar = planck_h / (2.0 * 3.14159265358979323846);  // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J / K
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// 85Rb (AME2020 atomic mass)
inline constexpr double rb85_mass = 84.911789738 * atomic_mass_unit;  // kg

// Two-atom quadratic Zeeman rates for the S|1,-1> and S|2,-2> spin modes,
// in Hz/G^2 (cycles). The corresponding energy offset is h * q * B^2.
inline constexpr double q1_hz_per_gauss2 = 143.776;
inline constexpr double q2_hz_per_gauss2 = 575.104;

// Predicted 85Rb s-wave scattering lengths, Bohr radii, with 1-sigma
// uncertainties.
inline constexpr double rb85_a0 = -740.0;
inline constexpr double rb85_a2 = -570.0;
inline constexpr double rb85_a4 = -390.0;
inline constexpr double rb85_a0_err = 60.0;
inline constexpr double rb85_a2_err = 50.0;
inline constexpr double rb85_a4_err = 20.0;

}  // namespace spinpair::constants

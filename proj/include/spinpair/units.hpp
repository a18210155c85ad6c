#pragma once

#include <cmath>

#include "spinpair/constants.hpp"
#include "spinpair/errors.hpp"

namespace spinpair {

/// Angular trap frequencies of the relative-motion oscillator, rad/s.
struct TrapFrequencies {
    double wx = 0.0;
    double wy = 0.0;
    double wz = 0.0;

    static TrapFrequencies from_khz(double fx, double fy, double fz) {
        return {2.0 * M_PI * 1e3 * fx, 2.0 * M_PI * 1e3 * fy, 2.0 * M_PI * 1e3 * fz};
    }

    void validate() const {
        if (!(wx > 0.0) || !(wy > 0.0) || !(wz > 0.0))
            throw input_error("trap frequencies must be strictly positive");
    }

    double geometric_mean() const { return std::cbrt(wx * wy * wz); }
};

/// Dimensionless oscillator units: hbar = mu = wbar = 1, with wbar the
/// geometric mean of the trap frequencies and mu the reduced mass. All
/// internal dynamics is carried out in these units; this struct owns every
/// conversion at the boundary.
class OscillatorUnits {
  public:
    OscillatorUnits(const TrapFrequencies& trap, double reduced_mass_kg = constants::rb85_mass / 2.0)
        : trap_(trap), mu_(reduced_mass_kg) {
        trap.validate();
        if (!(mu_ > 0.0)) throw input_error("reduced mass must be positive");
        wbar_ = trap.geometric_mean();
        length_m_ = std::sqrt(constants::hbar / (mu_ * wbar_));
        energy_j_ = constants::hbar * wbar_;
    }

    const TrapFrequencies& trap() const { return trap_; }
    double reduced_mass_kg() const { return mu_; }
    double omega_bar() const { return wbar_; }
    double length_m() const { return length_m_; }
    double energy_j() const { return energy_j_; }

    // reduced trap frequencies omega_i / wbar
    double wx_red() const { return trap_.wx / wbar_; }
    double wy_red() const { return trap_.wy / wbar_; }
    double wz_red() const { return trap_.wz / wbar_; }

    // per-axis oscillator lengths sqrt(hbar/(mu w_i)) in internal length units
    double sigma_x() const { return 1.0 / std::sqrt(wx_red()); }
    double sigma_y() const { return 1.0 / std::sqrt(wy_red()); }
    double sigma_z() const { return 1.0 / std::sqrt(wz_red()); }

    double length_from_bohr(double a_au) const { return a_au * constants::bohr_radius / length_m_; }
    double energy_from_joule(double e_j) const { return e_j / energy_j_; }
    double time_from_seconds(double t_s) const { return t_s * wbar_; }

    /// k_B T in units of hbar*wbar.
    double thermal_energy(double temperature_k) const {
        if (!(temperature_k > 0.0)) throw input_error("temperature must be positive");
        return constants::k_boltzmann * temperature_k / energy_j_;
    }

    /// Interaction constant g_F = 4 pi hbar^2 a_F / m for a scattering length
    /// given in Bohr radii, expressed in internal energy * volume units.
    /// With hbar = mu = 1 this is 2 pi * (a_F / length unit).
    double g_from_scattering_length(double a_au) const {
        return 2.0 * M_PI * length_from_bohr(a_au);
    }

    /// Quadratic Zeeman energy h * q * B^2 in internal energy units, for q in
    /// Hz/G^2 and B in gauss.
    double zeeman_energy(double q_hz_per_g2, double b_gauss) const {
        return 2.0 * M_PI * q_hz_per_g2 * b_gauss * b_gauss / wbar_;
    }

  private:
    TrapFrequencies trap_;
    double mu_;
    double wbar_;
    double length_m_;
    double energy_j_;
};

}  // namespace spinpair

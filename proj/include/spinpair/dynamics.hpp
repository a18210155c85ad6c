#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spinpair/errors.hpp"
#include "spinpair/motional_basis.hpp"
#include "spinpair/spin_channels.hpp"
#include "spinpair/trajectory.hpp"
#include "spinpair/units.hpp"

namespace spinpair::dynamics {

using Complex = std::complex<double>;

/// Run fn(i) for i in [0, count) on up to `workers` threads. Callers store
/// results by index and reduce in fixed order afterwards, so the outcome is
/// identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(workers, std::thread::hardware_concurrency() * 4 + 4);
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

/// Full spin-motion Hamiltonian over the ordered blocks
/// [|0,0>, S|1,-1>, S|2,-2>], dimensionless oscillator units. Diagonal blocks
/// carry the mode energies plus the quadratic Zeeman offsets h q_i B^2 on
/// blocks 1 and 2; off-diagonal blocks are the spin-block couplings times T.
struct HamiltonianMatrix {
    Eigen::MatrixXd h;          // 3N x 3N, exactly symmetric
    Eigen::Index n_modes = 0;   // N
    double b_gauss = 0.0;
    double q1_hz_per_g2 = constants::q1_hz_per_gauss2;
    double q2_hz_per_g2 = constants::q2_hz_per_gauss2;
    double zeeman1 = 0.0;  // internal energy units
    double zeeman2 = 0.0;
};

inline HamiltonianMatrix assemble_hamiltonian(const basis::BasisSet& bs,
                                              const OscillatorUnits& units,
                                              const Eigen::MatrixXd& coupling,
                                              const spin::SpinBlockMatrix& spin_block,
                                              double b_gauss,
                                              double q1 = constants::q1_hz_per_gauss2,
                                              double q2 = constants::q2_hz_per_gauss2) {
    const auto n = Eigen::Index(bs.size());
    if (coupling.rows() != n || coupling.cols() != n)
        throw input_error("assemble_hamiltonian: coupling matrix does not match basis size");
    if (b_gauss < 0.0) throw input_error("assemble_hamiltonian: B must be nonnegative");

    HamiltonianMatrix ham;
    ham.n_modes = n;
    ham.b_gauss = b_gauss;
    ham.q1_hz_per_g2 = q1;
    ham.q2_hz_per_g2 = q2;
    ham.zeeman1 = units.zeeman_energy(q1, b_gauss);
    ham.zeeman2 = units.zeeman_energy(q2, b_gauss);

    ham.h.setZero(3 * n, 3 * n);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) {
            ham.h.block(i * n, j * n, n, n) = spin_block(i, j) * coupling;
            if (i != j) ham.h.block(j * n, i * n, n, n) = ham.h.block(i * n, j * n, n, n);
        }
    const double offset[3] = {0.0, ham.zeeman1, ham.zeeman2};
    for (int i = 0; i < 3; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            ham.h(i * n + k, i * n + k) +=
                units.energy_from_joule(bs.energy_j[std::size_t(k)]) + offset[i];
    return ham;
}

/// Two-atom spin-motion state: three complex coefficient blocks over the
/// basis, unit norm.
struct SpinMotionState {
    Eigen::VectorXcd c;
    Eigen::Index n_modes = 0;
    double time_s = 0.0;

    void validate() const {
        if (c.size() != 3 * n_modes) throw input_error("SpinMotionState: wrong dimension");
        if (std::abs(c.norm() - 1.0) > 1e-9)
            throw input_error("SpinMotionState: coefficients are not normalized");
    }
    double population(int block) const {
        return c.segment(block * n_modes, n_modes).squaredNorm();
    }
};

struct EvolutionResult {
    std::vector<double> time_internal;
    std::vector<std::array<double, 3>> populations;
    double max_norm_deviation = 0.0;
    std::optional<Eigen::MatrixXcd> snapshots;  // 3N x T when requested
};

/// One-time dense symmetric eigendecomposition H = U D U^T; evolution is the
/// exact spectral propagation c(t) = U exp(-i D t) U^T c(0).
class SpectralPropagator {
  public:
    explicit SpectralPropagator(const HamiltonianMatrix& ham)
        : SpectralPropagator(ham.h, ham.n_modes) {}

    SpectralPropagator(const Eigen::MatrixXd& h, Eigen::Index n_modes) : n_modes_(n_modes) {
        if (h.rows() != h.cols()) throw input_error("SpectralPropagator: matrix must be square");
        if (n_modes < 1 || h.rows() % n_modes != 0)
            throw input_error("SpectralPropagator: dimension is not a multiple of the mode count");
        n_blocks_ = int(h.rows() / n_modes);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
        if (solver.info() != Eigen::Success)
            throw numeric_error("SpectralPropagator: eigendecomposition failed");
        values_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
    }

    const Eigen::VectorXd& eigenvalues() const { return values_; }
    const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
    Eigen::Index dim() const { return values_.size(); }
    Eigen::Index n_modes() const { return n_modes_; }

    EvolutionResult evolve(const Eigen::VectorXcd& c0, const std::vector<double>& times,
                           bool keep_snapshots = false) const {
        if (c0.size() != dim()) throw input_error("evolve: initial state has wrong dimension");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (times[i + 1] < times[i]) throw input_error("evolve: times must be sorted");
        if (!times.empty() && times.front() < 0.0)
            throw input_error("evolve: times must be nonnegative");

        const Eigen::Index d = dim();
        const auto nt = Eigen::Index(times.size());
        const Eigen::VectorXcd a = vectors_.transpose() * c0;

        Eigen::MatrixXd zr(d, nt), zi(d, nt);
        for (Eigen::Index t = 0; t < nt; ++t)
            for (Eigen::Index k = 0; k < d; ++k) {
                const double phase = -values_(k) * times[std::size_t(t)];
                const Complex v = a(k) * Complex(std::cos(phase), std::sin(phase));
                zr(k, t) = v.real();
                zi(k, t) = v.imag();
            }
        const Eigen::MatrixXd cr = vectors_ * zr;
        const Eigen::MatrixXd ci = vectors_ * zi;

        EvolutionResult res;
        res.time_internal = times;
        res.populations.resize(times.size());
        if (keep_snapshots) res.snapshots.emplace(d, nt);
        for (Eigen::Index t = 0; t < nt; ++t) {
            double total = 0.0;
            for (int b = 0; b < n_blocks_; ++b) {
                const double pop = cr.col(t).segment(b * n_modes_, n_modes_).squaredNorm() +
                                   ci.col(t).segment(b * n_modes_, n_modes_).squaredNorm();
                if (b < 3) res.populations[std::size_t(t)][std::size_t(b)] = pop;
                total += pop;
            }
            res.max_norm_deviation = std::max(res.max_norm_deviation, std::abs(total - 1.0));
            if (keep_snapshots)
                res.snapshots->col(t) = cr.col(t) + Complex(0.0, 1.0) * ci.col(t);
        }
        if (res.max_norm_deviation > 1e-9)
            throw numeric_error("evolve: norm drifted by " + std::to_string(res.max_norm_deviation));
        return res;
    }

    /// Populations for the unit initial vector on basis mode `init` of the
    /// spin-0 block (the thermal-ensemble member states).
    EvolutionResult evolve_member(Eigen::Index init, const std::vector<double>& times) const {
        Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(dim());
        c0(init) = 1.0;
        return evolve(c0, times);
    }

    Eigen::VectorXcd state_at(const Eigen::VectorXcd& c0, double time) const {
        const Eigen::VectorXcd a = vectors_.transpose() * c0;
        Eigen::VectorXcd z(dim());
        for (Eigen::Index k = 0; k < dim(); ++k) {
            const double phase = -values_(k) * time;
            z(k) = a(k) * Complex(std::cos(phase), std::sin(phase));
        }
        return vectors_ * z;
    }

  private:
    Eigen::Index n_modes_;
    int n_blocks_ = 3;
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;
};

/// Thermal-ensemble populations, Boltzmann-weighted incoherent sum over
/// independently evolved members (each member starts in |0,0> on one basis
/// mode). Members are propagated in parallel and reduced in fixed order.
inline PopulationTrajectory thermal_populations(const SpectralPropagator& prop,
                                                const basis::ThermalDistribution& thermal,
                                                const OscillatorUnits& units,
                                                const std::vector<double>& times_s,
                                                unsigned workers = 1) {
    const auto n = std::size_t(prop.n_modes());
    if (thermal.ensemble_weight.size() != n)
        throw input_error("thermal_populations: weights do not match basis");
    std::vector<double> times(times_s.size());
    for (std::size_t i = 0; i < times_s.size(); ++i)
        times[i] = units.time_from_seconds(times_s[i]);

    std::vector<std::vector<std::array<double, 3>>> member_pops(n);
    parallel_for(n, workers, [&](std::size_t m) {
        member_pops[m] = prop.evolve_member(Eigen::Index(m), times).populations;
    });

    PopulationTrajectory traj;
    traj.time_s = times_s;
    traj.p.assign(times_s.size(), {0.0, 0.0, 0.0});
    for (std::size_t m = 0; m < n; ++m) {
        const double w = thermal.ensemble_weight[m];
        for (std::size_t t = 0; t < times.size(); ++t)
            for (int b = 0; b < 3; ++b) traj.p[t][std::size_t(b)] += w * member_pops[m][t][std::size_t(b)];
    }
    return traj;
}

/// Lowest eigenvector of the interacting spin-0 block, placed in c^0.
inline SpinMotionState groundstate_initial(const Eigen::MatrixXd& block00) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block00);
    if (solver.info() != Eigen::Success)
        throw numeric_error("groundstate_initial: eigendecomposition failed");
    SpinMotionState st;
    st.n_modes = block00.rows();
    st.c = Eigen::VectorXcd::Zero(3 * st.n_modes);
    st.c.head(st.n_modes) = solver.eigenvectors().col(0).cast<Complex>();
    st.c /= st.c.norm();
    return st;
}

/// 5x5 reduced spin density matrix over the ordered basis
/// (|0,0>, |-1,1>, |1,-1>, |-2,2>, |2,-2>), built from the block coefficients
/// rho_{i,j} = sum_n P(n) sum_m c_m^i (c_m^j)^*.
struct ReducedDensityMatrix {
    Eigen::Matrix<Complex, 5, 5> rho;
    Eigen::Matrix<Complex, 3, 3> block;  // rho_{i,j} over the three spin modes
    double time_s = 0.0;
};

inline ReducedDensityMatrix assemble_reduced_density_matrix(
    const Eigen::Matrix<Complex, 3, 3>& block, double time_s) {
    ReducedDensityMatrix r;
    r.block = block;
    r.time_s = time_s;
    const double inv_r2 = 1.0 / std::sqrt(2.0);
    auto& rho = r.rho;
    rho(0, 0) = block(0, 0);
    for (int s = 0; s < 2; ++s) {
        rho(0, 1 + s) = inv_r2 * block(0, 1);
        rho(0, 3 + s) = inv_r2 * block(0, 2);
        rho(1 + s, 0) = std::conj(rho(0, 1));
        rho(3 + s, 0) = std::conj(rho(0, 3));
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            rho(1 + a, 1 + b) = 0.5 * block(1, 1);
            rho(3 + a, 3 + b) = 0.5 * block(2, 2);
            rho(1 + a, 3 + b) = 0.5 * block(1, 2);
            rho(3 + a, 1 + b) = 0.5 * std::conj(block(1, 2));
        }
    const double trace = rho.trace().real();
    if (std::abs(trace - 1.0) > 1e-6)
        throw numeric_error("reduced_density_matrix: trace deviates by " +
                            std::to_string(std::abs(trace - 1.0)));
    return r;
}

inline ReducedDensityMatrix reduced_density_matrix(const SpectralPropagator& prop,
                                                   const basis::ThermalDistribution& thermal,
                                                   const OscillatorUnits& units, double time_s,
                                                   unsigned workers = 1) {
    const auto n = std::size_t(prop.n_modes());
    const auto nn = Eigen::Index(n);
    if (thermal.ensemble_weight.size() != n)
        throw input_error("reduced_density_matrix: weights do not match basis");
    const double t_int = units.time_from_seconds(time_s);

    std::vector<Eigen::Matrix<Complex, 3, 3>> member(n);
    parallel_for(n, workers, [&](std::size_t m) {
        Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(prop.dim());
        c0(Eigen::Index(m)) = 1.0;
        const Eigen::VectorXcd c = prop.state_at(c0, t_int);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                // rho_{i,j} = sum_m c^i_m (c^j_m)^*; Eigen's dot conjugates its
                // left operand, so the j block goes first
                member[m](i, j) = c.segment(j * nn, nn).dot(c.segment(i * nn, nn));
    });

    Eigen::Matrix<Complex, 3, 3> block = Eigen::Matrix<Complex, 3, 3>::Zero();
    for (std::size_t m = 0; m < n; ++m) block += thermal.ensemble_weight[m] * member[m];
    return assemble_reduced_density_matrix(block, time_s);
}

enum class SpinSector { pm1, pm2 };

struct PostselectionResult {
    double probability = 0.0;
    double fidelity = 0.0;
    bool defined = false;  // false when the sector carries no population
};

/// Probability of the +-1 or +-2 sector and the fidelity of the renormalized
/// sub-block with the symmetric Bell-like state (|m,-m> + |-m,m>)/sqrt(2).
inline PostselectionResult postselect_entangled(const ReducedDensityMatrix& r, SpinSector sector) {
    const int base = (sector == SpinSector::pm1) ? 1 : 3;
    const Complex p = r.rho(base, base) + r.rho(base + 1, base + 1);
    const Complex overlap = r.rho(base, base) + r.rho(base, base + 1) + r.rho(base + 1, base) +
                            r.rho(base + 1, base + 1);
    PostselectionResult out;
    out.probability = p.real();
    if (out.probability > 1e-14) {
        out.fidelity = overlap.real() / (2.0 * out.probability);
        out.defined = true;
    }
    return out;
}

}  // namespace spinpair::dynamics

#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinpair/config.hpp"
#include "spinpair/csv.hpp"
#include "spinpair/dynamics.hpp"
#include "spinpair/manifest.hpp"
#include "spinpair/measurement_stats.hpp"
#include "spinpair/motional_basis.hpp"
#include "spinpair/pseudopotential.hpp"
#include "spinpair/rate_model.hpp"
#include "spinpair/spin_channels.hpp"
#include "spinpair/units.hpp"

namespace spinpair::run {

/// Everything a simulation subcommand needs, resolved once from the config:
/// units, basis, thermal weights, couplings in internal units, and the
/// backend-selected mode-overlap matrix.
struct Workspace {
    io::RunConfig config;
    OscillatorUnits units;
    basis::BasisSet basis;
    basis::ThermalDistribution thermal;
    spin::ScatteringLengths lengths;
    spin::CouplingTable table_internal;
    spin::SpinBlockMatrix spin_block;  // internal energy units
    pseudo::GaussianPotential potential;
    Eigen::MatrixXd coupling;  // T in internal units
    std::vector<std::string> warnings;
};

inline spin::ScatteringLengths lengths_from_config(const io::RunConfig& cfg) {
    spin::ScatteringLengths a;
    a.a0 = cfg.lengths_au[0];
    a.a2 = cfg.lengths_au[1];
    a.a4 = cfg.lengths_au[2];
    a.a0_err = cfg.lengths_err_au[0];
    a.a2_err = cfg.lengths_err_au[1];
    a.a4_err = cfg.lengths_err_au[2];
    return a;
}

inline Workspace make_workspace(const io::RunConfig& cfg) {
    cfg.validate();
    const auto trap = TrapFrequencies::from_khz(cfg.trap_khz[0], cfg.trap_khz[1], cfg.trap_khz[2]);
    Workspace ws{cfg, OscillatorUnits(trap), {}, {}, lengths_from_config(cfg), {}, {}, {}, {}, {}};

    const double temperature_k = cfg.temperature_uk * 1e-6;
    if (cfg.e_cut_hw > 0.0)
        ws.basis = basis::enumerate_basis(trap, cfg.e_cut_hw * ws.units.energy_j());
    else
        ws.basis = basis::enumerate_basis_capture(trap, temperature_k, cfg.capture);

    const std::size_t n = ws.basis.size();
    if (int(n) > cfg.max_modes && !cfg.force)
        throw input_error("basis has " + std::to_string(n) + " modes, above max_modes=" +
                          std::to_string(cfg.max_modes) + " (use force = true to override)");
    const double est_gb = 3.0 * std::pow(3.0 * double(n), 2) * 8.0 / 1e9;
    if (est_gb > cfg.memory_budget_gb && !cfg.force)
        throw input_error("dense eigenproblem would need about " + std::to_string(est_gb) +
                          " GB, above memory_budget_gb (use force = true to override)");

    ws.thermal = basis::thermal_distribution(ws.basis, temperature_k);
    if (ws.thermal.captured_weight < cfg.capture)
        ws.warnings.push_back("captured thermal weight " +
                              std::to_string(ws.thermal.captured_weight) +
                              " below capture target " + std::to_string(cfg.capture));

    ws.table_internal =
        spin::coupling_table(ws.lengths, ws.units.g_from_scattering_length(1.0));
    ws.spin_block = spin::spin_block_matrix(ws.table_internal);
    ws.potential.width_au = pseudo::gaussian_width(ws.lengths);
    if (cfg.backend == "gaussian")
        ws.coupling = pseudo::coupling_matrix(ws.basis, ws.units, ws.potential).t;
    else
        ws.coupling = pseudo::coupling_matrix_delta(ws.basis, ws.units);
    return ws;
}

inline dynamics::HamiltonianMatrix hamiltonian(const Workspace& ws, double b_gauss) {
    return dynamics::assemble_hamiltonian(ws.basis, ws.units, ws.coupling, ws.spin_block, b_gauss);
}

/// Root-mean-square entry of the |0,0> <-> S|1,-1> coupling block, internal
/// energy units. Sets the scale against which the quadratic Zeeman detuning
/// is compared.
inline double rms_coupling01(const Workspace& ws) {
    const double s01 = ws.spin_block(0, 1);
    return std::abs(s01) * ws.coupling.norm() / double(ws.coupling.rows());
}

/// Field strength at which the block-1 Zeeman offset reaches `ratio` times
/// the RMS coupling.
inline double field_for_zeeman_ratio(const Workspace& ws, double ratio) {
    const double target = ratio * rms_coupling01(ws);  // internal energy
    return std::sqrt(target * ws.units.omega_bar() /
                     (2.0 * M_PI * constants::q1_hz_per_gauss2));
}

inline std::vector<double> time_grid_s(const io::RunConfig& cfg) {
    std::vector<double> t(std::size_t(cfg.time_points));
    for (int i = 0; i < cfg.time_points; ++i)
        t[std::size_t(i)] = cfg.time_max_ms * 1e-3 * double(i) / double(cfg.time_points - 1);
    return t;
}

// --- output plumbing ---------------------------------------------------------

struct RunOutput {
    std::filesystem::path dir;
    io::RunManifest manifest;
};

namespace detail {

class Command {
  public:
    Command(const io::RunConfig& cfg, const std::string& name, unsigned workers)
        : start_(std::chrono::steady_clock::now()) {
        out_.dir = cfg.out_dir;
        std::filesystem::create_directories(out_.dir);
        out_.manifest.command = name;
        out_.manifest.config = cfg;
        out_.manifest.workers = workers;
        std::ofstream resolved(out_.dir / "resolved.cfg", std::ios::binary);
        resolved << io::resolved_config(cfg);
        out_.manifest.outputs.push_back("resolved.cfg");
    }

    std::filesystem::path path(const std::string& name) {
        out_.manifest.outputs.push_back(name);
        return out_.dir / name;
    }

    void note_input(const std::string& file) {
        out_.manifest.input_digests[file] = io::fnv1a64_file(file);
    }

    void note_basis(const Workspace& ws) {
        out_.manifest.basis_size = ws.basis.size();
        out_.manifest.e_cut_hw = ws.units.energy_from_joule(ws.basis.e_cut_j);
        out_.manifest.captured_weight = ws.thermal.captured_weight;
        for (const auto& w : ws.warnings) out_.manifest.warnings.push_back(w);
    }

    void write_json(const std::string& name, const nlohmann::json& j) {
        std::ofstream f(path(name), std::ios::binary);
        f << j.dump(2) << "\n";
        if (!f) throw input_error("cannot write " + name);
    }

    RunOutput finish() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        out_.manifest.wall_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
        io::write_manifest(out_.manifest, (out_.dir / "manifest.json").string());
        return std::move(out_);
    }

  private:
    RunOutput out_;
    std::chrono::steady_clock::time_point start_;
};

inline nlohmann::json matrix3_json(const Eigen::Matrix3d& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

}  // namespace detail

// --- subcommands --------------------------------------------------------------

/// coefficients: the six g values (numerically equal to the Eq.-(7) forms in
/// Bohr-radius units), the symmetrized 3x3 spin block, the pseudopotential
/// width, and the rate ratios with sampled uncertainties.
inline RunOutput run_coefficients(const io::RunConfig& cfg) {
    cfg.validate();
    detail::Command cmd(cfg, "coefficients", 1);
    const auto lengths = lengths_from_config(cfg);
    const auto table = spin::coupling_table(lengths);
    const auto block = spin::spin_block_matrix(table);
    const auto ratios = rate::rate_ratios(table, &lengths, 20000, cfg.seed);
    const double width = pseudo::gaussian_width(lengths);

    nlohmann::json j;
    j["scattering_lengths_au"] = {lengths.a0, lengths.a2, lengths.a4};
    j["coupling_table"] = {{"g00_00", table.g00_00},     {"g00_1m1", table.g00_1m1},
                           {"g00_2m2", table.g00_2m2},   {"g1m1_1m1", table.g1m1_1m1},
                           {"g1m1_2m2", table.g1m1_2m2}, {"g2m2_2m2", table.g2m2_2m2}};
    j["spin_block"] = detail::matrix3_json(block);
    j["gaussian_width_au"] = width;
    const auto ratio_json = [](const rate::RatioStat& s) {
        return nlohmann::json{
            {"central", s.central}, {"p16", s.p16}, {"p50", s.p50}, {"p84", s.p84}};
    };
    j["rate_ratios"] = {{"r01_12", ratio_json(ratios.r01_12)},
                        {"r02_01", ratio_json(ratios.r02_01)},
                        {"r02_12", ratio_json(ratios.r02_12)}};
    j["cross_section_k0_au2"] =
        pseudo::total_cross_section(0.0, lengths, pseudo::CrossSectionModel::delta);
    cmd.write_json("coefficients.json", j);
    return cmd.finish();
}

/// field-scan: P populations at the probe time, one row per field value.
inline RunOutput run_field_scan(const io::RunConfig& cfg, unsigned workers) {
    if (cfg.b_scan_g.empty()) throw input_error("field-scan: b_scan_g must not be empty");
    detail::Command cmd(cfg, "field-scan", workers);
    Workspace ws = make_workspace(cfg);
    cmd.note_basis(ws);

    const std::vector<double> probe{cfg.probe_time_ms * 1e-3};
    std::vector<std::vector<double>> rows;
    for (double b : cfg.b_scan_g) {
        if (b < 0.0) throw input_error("field-scan: negative field");
        dynamics::SpectralPropagator prop(hamiltonian(ws, b));
        const auto traj = dynamics::thermal_populations(prop, ws.thermal, ws.units, probe, workers);
        rows.push_back({b, traj.p[0][0], traj.p[0][1], traj.p[0][2]});
    }
    io::write_csv(cmd.path("field_scan.csv").string(), {"b_gauss", "p00", "p1m1", "p2m2"}, rows);
    return cmd.finish();
}

/// time-series: population trajectory at the configured field. The
/// groundstate initial condition evolves the interacting relative-motion
/// groundstate instead of the thermal ensemble.
inline RunOutput run_time_series(const io::RunConfig& cfg, unsigned workers) {
    detail::Command cmd(cfg, "time-series", workers);
    Workspace ws = make_workspace(cfg);
    cmd.note_basis(ws);

    const auto times = time_grid_s(cfg);
    const auto ham = hamiltonian(ws, cfg.b_field_g);
    dynamics::SpectralPropagator prop(ham);

    PopulationTrajectory traj;
    if (cfg.initial == "groundstate") {
        const auto n = Eigen::Index(ws.basis.size());
        const auto state = dynamics::groundstate_initial(ham.h.topLeftCorner(n, n));
        std::vector<double> t_int(times.size());
        for (std::size_t i = 0; i < times.size(); ++i)
            t_int[i] = ws.units.time_from_seconds(times[i]);
        const auto res = prop.evolve(state.c, t_int);
        traj.time_s = times;
        traj.p = res.populations;
    } else {
        traj = dynamics::thermal_populations(prop, ws.thermal, ws.units, times, workers);
    }

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.size(); ++i)
        rows.push_back({traj.time_s[i], traj.p[i][0], traj.p[i][1], traj.p[i][2]});
    io::write_csv(cmd.path("time_series.csv").string(), {"time_s", "p00", "p1m1", "p2m2"}, rows);
    return cmd.finish();
}

/// rate-fit: single-parameter fit of the rate equations to an ingested
/// trajectory.
inline RunOutput run_rate_fit(const io::RunConfig& cfg, const std::string& data_path) {
    cfg.validate();
    detail::Command cmd(cfg, "rate-fit", 1);
    cmd.note_input(data_path);
    PopulationTrajectory data = io::read_spin_populations(data_path);
    if (cfg.normalize_to_t0) {
        const double scale = data.p.front()[0];
        if (!(scale > 0.0)) throw input_error("rate-fit: cannot normalize, p00(t0) <= 0");
        for (std::size_t i = 0; i < data.size(); ++i)
            for (int b = 0; b < 3; ++b) {
                data.p[i][std::size_t(b)] /= scale;
                if (data.has_errors()) data.se[i][std::size_t(b)] /= scale;
            }
    }
    const auto fit = rate::fit_rate(data, cfg.rate_ratio);

    nlohmann::json j;
    j["gamma12_per_s"] = fit.gamma12;
    j["gamma01_per_s"] = fit.gamma01;
    j["ratio"] = cfg.rate_ratio;
    j["residual"] = fit.residual;
    j["degenerate"] = fit.degenerate;
    j["n_points"] = data.size();
    j["weighted"] = data.has_errors();
    cmd.write_json("rate_fit.json", j);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < fit.model.size(); ++i)
        rows.push_back({fit.model.time_s[i], fit.model.p[i][0], fit.model.p[i][1],
                        fit.model.p[i][2]});
    io::write_csv(cmd.path("rate_fit_model.csv").string(), {"time_s", "p00", "p1m1", "p2m2"}, rows);
    return cmd.finish();
}

/// squeezing: per-row number squeezing of an ejection-outcome table plus the
/// detection-error variance model at the configured true sector split.
inline RunOutput run_squeezing(const io::RunConfig& cfg, const std::string& data_path) {
    cfg.validate();
    detail::Command cmd(cfg, "squeezing", 1);
    cmd.note_input(data_path);
    const auto data = io::read_ejection_outcomes(data_path);

    nlohmann::json rows = nlohmann::json::array();
    double zeta2_sum = 0.0;
    std::size_t zeta2_count = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        stats::EjectionOutcome out{data.p[i][0], data.p[i][1], data.p[i][2]};
        const auto sq = stats::squeezing_from_outcomes(out, 2);
        nlohmann::json row;
        row["time_s"] = data.time_s[i];
        row["defined"] = sq.defined;
        if (sq.defined) {
            row["variance"] = sq.variance;
            row["zeta2"] = sq.zeta2;
            row["db"] = sq.perfect ? nlohmann::json("-inf") : nlohmann::json(sq.db);
            zeta2_sum += sq.zeta2;
            ++zeta2_count;
        }
        rows.push_back(row);
    }

    const stats::DetectionModel model{cfg.eta_f2, cfg.eta_f3};
    const stats::EjectionOutcome truth{cfg.detection_true_p0, 0.0, 1.0 - cfg.detection_true_p0};
    const double dv = stats::detection_variance(model, truth);
    const double dv_mc = stats::detection_variance_mc(model, truth, 1000000, cfg.seed);

    nlohmann::json j;
    j["rows"] = rows;
    if (zeta2_count > 0) {
        const double mean = zeta2_sum / double(zeta2_count);
        j["mean_zeta2"] = mean;
        j["mean_db"] = 10.0 * std::log10(mean);
    }
    j["detection_model"] = {{"eta_f2", model.eta_f2},
                            {"eta_f3", model.eta_f3},
                            {"true_p0", truth.p0},
                            {"expected_variance", dv},
                            {"expected_variance_mc", dv_mc}};
    // sensitivity of the detection variance to the assumed sector split
    nlohmann::json sens = nlohmann::json::array();
    for (double p0 = 0.30; p0 <= 0.5001; p0 += 0.02) {
        const stats::EjectionOutcome t{p0, 0.0, 1.0 - p0};
        sens.push_back({{"true_p0", p0}, {"variance", stats::detection_variance(model, t)}});
    }
    j["detection_model"]["sensitivity"] = sens;
    cmd.write_json("squeezing.json", j);
    return cmd.finish();
}

/// frozen-fraction: thermal weight of the delta-frozen parity classes for the
/// configured trap and temperature.
inline RunOutput run_frozen_fraction(const io::RunConfig& cfg) {
    cfg.validate();
    detail::Command cmd(cfg, "frozen-fraction", 1);
    const auto trap = TrapFrequencies::from_khz(cfg.trap_khz[0], cfg.trap_khz[1], cfg.trap_khz[2]);
    const double temperature_k = cfg.temperature_uk * 1e-6;
    const auto z = basis::partition_functions(trap, temperature_k);

    nlohmann::json j;
    j["trap_khz"] = {cfg.trap_khz[0], cfg.trap_khz[1], cfg.trap_khz[2]};
    j["temperature_uk"] = cfg.temperature_uk;
    j["frozen_fraction"] = basis::frozen_fraction(trap, temperature_k);
    j["partition"] = {{"even", {z.even[0], z.even[1], z.even[2]}},
                      {"odd", {z.odd[0], z.odd[1], z.odd[2]}},
                      {"total", z.total}};
    cmd.write_json("frozen_fraction.json", j);
    return cmd.finish();
}

/// density-matrix: reduced 5x5 spin density matrix of the thermal ensemble at
/// the configured time, with postselected sector probabilities and
/// fidelities.
inline RunOutput run_density_matrix(const io::RunConfig& cfg, unsigned workers) {
    detail::Command cmd(cfg, "density-matrix", workers);
    Workspace ws = make_workspace(cfg);
    cmd.note_basis(ws);

    dynamics::SpectralPropagator prop(hamiltonian(ws, cfg.b_field_g));
    const auto rho = dynamics::reduced_density_matrix(prop, ws.thermal, ws.units,
                                                      cfg.density_time_ms * 1e-3, workers);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<dynamics::Complex, 5, 5>> eig(rho.rho);
    nlohmann::json mat_re = nlohmann::json::array(), mat_im = nlohmann::json::array();
    double hermiticity = 0.0;
    for (int i = 0; i < 5; ++i) {
        nlohmann::json row_re = nlohmann::json::array(), row_im = nlohmann::json::array();
        for (int k = 0; k < 5; ++k) {
            row_re.push_back(rho.rho(i, k).real());
            row_im.push_back(rho.rho(i, k).imag());
            hermiticity = std::max(hermiticity, std::abs(rho.rho(i, k) - std::conj(rho.rho(k, i))));
        }
        mat_re.push_back(row_re);
        mat_im.push_back(row_im);
    }

    nlohmann::json j;
    j["time_ms"] = cfg.density_time_ms;
    j["b_field_g"] = cfg.b_field_g;
    j["basis_order"] = {"|0,0>", "|-1,1>", "|1,-1>", "|-2,2>", "|2,-2>"};
    j["rho_re"] = mat_re;
    j["rho_im"] = mat_im;
    j["trace"] = rho.rho.trace().real();
    j["hermiticity_max_abs"] = hermiticity;
    j["min_eigenvalue"] = eig.eigenvalues().minCoeff();
    for (auto sector : {dynamics::SpinSector::pm1, dynamics::SpinSector::pm2}) {
        const auto ps = dynamics::postselect_entangled(rho, sector);
        nlohmann::json s;
        s["probability"] = ps.probability;
        s["defined"] = ps.defined;
        if (ps.defined) s["fidelity"] = ps.fidelity;
        j[sector == dynamics::SpinSector::pm1 ? "postselect_pm1" : "postselect_pm2"] = s;
    }
    cmd.write_json("density_matrix.json", j);
    return cmd.finish();
}

}  // namespace spinpair::run

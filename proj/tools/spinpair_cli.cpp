// spinpair: batch runner for two-atom spin-changing collision simulations.
//
// Subcommands mirror the library: coefficients, field-scan, time-series,
// rate-fit, squeezing, frozen-fraction, density-matrix. Every run writes its
// outputs plus resolved.cfg and manifest.json into --out; re-running with a
// run's resolved.cfg reproduces the outputs byte for byte.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spinpair/errors.hpp"
#include "spinpair/runner.hpp"

namespace {

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> backend;
    std::optional<double> b_field;
    std::optional<double> temp_uk;
    std::optional<double> capture;
    std::optional<std::uint64_t> seed;
    std::optional<bool> force;
    std::vector<std::string> overrides;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "key = value config file");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--backend", f.backend, "interaction backend: gaussian | delta")
        ->check(CLI::IsMember({"gaussian", "delta"}));
    cmd->add_option("--b-field", f.b_field, "bias field, gauss");
    cmd->add_option("--temp", f.temp_uk, "temperature, microkelvin");
    cmd->add_option("--capture", f.capture, "thermal-weight capture target in (0,1)");
    cmd->add_option("--seed", f.seed, "random seed for sampled quantities");
    cmd->add_option("--workers", f.workers, "worker threads (results are independent of this)");
    cmd->add_flag("--force", [&f](std::int64_t) { f.force = true; },
                  "override the basis-size and memory guardrails");
    cmd->add_option("--set", f.overrides, "extra config override, key=value")
        ->take_all();
}

spinpair::io::RunConfig resolve(const CommonFlags& f) {
    spinpair::io::RunConfig cfg;
    if (f.config_path) cfg = spinpair::io::load_config(*f.config_path);
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw spinpair::input_error("--set expects key=value, got '" + kv + "'");
        spinpair::io::apply_config_key(cfg, spinpair::io::csv::trim(kv.substr(0, eq)),
                                       spinpair::io::csv::trim(kv.substr(eq + 1)));
    }
    if (f.out_dir) cfg.out_dir = *f.out_dir;
    if (f.backend) cfg.backend = *f.backend;
    if (f.b_field) cfg.b_field_g = *f.b_field;
    if (f.temp_uk) cfg.temperature_uk = *f.temp_uk;
    if (f.capture) cfg.capture = *f.capture;
    if (f.seed) cfg.seed = *f.seed;
    if (f.force) cfg.force = *f.force;
    cfg.validate();
    return cfg;
}

void report(const spinpair::run::RunOutput& out) {
    std::cout << out.manifest.command << ": wrote";
    for (const auto& name : out.manifest.outputs) std::cout << " " << (out.dir / name).string();
    std::cout << "\n";
    for (const auto& w : out.manifest.warnings) std::cout << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-atom spin-changing collision simulator"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* coeff = app.add_subcommand("coefficients", "spin-channel couplings, width, rate ratios");
    add_common(coeff, flags);

    auto* scan = app.add_subcommand("field-scan", "P populations at the probe time vs bias field");
    add_common(scan, flags);
    std::optional<std::string> b_list;
    scan->add_option("--b-list", b_list, "comma-separated field values, gauss");

    auto* series = app.add_subcommand("time-series", "population trajectory at fixed field");
    add_common(series, flags);
    std::optional<std::string> initial;
    series->add_option("--initial", initial, "thermal | groundstate")
        ->check(CLI::IsMember({"thermal", "groundstate"}));

    auto* fit = app.add_subcommand("rate-fit", "fit the rate-equation model to a trajectory CSV");
    add_common(fit, flags);
    std::string fit_data;
    fit->add_option("data", fit_data, "CSV with time_s,p00,p1m1,p2m2[,se...]")->required();
    std::optional<double> ratio;
    fit->add_option("--ratio", ratio, "gamma01/gamma12 ratio (default 2.34)");
    bool normalize = false;
    fit->add_flag("--normalize", normalize, "normalize populations to the t=0 value");

    auto* squeeze = app.add_subcommand("squeezing", "number squeezing of ejection outcomes");
    add_common(squeeze, flags);
    std::string squeeze_data;
    squeeze->add_option("data", squeeze_data, "CSV with time_s,p0,p1,p2")->required();

    auto* frozen = app.add_subcommand("frozen-fraction", "delta-model frozen thermal fraction");
    add_common(frozen, flags);

    auto* density = app.add_subcommand("density-matrix", "reduced spin density matrix at a time");
    add_common(density, flags);
    std::optional<double> density_time;
    density->add_option("--time", density_time, "snapshot time, ms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        auto cfg = resolve(flags);
        spinpair::run::RunOutput out;
        if (*coeff) {
            out = spinpair::run::run_coefficients(cfg);
            const auto lengths = spinpair::run::lengths_from_config(cfg);
            const auto table = spinpair::spin::coupling_table(lengths);
            const auto block = spinpair::spin::spin_block_matrix(table);
            const auto ratios = spinpair::rate::rate_ratios(table);
            std::printf("g00_00 %.6f  g00_1m1 %.6f  g00_2m2 %.6f\n", table.g00_00, table.g00_1m1,
                        table.g00_2m2);
            std::printf("g1m1_1m1 %.6f  g1m1_2m2 %.6f  g2m2_2m2 %.6f\n", table.g1m1_1m1,
                        table.g1m1_2m2, table.g2m2_2m2);
            std::printf("spin block:\n");
            for (int i = 0; i < 3; ++i)
                std::printf("  %12.6f %12.6f %12.6f\n", block(i, 0), block(i, 1), block(i, 2));
            std::printf("gaussian width: %.3f a.u.\n", spinpair::pseudo::gaussian_width(lengths));
            std::printf("rate ratios: g01/g12 %.4f  g02/g01 %.4f  g02/g12 %.4f\n",
                        ratios.r01_12.central, ratios.r02_01.central, ratios.r02_12.central);
        } else if (*scan) {
            if (b_list) cfg.b_scan_g = spinpair::io::detail::parse_list(*b_list, "--b-list");
            if (cfg.b_scan_g.empty()) throw spinpair::input_error("field-scan: empty field list");
            out = spinpair::run::run_field_scan(cfg, flags.workers);
        } else if (*series) {
            if (initial) cfg.initial = *initial;
            out = spinpair::run::run_time_series(cfg, flags.workers);
        } else if (*fit) {
            if (ratio) cfg.rate_ratio = *ratio;
            if (normalize) cfg.normalize_to_t0 = true;
            out = spinpair::run::run_rate_fit(cfg, fit_data);
        } else if (*squeeze) {
            out = spinpair::run::run_squeezing(cfg, squeeze_data);
        } else if (*frozen) {
            out = spinpair::run::run_frozen_fraction(cfg);
            const auto trap = spinpair::TrapFrequencies::from_khz(cfg.trap_khz[0], cfg.trap_khz[1],
                                                                  cfg.trap_khz[2]);
            std::printf("frozen fraction: %.6f at %.3g uK\n",
                        spinpair::basis::frozen_fraction(trap, cfg.temperature_uk * 1e-6),
                        cfg.temperature_uk);
        } else if (*density) {
            if (density_time) cfg.density_time_ms = *density_time;
            out = spinpair::run::run_density_matrix(cfg, flags.workers);
        }
        report(out);
        return 0;
    } catch (const spinpair::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const spinpair::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

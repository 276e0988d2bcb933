// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// CLI entry point, callable in-process from tests. Exit codes: 0 success,
// 1 validation/usage error, 2 numerical degeneracy.

#pragma once

#include <CLI11.hpp>
#include <iostream>

#include "csdoa/harness.hpp"

namespace csdoa {

namespace detail {

inline void apply_variant_flag(ExperimentConfig &config, const std::string &variant) {
    if (variant == "classic") config.variants = {PipelineVariant::Classic};
    else if (variant == "cs") config.variants = {PipelineVariant::Cs};
    else if (variant == "both")
        config.variants = {PipelineVariant::Classic, PipelineVariant::Cs};
    else throw std::invalid_argument("unknown variant: " + variant);
}

} // namespace detail

// Seeded random PSD Hermitian matrix and general complex matrix, used by
// the lemma-check subcommand and its tests.
inline CovarianceMatrix random_psd(int k, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    ComplexMatrix g(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = rng.next_complex_gaussian();
    CovarianceMatrix r;
    r.data = g * g.adjoint() / static_cast<double>(k);
    r.data = (0.5 * (r.data + r.data.adjoint().eval())).eval();
    r.kind = CovarianceKind::Exact;
    return r;
}

inline ComplexMatrix random_complex_matrix(int k, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    ComplexMatrix c(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) c(i, j) = rng.next_complex_gaussian();
    return c;
}

struct LemmaCheckResult {
    double rel_error_a = 0.0;
    double rel_error_b = 0.0;
    bool passed() const { return rel_error_a < 0.05 && rel_error_b < 0.05; }
};

inline LemmaCheckResult run_lemma_check(int trials, std::uint64_t seed,
                                        const std::string &out_dir, int dim = 3, int t = 5) {
    std::filesystem::create_directories(out_dir);
    const CovarianceMatrix r = random_psd(dim, derive_seed(seed, 1));
    const ComplexMatrix c1 = random_complex_matrix(dim, derive_seed(seed, 2));
    const ComplexMatrix c2 = random_complex_matrix(dim, derive_seed(seed, 3));

    LemmaCheckResult res;
    res.rel_error_a = fluctuation_product_check(r, c1, t, trials, derive_seed(seed, 4));
    res.rel_error_b = trace_product_check(r, c1, c2, t, trials, derive_seed(seed, 5));

    CsvWriter csv(out_dir + "/lemma_check.csv",
                  {"check", "dimension", "num_snapshots", "trials", "relative_error"});
    csv.row({"fluctuation_product", std::to_string(dim), std::to_string(t),
             std::to_string(trials), format_double(res.rel_error_a)});
    csv.row({"trace_product", std::to_string(dim), std::to_string(t), std::to_string(trials),
             format_double(res.rel_error_b)});
    return res;
}

inline int cli_main(int argc, const char *const *argv) {
    CLI::App app{"CS beamformer root-MUSIC DOA estimation benchmark"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "results", variant = "both";
    std::uint64_t seed = 0;
    int trials = -1;
    bool have_seed = false, fix_phi = false;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "experiment config file");
        cmd->add_option("--seed", seed, "master seed")->each([&](const std::string &) {
            have_seed = true;
        });
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--trials", trials, "Monte Carlo trial count");
        cmd->add_option("--variant", variant, "classic | cs | both");
        cmd->add_flag("--fix-phi", fix_phi, "freeze one measurement matrix across trials");
    };

    CLI::App *example1 = app.add_subcommand("example1", "two-source estimation run");
    CLI::App *rmse = app.add_subcommand("rmse-sweep", "RMSE vs SNR sweep");
    CLI::App *deviation = app.add_subcommand("deviation-sweep", "subspace deviation sweep");
    CLI::App *lemma = app.add_subcommand("lemma-check", "covariance fluctuation lemma check");
    CLI::App *timing = app.add_subcommand("timing", "eigendecomposition timing");
    for (CLI::App *cmd : {example1, rmse, deviation, lemma, timing}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        if (have_seed) config.master_seed = seed;
        if (trials > 0) config.trials = trials;
        if (fix_phi) config.fix_phi = true;
        detail::apply_variant_flag(config, variant);

        if (lemma->parsed()) {
            const int lemma_trials = trials > 0 ? trials : 100000;
            const LemmaCheckResult res =
                run_lemma_check(lemma_trials, config.master_seed, out_dir);
            std::cout << "fluctuation-product relative error: " << res.rel_error_a << "\n";
            std::cout << "trace-product relative error: " << res.rel_error_b << "\n";
            std::cout << (res.passed() ? "PASS" : "FAIL") << " (threshold 5%)\n";
            return res.passed() ? 0 : 2;
        }
        if (example1->parsed()) {
            const Example1Outputs out = run_example1(config, out_dir);
            for (const SweepRow &row : out.sweep.rows)
                std::cout << row.variant << ": rmse " << row.rmse_deg << " deg, failures "
                          << row.failures << "/" << row.trials << ", elapsed "
                          << row.elapsed_seconds << " s\n";
            return 0;
        }
        if (rmse->parsed()) {
            const SweepResult res = run_rmse_sweep(config, out_dir);
            for (const SweepRow &row : res.rows)
                std::cout << row.variant << " @ " << row.snr_db << " dB: rmse " << row.rmse_deg
                          << " deg, failures " << row.failures << "/" << row.trials << "\n";
            return 0;
        }
        if (deviation->parsed()) {
            const SweepResult res = run_deviation_sweep(config, out_dir);
            for (const SweepRow &row : res.rows)
                std::cout << row.variant << " T=" << row.num_snapshots << " @ " << row.snr_db
                          << " dB: xi_emp " << row.mean_xi_empirical << ", xi_quad "
                          << row.mean_xi_quadratic << ", E[xi] " << row.xi_expected << "\n";
            return 0;
        }
        if (timing->parsed()) {
            const TimingReport rep = run_timing(config, out_dir);
            std::cout << "eig " << config.num_sensors << "x" << config.num_sensors << ": "
                      << rep.eig_seconds_full << " s\n";
            std::cout << "eig " << config.m << "x" << config.m << ": "
                      << rep.eig_seconds_compressed << " s\n";
            std::cout << "speedup: " << rep.eig_speedup << "x\n";
            std::cout << "rooting degree (both variants): " << rep.rooting_degree << "\n";
            return 0;
        }
    } catch (const DegeneracyError &e) {
        std::cerr << "numerical degeneracy: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace csdoa

// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Seeded Monte Carlo experiment runner: config files, trial scheduling,
// RMSE / root-constellation / subspace-deviation sweeps and timing runs.
// Trials get pre-assigned seeds derived from the master seed, so outputs
// are byte-identical regardless of the thread count.

#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "csdoa/deviation.hpp"
#include "csdoa/io.hpp"
#include "csdoa/rootmusic.hpp"

namespace csdoa {

struct ExperimentConfig {
    // scenario
    std::vector<double> angles_deg{20.0, -50.0};
    std::vector<double> source_weights{1.0, 1.0}; // relative powers, scaled by SNR
    double noise_variance = 1.0;
    int num_snapshots = 1000;
    double snr_db = 15.0;

    // geometry
    int num_sensors = 7;
    double spacing_ratio = 0.5;
    std::vector<double> positions; // empty = ULA

    // experiment
    int m = 3;
    PhiMode phi_mode = PhiMode::RowOrthonormal;
    std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<int> snapshot_grid{10, 50, 100};
    int trials = 200;
    std::uint64_t master_seed = 1;
    std::vector<PipelineVariant> variants{PipelineVariant::Classic, PipelineVariant::Cs};
    bool fix_phi = false;
    NoiseFloorMode noise_floor = NoiseFloorMode::Known;

    int num_sources() const { return static_cast<int>(angles_deg.size()); }

    ArrayGeometry geometry() const {
        if (!positions.empty()) return ArrayGeometry::from_positions(positions, spacing_ratio);
        return ArrayGeometry::ula(num_sensors, spacing_ratio);
    }

    SourceScenario scenario_at(double snr_db_point, int t) const {
        SourceScenario s;
        s.angles_deg = angles_deg;
        const double gain = noise_variance * std::pow(10.0, snr_db_point / 10.0);
        for (double w : source_weights) s.powers.push_back(w * gain);
        s.noise_variance = noise_variance;
        s.num_snapshots = t;
        return s;
    }

    void validate() const {
        scenario_at(snr_db, num_snapshots).validate(geometry());
        if (trials < 1) throw std::invalid_argument("config: trials must be positive");
        if (snr_grid_db.empty()) throw std::invalid_argument("config: empty SNR grid");
        if (snapshot_grid.empty()) throw std::invalid_argument("config: empty snapshot grid");
        if (variants.empty()) throw std::invalid_argument("config: no variants selected");
        for (PipelineVariant v : variants)
            if (v == PipelineVariant::Cs) {
                const MeasurementBound b = validate_m(num_sources(), num_sensors, m);
                if (!b) throw std::invalid_argument("config: " + b.message);
            }
    }
};

// ---------------------------------------------------------------------------
// Config file format: flat "key = value" lines under [section] headers,
// lists comma-separated. parse(serialize(c)) == c.

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string &s, Parse parse) {
    std::vector<T> out;
    for (const auto &item : split_list(s)) out.push_back(parse(item));
    return out;
}

template <typename T>
std::string join(const std::vector<T> &items, const std::function<std::string(const T &)> &fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fmt(items[i]);
    }
    return out;
}

} // namespace detail

inline ExperimentConfig parse_config(std::istream &in) {
    ExperimentConfig c;
    c.angles_deg.clear();
    c.source_weights.clear();
    c.snr_grid_db.clear();
    c.snapshot_grid.clear();
    c.variants.clear();

    std::string line, section;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: malformed line: " + line);
        kv[section + "." + detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }

    auto get = [&](const std::string &key) -> const std::string * {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto d = [](const std::string &s) { return std::stod(s); };
    auto i = [](const std::string &s) { return std::stoi(s); };

    if (const auto *v = get("scenario.angles_deg")) c.angles_deg = detail::parse_list<double>(*v, d);
    if (const auto *v = get("scenario.source_weights"))
        c.source_weights = detail::parse_list<double>(*v, d);
    if (const auto *v = get("scenario.noise_variance")) c.noise_variance = d(*v);
    if (const auto *v = get("scenario.num_snapshots")) c.num_snapshots = i(*v);
    if (const auto *v = get("scenario.snr_db")) c.snr_db = d(*v);
    if (const auto *v = get("geometry.num_sensors")) c.num_sensors = i(*v);
    if (const auto *v = get("geometry.spacing_ratio")) c.spacing_ratio = d(*v);
    if (const auto *v = get("geometry.positions")) c.positions = detail::parse_list<double>(*v, d);
    if (const auto *v = get("experiment.m")) c.m = i(*v);
    if (const auto *v = get("experiment.phi_mode")) c.phi_mode = phi_mode_from_string(*v);
    if (const auto *v = get("experiment.snr_grid_db"))
        c.snr_grid_db = detail::parse_list<double>(*v, d);
    if (const auto *v = get("experiment.snapshot_grid"))
        c.snapshot_grid = detail::parse_list<int>(*v, i);
    if (const auto *v = get("experiment.trials")) c.trials = i(*v);
    if (const auto *v = get("experiment.master_seed")) c.master_seed = std::stoull(*v);
    if (const auto *v = get("experiment.fix_phi")) c.fix_phi = (*v == "true" || *v == "1");
    if (const auto *v = get("experiment.noise_floor"))
        c.noise_floor = (*v == "estimated") ? NoiseFloorMode::Estimated : NoiseFloorMode::Known;
    if (const auto *v = get("experiment.variants")) {
        for (const auto &name : detail::split_list(*v)) {
            if (name == "classic") c.variants.push_back(PipelineVariant::Classic);
            else if (name == "cs") c.variants.push_back(PipelineVariant::Cs);
            else throw std::invalid_argument("config: unknown variant: " + name);
        }
    }

    if (c.angles_deg.empty()) c.angles_deg = {20.0, -50.0};
    if (c.source_weights.empty()) c.source_weights.assign(c.angles_deg.size(), 1.0);
    if (c.variants.empty())
        c.variants = {PipelineVariant::Classic, PipelineVariant::Cs};
    if (c.snr_grid_db.empty()) c.snr_grid_db = {c.snr_db};
    if (c.snapshot_grid.empty()) c.snapshot_grid = {c.num_snapshots};
    return c;
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path);
    return parse_config(in);
}

inline std::string serialize_config(const ExperimentConfig &c) {
    std::ostringstream out;
    std::function<std::string(const double &)> fd = [](const double &v) {
        return format_double(v);
    };
    std::function<std::string(const int &)> fi = [](const int &v) { return std::to_string(v); };
    std::function<std::string(const PipelineVariant &)> fv = [](const PipelineVariant &v) {
        return to_string(v);
    };
    out << "[scenario]\n";
    out << "angles_deg = " << detail::join(c.angles_deg, fd) << "\n";
    out << "source_weights = " << detail::join(c.source_weights, fd) << "\n";
    out << "noise_variance = " << format_double(c.noise_variance) << "\n";
    out << "num_snapshots = " << c.num_snapshots << "\n";
    out << "snr_db = " << format_double(c.snr_db) << "\n";
    out << "\n[geometry]\n";
    out << "num_sensors = " << c.num_sensors << "\n";
    out << "spacing_ratio = " << format_double(c.spacing_ratio) << "\n";
    if (!c.positions.empty()) out << "positions = " << detail::join(c.positions, fd) << "\n";
    out << "\n[experiment]\n";
    out << "m = " << c.m << "\n";
    out << "phi_mode = " << to_string(c.phi_mode) << "\n";
    out << "snr_grid_db = " << detail::join(c.snr_grid_db, fd) << "\n";
    out << "snapshot_grid = " << detail::join(c.snapshot_grid, fi) << "\n";
    out << "trials = " << c.trials << "\n";
    out << "master_seed = " << c.master_seed << "\n";
    out << "variants = " << detail::join(c.variants, fv) << "\n";
    out << "fix_phi = " << (c.fix_phi ? "true" : "false") << "\n";
    out << "noise_floor = " << (c.noise_floor == NoiseFloorMode::Estimated ? "estimated" : "known")
        << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Trial scheduling. Seeds are assigned per trial index before any work
// starts; threads only pick disjoint index ranges.

inline int thread_budget() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char *env = std::getenv("CSDOA_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

inline void parallel_for_trials(int trials, const std::function<void(int)> &body) {
    const int threads = std::min(thread_budget(), trials);
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int t = w; t < trials; t += threads) body(t);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) th.join();
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
}

// Seed index spaces per stream, so snapshot noise, Phi draws and lemma
// trials never collide.
constexpr std::uint64_t kSeedStreamSnapshots = 0x1000000000ULL;
constexpr std::uint64_t kSeedStreamPhi = 0x2000000000ULL;

// ---------------------------------------------------------------------------
// Sweep results

struct SweepRow {
    std::string variant;
    double snr_db = 0.0;
    int num_snapshots = 0;
    double rmse_deg = 0.0;
    double mean_xi_empirical = 0.0;
    double mean_xi_quadratic = 0.0;
    double xi_expected = 0.0;
    int trials = 0;
    int failures = 0;
    double elapsed_seconds = 0.0; // reported on stdout, kept out of the CSV
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int rooting_degree = 0;
};

inline void write_sweep_csv(const SweepResult &result, const std::string &path) {
    CsvWriter csv(path, {"variant", "snr_db", "num_snapshots", "rmse_deg", "mean_xi_empirical",
                         "mean_xi_quadratic", "xi_expected", "trials", "failures"});
    for (const auto &r : result.rows)
        csv.row({r.variant, format_double(r.snr_db), std::to_string(r.num_snapshots),
                 format_double(r.rmse_deg), format_double(r.mean_xi_empirical),
                 format_double(r.mean_xi_quadratic), format_double(r.xi_expected),
                 std::to_string(r.trials), std::to_string(r.failures)});
}

// Phi used by one trial: fresh draw per trial unless the config pins one.
inline MeasurementMatrix trial_phi(const ExperimentConfig &c, int trial) {
    const std::uint64_t idx = c.fix_phi ? 0 : static_cast<std::uint64_t>(trial);
    return draw_validated_measurement_matrix(
        c.num_sources(), c.num_sensors, c.m, c.phi_mode,
        derive_seed(c.master_seed, kSeedStreamPhi + idx));
}

// ---------------------------------------------------------------------------
// Example-1 style run: per-trial estimates plus the root constellation.

struct Example1Outputs {
    SweepResult sweep;
    std::vector<double> mean_angles_classic;
    std::vector<double> mean_angles_cs;
};

inline Example1Outputs run_example1(const ExperimentConfig &config, const std::string &out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const ArrayGeometry geometry = config.geometry();
    const SourceScenario scenario = config.scenario_at(config.snr_db, config.num_snapshots);
    const int num_sources = config.num_sources();

    struct TrialOut {
        std::map<std::string, DoaEstimate> estimates;
        std::map<std::string, bool> failed;
    };
    std::vector<TrialOut> outs(config.trials);

    const auto start = std::chrono::steady_clock::now();
    parallel_for_trials(config.trials, [&](int trial) {
        const SnapshotMatrix x = synthesize_snapshots(
            scenario, geometry, derive_seed(config.master_seed, kSeedStreamSnapshots + trial));
        for (PipelineVariant variant : config.variants) {
            const std::string name = to_string(variant);
            try {
                std::optional<MeasurementMatrix> phi;
                if (variant == PipelineVariant::Cs) phi = trial_phi(config, trial);
                outs[trial].estimates[name] =
                    estimate_doa(x, num_sources, variant, phi, geometry);
                outs[trial].failed[name] = false;
            } catch (const std::runtime_error &) {
                outs[trial].failed[name] = true;
            }
        }
    });
    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();

    std::vector<double> truth = config.angles_deg;
    std::sort(truth.begin(), truth.end());

    CsvWriter est_csv(out_dir + "/example1_estimates.csv",
                      {"trial", "variant", "source_index", "angle_deg", "failed"});
    CsvWriter roots_csv(out_dir + "/example1_roots.csv",
                        {"trial", "variant", "root_re", "root_im", "selected"});

    Example1Outputs result;
    result.sweep.rooting_degree = 2 * (geometry.num_sensors - 1);
    for (PipelineVariant variant : config.variants) {
        const std::string name = to_string(variant);
        SweepRow row;
        row.variant = name;
        row.snr_db = config.snr_db;
        row.num_snapshots = config.num_snapshots;
        row.trials = config.trials;
        row.elapsed_seconds = elapsed;

        std::vector<double> mean_angles(num_sources, 0.0);
        double sq_sum = 0.0;
        int ok = 0;
        for (int trial = 0; trial < config.trials; ++trial) {
            if (outs[trial].failed.at(name)) {
                ++row.failures;
                est_csv.row({std::to_string(trial), name, "0", "nan", "1"});
                continue;
            }
            const DoaEstimate &est = outs[trial].estimates.at(name);
            const auto errs = matched_squared_errors(est.angles_deg, truth);
            for (double e : errs) sq_sum += e;
            for (int s = 0; s < num_sources; ++s) {
                mean_angles[s] += est.angles_deg[s];
                est_csv.row({std::to_string(trial), name, std::to_string(s),
                             format_double(est.angles_deg[s]), "0"});
            }
            for (const Complex &z : est.all_roots) {
                const bool selected =
                    std::find_if(est.selected_roots.begin(), est.selected_roots.end(),
                                 [&](const Complex &w) { return std::abs(w - z) < 1e-12; }) !=
                    est.selected_roots.end();
                roots_csv.row({std::to_string(trial), name, format_double(z.real()),
                               format_double(z.imag()), selected ? "1" : "0"});
            }
            ++ok;
        }
        if (ok > 0) {
            row.rmse_deg = std::sqrt(sq_sum / (static_cast<double>(ok) * num_sources));
            for (double &a : mean_angles) a /= ok;
        }
        if (variant == PipelineVariant::Classic) result.mean_angles_classic = mean_angles;
        else result.mean_angles_cs = mean_angles;
        result.sweep.rows.push_back(row);
    }
    return result;
}

// ---------------------------------------------------------------------------
// RMSE vs SNR sweep.

inline SweepResult run_rmse_sweep(const ExperimentConfig &config, const std::string &out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const ArrayGeometry geometry = config.geometry();
    const int num_sources = config.num_sources();
    std::vector<double> truth = config.angles_deg;
    std::sort(truth.begin(), truth.end());

    SweepResult result;
    result.rooting_degree = 2 * (geometry.num_sensors - 1);

    for (double snr : config.snr_grid_db) {
        const SourceScenario scenario = config.scenario_at(snr, config.num_snapshots);
        struct TrialErr {
            double sq = 0.0;
            bool failed = false;
        };
        std::map<std::string, std::vector<TrialErr>> per_variant;
        for (PipelineVariant v : config.variants)
            per_variant[to_string(v)].resize(config.trials);

        const auto start = std::chrono::steady_clock::now();
        parallel_for_trials(config.trials, [&](int trial) {
            const SnapshotMatrix x = synthesize_snapshots(
                scenario, geometry,
                derive_seed(config.master_seed, kSeedStreamSnapshots + trial));
            for (PipelineVariant variant : config.variants) {
                auto &slot = per_variant[to_string(variant)][trial];
                try {
                    std::optional<MeasurementMatrix> phi;
                    if (variant == PipelineVariant::Cs) phi = trial_phi(config, trial);
                    const DoaEstimate est =
                        estimate_doa(x, num_sources, variant, phi, geometry);
                    for (double e : matched_squared_errors(est.angles_deg, truth)) slot.sq += e;
                } catch (const std::runtime_error &) {
                    slot.failed = true;
                }
            }
        });
        const double elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();

        for (PipelineVariant variant : config.variants) {
            const auto &errs = per_variant[to_string(variant)];
            SweepRow row;
            row.variant = to_string(variant);
            row.snr_db = snr;
            row.num_snapshots = config.num_snapshots;
            row.trials = config.trials;
            row.elapsed_seconds = elapsed;
            double sq = 0.0;
            int ok = 0;
            for (const auto &e : errs) {
                if (e.failed) ++row.failures;
                else { sq += e.sq; ++ok; }
            }
            if (ok > 0) row.rmse_deg = std::sqrt(sq / (static_cast<double>(ok) * num_sources));
            result.rows.push_back(row);
        }
    }

    write_sweep_csv(result, out_dir + "/rmse_sweep.csv");
    std::vector<SvgSeries> series;
    for (PipelineVariant v : config.variants) {
        SvgSeries s;
        s.label = to_string(v);
        for (const auto &row : result.rows)
            if (row.variant == to_string(v)) {
                s.x.push_back(row.snr_db);
                s.y.push_back(row.rmse_deg);
            }
        series.push_back(std::move(s));
    }
    write_svg_chart(out_dir + "/rmse_sweep_rmse_vs_snr.svg", "RMSE vs SNR", "SNR (dB)",
                    "RMSE (deg)", series, /*log_y=*/true);
    return result;
}

// ---------------------------------------------------------------------------
// Subspace deviation sweep over (SNR, T).

inline SweepResult run_deviation_sweep(const ExperimentConfig &config,
                                       const std::string &out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const ArrayGeometry geometry = config.geometry();

    SweepResult result;
    result.rooting_degree = 2 * (geometry.num_sensors - 1);

    for (int t : config.snapshot_grid) {
        for (double snr : config.snr_grid_db) {
            const SourceScenario scenario = config.scenario_at(snr, t);
            for (PipelineVariant variant : config.variants) {
                std::vector<DeviationReport> reports(config.trials);
                std::vector<char> failed(config.trials, 0);

                const auto start = std::chrono::steady_clock::now();
                parallel_for_trials(config.trials, [&](int trial) {
                    const MeasurementMatrix phi =
                        variant == PipelineVariant::Cs
                            ? trial_phi(config, trial)
                            : MeasurementMatrix::identity(config.num_sensors);
                    try {
                        reports[trial] = deviation_trial(
                            scenario, geometry, phi,
                            derive_seed(config.master_seed, kSeedStreamSnapshots + trial),
                            config.noise_floor);
                    } catch (const std::exception &) {
                        failed[trial] = 1;
                    }
                });
                const double elapsed = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();

                SweepRow row;
                row.variant = to_string(variant);
                row.snr_db = snr;
                row.num_snapshots = t;
                row.trials = config.trials;
                row.elapsed_seconds = elapsed;
                int ok = 0;
                for (int trial = 0; trial < config.trials; ++trial) {
                    if (failed[trial]) { ++row.failures; continue; }
                    row.mean_xi_empirical += reports[trial].xi_empirical;
                    row.mean_xi_quadratic += reports[trial].xi_quadratic;
                    row.xi_expected += reports[trial].xi_expected;
                    ++ok;
                }
                if (ok > 0) {
                    row.mean_xi_empirical /= ok;
                    row.mean_xi_quadratic /= ok;
                    row.xi_expected /= ok;
                }
                result.rows.push_back(row);
            }
        }
    }

    write_sweep_csv(result, out_dir + "/deviation_sweep.csv");
    std::vector<SvgSeries> series;
    for (int t : config.snapshot_grid)
        for (PipelineVariant v : config.variants) {
            SvgSeries s;
            s.label = to_string(v) + " T=" + std::to_string(t);
            for (const auto &row : result.rows)
                if (row.variant == to_string(v) && row.num_snapshots == t) {
                    s.x.push_back(row.snr_db);
                    s.y.push_back(row.mean_xi_empirical);
                }
            series.push_back(std::move(s));
        }
    write_svg_chart(out_dir + "/deviation_sweep_xi_vs_snr.svg", "Subspace deviation vs SNR",
                    "SNR (dB)", "mean xi (empirical)", series, /*log_y=*/true);
    return result;
}

// ---------------------------------------------------------------------------
// Timing: eigendecomposition wall-clock at sizes m and N, plus the full
// pipeline per variant. Medians over repeated runs.

struct TimingReport {
    double eig_seconds_full = 0.0;       // N x N
    double eig_seconds_compressed = 0.0; // m x m
    double eig_speedup = 0.0;
    double pipeline_seconds_classic = 0.0;
    double pipeline_seconds_cs = 0.0;
    int rooting_degree = 0;
};

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

inline TimingReport run_timing(const ExperimentConfig &config, const std::string &out_dir,
                               int repeats = 25) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const ArrayGeometry geometry = config.geometry();
    const SourceScenario scenario = config.scenario_at(config.snr_db, config.num_snapshots);
    const SnapshotMatrix x =
        synthesize_snapshots(scenario, geometry, derive_seed(config.master_seed, 0));
    const MeasurementMatrix phi = trial_phi(config, 0);
    const SnapshotMatrix y = compress(phi, x);
    const CovarianceMatrix r_full = sample_covariance(x);
    const CovarianceMatrix r_small = sample_covariance(y);

    auto time_median = [&](const std::function<void()> &f) {
        std::vector<double> samples;
        for (int rep = 0; rep < repeats; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            f();
            samples.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return median_of(samples);
    };

    TimingReport rep;
    rep.rooting_degree = 2 * (geometry.num_sensors - 1);
    rep.eig_seconds_full = time_median([&] { eigendecompose_hermitian(r_full); });
    rep.eig_seconds_compressed = time_median([&] { eigendecompose_hermitian(r_small); });
    rep.eig_speedup = rep.eig_seconds_full / std::max(rep.eig_seconds_compressed, 1e-12);
    rep.pipeline_seconds_classic = time_median([&] {
        estimate_doa(x, config.num_sources(), PipelineVariant::Classic, std::nullopt, geometry);
    });
    rep.pipeline_seconds_cs = time_median([&] {
        estimate_doa(x, config.num_sources(), PipelineVariant::Cs, phi, geometry);
    });

    // Measured wall-clock goes to a plain-text report; the CSV carries only
    // seed-determined fields so CSV outputs stay byte-identical across runs.
    CsvWriter csv(out_dir + "/timing.csv", {"stage", "size", "rooting_degree"});
    csv.row({"eigendecomposition_full", std::to_string(geometry.num_sensors),
             std::to_string(rep.rooting_degree)});
    csv.row({"eigendecomposition_compressed", std::to_string(config.m),
             std::to_string(rep.rooting_degree)});
    csv.row({"pipeline_classic", std::to_string(geometry.num_sensors),
             std::to_string(rep.rooting_degree)});
    csv.row({"pipeline_cs", std::to_string(config.m), std::to_string(rep.rooting_degree)});

    std::ofstream txt(out_dir + "/timing_report.txt");
    txt << "eigendecomposition " << geometry.num_sensors << "x" << geometry.num_sensors
        << ": " << rep.eig_seconds_full << " s (median of " << repeats << ")\n";
    txt << "eigendecomposition " << config.m << "x" << config.m << ": "
        << rep.eig_seconds_compressed << " s (median of " << repeats << ")\n";
    txt << "eigendecomposition speedup: " << rep.eig_speedup << "x\n";
    txt << "pipeline classic: " << rep.pipeline_seconds_classic << " s\n";
    txt << "pipeline cs: " << rep.pipeline_seconds_cs << " s\n";
    txt << "rooting degree (both variants): " << rep.rooting_degree << "\n";
    return rep;
}

} // namespace csdoa

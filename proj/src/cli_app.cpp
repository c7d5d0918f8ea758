#include "almi/cli_app.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "almi/benchmarks.hpp"
#include "almi/parallel.hpp"
#include "almi/rng.hpp"
#include "almi/smoothing.hpp"
#include "almi/stats.hpp"
#include "almi/trace_io.hpp"

namespace almi::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalid = 2;

OptimizerConfig config_from_overrides(const nlohmann::json& j) {
    OptimizerConfig cfg;
    if (j.contains("swarm_size")) cfg.swarm_size = j.at("swarm_size").get<int>();
    if (j.contains("memory_size")) cfg.memory_size = j.at("memory_size").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("flip_individual_signs"))
        cfg.flip_individual_signs = j.at("flip_individual_signs").get<bool>();
    if (j.contains("inertia")) cfg.baseline_pso_params.inertia = j.at("inertia").get<double>();
    if (j.contains("c1")) cfg.baseline_pso_params.c1 = j.at("c1").get<double>();
    if (j.contains("c2")) cfg.baseline_pso_params.c2 = j.at("c2").get<double>();
    if (j.contains("history_spacing_fraction"))
        cfg.history_spacing_fraction = j.at("history_spacing_fraction").get<double>();
    if (j.contains("stagnation_generations"))
        cfg.stagnation_generations = j.at("stagnation_generations").get<int>();
    if (j.contains("weight_functions")) {
        cfg.weight_functions.clear();
        for (const auto& name : j.at("weight_functions")) {
            const std::string n = name.get<std::string>();
            if (n == "inv_exp")
                cfg.weight_functions.push_back(WeightFunctionSpec::inverse_exponential());
            else if (n == "inv_cubic")
                cfg.weight_functions.push_back(WeightFunctionSpec::inverse_cubic());
            else
                throw std::invalid_argument("unknown weight function: " + n);
        }
    }
    return cfg;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.functions = j.at("functions").get<std::vector<std::string>>();
    for (const auto& entry : j.at("algorithms")) {
        AlgorithmSpec algo;
        if (entry.is_string()) {
            algo.id = entry.get<std::string>();
        } else {
            algo.id = entry.at("id").get<std::string>();
            algo.config = config_from_overrides(entry);
            if (entry.contains("label")) algo.label = entry.at("label").get<std::string>();
        }
        if (algo.label.empty()) algo.label = algo.id;
        cfg.algorithms.push_back(std::move(algo));
    }
    if (j.contains("dimension")) cfg.dimension = j.at("dimension").get<int>();
    if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
    if (j.contains("budget")) cfg.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("threshold")) cfg.threshold = j.at("threshold").get<double>();
    if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("rotation_seed")) cfg.rotation_seed = j.at("rotation_seed").get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (functions.empty()) throw std::invalid_argument("config: no functions listed");
    if (algorithms.empty()) throw std::invalid_argument("config: no algorithms listed");
    if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (dimension < 1) throw std::invalid_argument("config: dimension must be >= 1");
    if (!(threshold > 0.0)) throw std::invalid_argument("config: threshold must be positive");

    std::set<std::string> labels;
    for (const AlgorithmSpec& algo : algorithms) {
        if (algo.id != "almi" && algo.id != "baseline-pso")
            throw std::invalid_argument("config: unknown algorithm id: " + algo.id);
        if (!labels.insert(algo.label).second)
            throw std::invalid_argument("config: duplicate algorithm label: " + algo.label);
    }
    for (const std::string& fn : functions)
        bench::parse_benchmark_id(fn, dimension, rotation_seed); // throws on unknown ids
}

std::uint64_t ExperimentConfig::run_seed(const std::string& function_id,
                                         const std::string& algorithm_label,
                                         int run_index) const {
    return base_seed ^
           fnv1a_hash(function_id + "|" + algorithm_label + "|" + std::to_string(run_index));
}

namespace {

struct BenchTask {
    std::size_t function_index = 0;
    std::size_t algorithm_index = 0;
    int run_index = 0;
};

struct TaskOutcome {
    bool failed = false;
    std::string error;
    RunSummary summary;
    OptimizerConfig config;
};

std::string sanitize_filename(std::string name) {
    for (char& c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return name;
}

int cmd_bench(const std::string& config_path, const std::string& out_override, unsigned jobs) {
    ExperimentConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
        nlohmann::json j;
        in >> j;
        config = ExperimentConfig::from_json(j);
        if (!out_override.empty()) config.output_dir = out_override;
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "bench: invalid config: " << e.what() << "\n";
        return kExitInvalid;
    }

    const fs::path out_dir(config.output_dir);
    const fs::path trace_dir = out_dir / "traces";
    std::error_code ec;
    fs::create_directories(trace_dir, ec);
    if (ec) {
        std::cerr << "bench: cannot create output directory: " << ec.message() << "\n";
        return kExitInvalid;
    }

    std::vector<BenchTask> tasks;
    for (std::size_t fi = 0; fi < config.functions.size(); ++fi)
        for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai)
            for (int run = 0; run < config.runs; ++run) tasks.push_back({fi, ai, run});

    std::vector<TaskOutcome> outcomes(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t task_index) {
        const BenchTask& task = tasks[task_index];
        TaskOutcome& outcome = outcomes[task_index];
        const std::string& function_id = config.functions[task.function_index];
        const AlgorithmSpec& algo = config.algorithms[task.algorithm_index];
        try {
            const std::uint64_t seed =
                config.run_seed(function_id, algo.label, task.run_index);
            const bench::BenchmarkId id =
                bench::parse_benchmark_id(function_id, config.dimension, config.rotation_seed);
            const ObjectiveFunction objective = bench::make_objective(id, seed ^ 0x9e3779b97f4a7c15ull);

            OptimizerConfig run_cfg = algo.config;
            run_cfg.seed = seed;
            run_cfg.max_evaluations = config.budget;
            run_cfg.success_threshold = config.threshold;
            outcome.config = run_cfg;
            outcome.summary = algo.id == "baseline-pso" ? baseline_pso(objective, run_cfg)
                                                        : optimize(objective, run_cfg);
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
        }
    });

    // Traces, then per-cell aggregation in task order (deterministic bytes).
    std::vector<stats::AggregateReport> reports;
    for (std::size_t fi = 0; fi < config.functions.size(); ++fi) {
        for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
            std::vector<RunSummary> cell;
            for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
                if (tasks[ti].function_index != fi || tasks[ti].algorithm_index != ai) continue;
                const TaskOutcome& outcome = outcomes[ti];
                const std::string stem = sanitize_filename(
                    config.functions[fi] + "_" + config.algorithms[ai].label + "_run" +
                    std::to_string(tasks[ti].run_index));
                if (outcome.failed) {
                    std::cerr << "bench: run failed (" << stem << "): " << outcome.error << "\n";
                    continue;
                }
                {
                    std::ofstream trace_csv(trace_dir / (stem + ".csv"));
                    write_trace_csv(trace_csv, outcome.summary);
                }
                {
                    std::ofstream trace_json(trace_dir / (stem + ".json"));
                    trace_json << run_to_json(outcome.config, outcome.summary).dump(2) << "\n";
                }
                cell.push_back(outcome.summary);
            }
            if (cell.empty()) continue;
            stats::AggregateReport report = stats::aggregate(cell, config.threshold, 0.0);
            report.function_id = config.functions[fi];
            report.algorithm_id = config.algorithms[ai].label;
            reports.push_back(std::move(report));
        }
    }
    stats::rank_table(reports);

    {
        std::ofstream report_csv(out_dir / "report.csv");
        stats::write_report_csv(report_csv, reports);
    }
    {
        std::ofstream report_md(out_dir / "report.md");
        report_md << stats::report_markdown(reports);
    }
    std::cout << "bench: wrote " << reports.size() << " report cells to " << out_dir.string()
              << "\n";
    return 0;
}

int cmd_stats(const std::vector<std::string>& report_paths, const std::string& out_path) {
    struct ReportSet {
        std::string name;
        std::vector<stats::AggregateReport> reports;
        std::vector<std::string> functions;  // first-seen order
        std::vector<std::string> algorithms; // sorted
    };

    std::vector<ReportSet> sets;
    try {
        for (const std::string& path : report_paths) {
            std::ifstream in(path);
            if (!in) throw std::invalid_argument("cannot open report: " + path);
            ReportSet set;
            set.name = fs::path(path).stem().string();
            set.reports = stats::read_report_csv(in);
            if (set.reports.empty()) throw std::invalid_argument("empty report: " + path);
            stats::rank_table(set.reports);
            std::set<std::string> algos;
            for (const auto& r : set.reports) {
                if (std::find(set.functions.begin(), set.functions.end(), r.function_id) ==
                    set.functions.end())
                    set.functions.push_back(r.function_id);
                algos.insert(r.algorithm_id);
            }
            set.algorithms.assign(algos.begin(), algos.end());
            sets.push_back(std::move(set));
        }
        for (std::size_t i = 1; i < sets.size(); ++i)
            if (sets[i].algorithms != sets[0].algorithms)
                throw std::invalid_argument("algorithm sets differ between reports");
    } catch (const std::exception& e) {
        std::cerr << "stats: " << e.what() << "\n";
        return kExitInvalid;
    }

    auto cell = [](const ReportSet& set, const std::string& fn,
                   const std::string& algo) -> const stats::AggregateReport* {
        for (const auto& r : set.reports)
            if (r.function_id == fn && r.algorithm_id == algo) return &r;
        return nullptr;
    };

    std::ostringstream out;
    out << "## Friedman test on FV\n\n|Function set|Statistic|p-value|\n|---|---|---|\n";
    for (const ReportSet& set : sets) {
        std::vector<std::vector<double>> matrix;
        for (const std::string& fn : set.functions) {
            std::vector<double> row;
            for (const std::string& algo : set.algorithms) {
                const stats::AggregateReport* r = cell(set, fn, algo);
                if (!r) {
                    std::cerr << "stats: missing cell " << fn << "/" << algo << "\n";
                    return kExitInvalid;
                }
                row.push_back(r->fv);
            }
            matrix.push_back(std::move(row));
        }
        char stat_buf[32], p_buf[32];
        const stats::TestResult result = stats::friedman_test(matrix);
        std::snprintf(stat_buf, sizeof stat_buf, "%.3f", result.statistic);
        std::snprintf(p_buf, sizeof p_buf, "%.3g", result.p_value);
        out << '|' << set.name << " - FV|" << stat_buf << '|' << p_buf << "|\n";
    }
    out << '\n';

    if (sets.size() > 1) {
        out << "## Wilcoxon signed-rank on ranks\n\n|Comparison|Statistic|p-value|\n|---|---|---|\n";
        for (std::size_t a = 0; a < sets.size(); ++a) {
            for (std::size_t b = a + 1; b < sets.size(); ++b) {
                if (sets[a].functions.size() != sets[b].functions.size()) {
                    std::cerr << "stats: function counts differ between " << sets[a].name
                              << " and " << sets[b].name << "\n";
                    return kExitInvalid;
                }
                for (const std::string& algo : sets[a].algorithms) {
                    std::vector<double> ranks_a, ranks_b;
                    for (std::size_t fi = 0; fi < sets[a].functions.size(); ++fi) {
                        ranks_a.push_back(static_cast<double>(
                            *cell(sets[a], sets[a].functions[fi], algo)->rank));
                        ranks_b.push_back(static_cast<double>(
                            *cell(sets[b], sets[b].functions[fi], algo)->rank));
                    }
                    const stats::TestResult result = stats::wilcoxon_signed_rank(ranks_a, ranks_b);
                    char stat_buf[32], p_buf[32];
                    std::snprintf(stat_buf, sizeof stat_buf, "%.1f", result.statistic);
                    std::snprintf(p_buf, sizeof p_buf, "%.4g", result.p_value);
                    out << '|' << sets[a].name << " vs. " << sets[b].name << " (" << algo << ")|"
                        << stat_buf << '|' << p_buf
                        << (result.degenerate ? " (identical ranks)|" : "|") << '\n';
                }
            }
        }
        out << '\n';
    }

    std::cout << out.str();
    if (!out_path.empty()) {
        std::ofstream file(out_path);
        if (!file) {
            std::cerr << "stats: cannot write " << out_path << "\n";
            return kExitInvalid;
        }
        file << out.str();
    }
    return 0;
}

int cmd_fit(const std::string& series_path, const std::string& kind_name, int window, int horizon,
            const std::string& metric_name, double grid_resolution, int season_length,
            std::uint64_t seed, std::uint64_t budget, const std::string& out_dir,
            bool resample, int resample_n, double resample_amplitude, double resample_period,
            double resample_noise_sd) {
    std::vector<double> series;
    smooth::ModelKind kind;
    smooth::Metric metric;
    try {
        kind = smooth::parse_kind(kind_name);
        metric = smooth::parse_metric(metric_name);
        std::ifstream in(series_path);
        if (!in) throw std::invalid_argument("cannot open series: " + series_path);
        series = read_series_csv(in);
        if (series.empty()) throw std::invalid_argument("series is empty: " + series_path);
        smooth::SmoothingSpec probe;
        probe.kind = kind;
        probe.params.assign(static_cast<std::size_t>(probe.parameter_count()), 0.5);
        probe.season_length = season_length;
        // Surface window/horizon/series-length problems before fitting.
        smooth::forecast_loss(probe, series, window, horizon, metric);
    } catch (const std::exception& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInvalid;
    }

    OptimizerConfig optimizer_cfg;
    optimizer_cfg.seed = seed;
    optimizer_cfg.max_evaluations = budget;

    smooth::SeriesResampler resampler;
    if (resample)
        resampler = [=](std::uint64_t evaluation_index) {
            return smooth::synth_sinusoid(resample_n, resample_amplitude, resample_period,
                                          resample_noise_sd, seed + evaluation_index + 1);
        };

    try {
        const smooth::FitResult fitted =
            smooth::fit_parameters(kind, series, window, horizon, metric, optimizer_cfg,
                                   season_length, resampler);
        const smooth::FitResult grid = smooth::grid_search_fit(kind, series, window, horizon,
                                                               metric, grid_resolution,
                                                               season_length);

        auto show = [&](const char* name, const smooth::FitResult& r) {
            std::cout << name << ": loss=" << r.loss << " evaluations=" << r.evaluations
                      << " params=[";
            for (std::size_t i = 0; i < r.spec.params.size(); ++i)
                std::cout << (i ? ", " : "") << r.spec.params[i];
            std::cout << "]\n";
        };
        std::cout << "model=" << smooth::kind_name(kind) << " metric=" << metric_name
                  << " window=" << window << " horizon=" << horizon << "\n";
        show("optimizer", fitted);
        show("grid", grid);

        nlohmann::json fitted_json = {{"kind", smooth::kind_name(kind)},
                                      {"params", fitted.spec.params},
                                      {"season_length", fitted.spec.season_length},
                                      {"loss", fitted.loss},
                                      {"metric", metric_name}};
        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            {
                std::ofstream spec_file(fs::path(out_dir) / "fitted_spec.json");
                spec_file << fitted_json.dump(2) << "\n";
            }
            {
                std::ofstream forecast_csv(fs::path(out_dir) / "forecasts.csv");
                forecast_csv << "index,actual,predicted\r\n";
                for (const smooth::OriginForecast& f :
                     smooth::rolling_forecasts(fitted.spec, series, window, horizon))
                    forecast_csv << f.target_index << ',' << f.actual << ',' << f.predicted
                                 << "\r\n";
            }
            const int d = fitted.spec.parameter_count();
            if (d <= 2) {
                // gnuplot-ready loss surface on the grid lattice.
                std::ofstream surface(fs::path(out_dir) / "loss_surface.dat");
                const int per_axis =
                    static_cast<int>(std::floor(1.0 / grid_resolution + 1e-9)) + 1;
                for (int i = 0; i < per_axis; ++i) {
                    const double a = std::min(1.0, i * grid_resolution);
                    if (d == 1) {
                        smooth::SmoothingSpec spec{kind, {a}, season_length};
                        surface << a << ' '
                                << smooth::forecast_loss(spec, series, window, horizon, metric)
                                << '\n';
                    } else {
                        for (int j = 0; j < per_axis; ++j) {
                            const double b = std::min(1.0, j * grid_resolution);
                            smooth::SmoothingSpec spec{kind, {a, b}, season_length};
                            surface << a << ' ' << b << ' '
                                    << smooth::forecast_loss(spec, series, window, horizon,
                                                             metric)
                                    << '\n';
                        }
                        surface << '\n';
                    }
                }
            }
            std::cout << "fit: artifacts written to " << out_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}

int cmd_synth(int n, double amplitude, double period, double noise_sd, std::uint64_t seed,
              const std::string& out_path) {
    try {
        const std::vector<double> series =
            smooth::synth_sinusoid(n, amplitude, period, noise_sd, seed);
        if (out_path.empty() || out_path == "-") {
            write_series_csv(std::cout, series);
        } else {
            const fs::path path(out_path);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            std::ofstream out(path);
            if (!out) throw std::invalid_argument("cannot write " + out_path);
            write_series_csv(out, series);
            std::cout << "synth: wrote " << series.size() << " points to " << out_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"History-informed particle swarm optimizer, benchmark harness, and "
                 "exponential-smoothing fitter"};
    app.require_subcommand(1);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run a seeded benchmark experiment");
    std::string config_path;
    std::string bench_out;
    unsigned jobs = default_jobs();
    bench_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    bench_cmd->add_option("--out", bench_out, "Output directory (overrides config)");
    bench_cmd->add_option("--jobs", jobs, "Worker threads");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Friedman / Wilcoxon analysis of reports");
    std::vector<std::string> report_paths;
    std::string stats_out;
    stats_cmd->add_option("reports", report_paths, "Aggregate report CSVs")->required();
    stats_cmd->add_option("--out", stats_out, "Write the tables to this file");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit smoothing parameters to a series");
    std::string series_path, fit_kind = "ses", fit_metric = "rmse", fit_out;
    int window = 50, horizon = 1, season_length = 0;
    double grid_resolution = 0.05;
    std::uint64_t fit_seed = 1, fit_budget = 0;
    bool resample = false;
    int resample_n = 200;
    double resample_amplitude = 1.0, resample_period = 25.0, resample_noise_sd = 0.1;
    fit_cmd->add_option("series", series_path, "Series CSV (single column)")->required();
    fit_cmd->add_option("--kind", fit_kind, "ses | holt | holt-winters");
    fit_cmd->add_option("--window", window, "Rolling window length");
    fit_cmd->add_option("--horizon", horizon, "Forecast horizon");
    fit_cmd->add_option("--metric", fit_metric, "mape | rmse");
    fit_cmd->add_option("--grid-resolution", grid_resolution, "Grid lattice step");
    fit_cmd->add_option("--season-length", season_length, "Season length (holt-winters)");
    fit_cmd->add_option("--seed", fit_seed, "Optimizer seed");
    fit_cmd->add_option("--budget", fit_budget, "Optimizer evaluation budget (0 = 10000*d)");
    fit_cmd->add_option("--out", fit_out, "Directory for fit artifacts");
    fit_cmd->add_flag("--resample", resample,
                      "Redraw the sinusoid noise on every loss evaluation");
    fit_cmd->add_option("--n", resample_n, "Resampled series length");
    fit_cmd->add_option("--amplitude", resample_amplitude, "Resampled sinusoid amplitude");
    fit_cmd->add_option("--period", resample_period, "Resampled sinusoid period");
    fit_cmd->add_option("--noise-sd", resample_noise_sd, "Resampled noise std dev");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded noisy sinusoid CSV");
    int synth_n = 200;
    double synth_amplitude = 1.0, synth_period = 25.0, synth_noise_sd = 0.1;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    synth_cmd->add_option("--n", synth_n, "Series length");
    synth_cmd->add_option("--amplitude", synth_amplitude, "Sinusoid amplitude");
    synth_cmd->add_option("--period", synth_period, "Sinusoid period");
    synth_cmd->add_option("--noise-sd", synth_noise_sd, "Gaussian noise std dev");
    synth_cmd->add_option("--seed", synth_seed, "Noise seed");
    synth_cmd->add_option("--out", synth_out, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    if (bench_cmd->parsed()) return cmd_bench(config_path, bench_out, jobs);
    if (stats_cmd->parsed()) return cmd_stats(report_paths, stats_out);
    if (fit_cmd->parsed())
        return cmd_fit(series_path, fit_kind, window, horizon, fit_metric, grid_resolution,
                       season_length, fit_seed, fit_budget, fit_out, resample, resample_n,
                       resample_amplitude, resample_period, resample_noise_sd);
    if (synth_cmd->parsed())
        return cmd_synth(synth_n, synth_amplitude, synth_period, synth_noise_sd, synth_seed,
                         synth_out);
    return kExitInvalid;
}

} // namespace almi::cli

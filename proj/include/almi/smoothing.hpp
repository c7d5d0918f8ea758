#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "almi/optimizer.hpp"

namespace almi::smooth {

enum class ModelKind { Single, Double, Triple };

/// Fitted smoothing model: alpha, optionally beta (trend) and gamma
/// (seasonality, with season_length >= 2).
struct SmoothingSpec {
    ModelKind kind = ModelKind::Single;
    std::vector<double> params;
    int season_length = 0;

    int parameter_count() const;
    void validate(std::size_t series_length) const;
};

enum class Metric { Mape, Rmse };

/// S_t = alpha * x_t + (1 - alpha) * S_{t-1}, seeded with s0.
std::vector<double> ses_smooth(const std::vector<double>& series, double alpha, double s0);

struct HoltResult {
    std::vector<double> level;
    std::vector<double> trend;
    std::vector<double> forecasts;
};

/// Additive trend smoothing. Level starts at the first observation, trend at
/// the first difference; forecast h steps out is level + h * trend.
HoltResult holt_forecast(const std::vector<double>& series, double alpha, double beta,
                         int horizon);

/// Additive Holt-Winters. Seasonal state is initialized to the first
/// season's deviations from its mean; needs at least two full seasons.
std::vector<double> holt_winters_forecast(const std::vector<double>& series, double alpha,
                                          double beta, double gamma, int season_length,
                                          int horizon);

/// One rolling-origin prediction: series[target_index] vs the model's
/// horizon-step forecast from the window ending just before the origin.
struct OriginForecast {
    std::size_t target_index = 0;
    double actual = 0.0;
    double predicted = 0.0;
};

/// All rolling-origin forecasts: one per origin from window_length to
/// series length - horizon, each refit on the trailing window.
std::vector<OriginForecast> rolling_forecasts(const SmoothingSpec& spec,
                                              const std::vector<double>& series,
                                              int window_length, int horizon);

/// Rolling-origin loss over the forecasts above.
double forecast_loss(const SmoothingSpec& spec, const std::vector<double>& series,
                     int window_length, int horizon, Metric metric);

struct FitResult {
    SmoothingSpec spec;
    double loss = 0.0;
    std::uint64_t evaluations = 0;
};

/// Re-generates the scored series per loss evaluation, making the fit
/// objective stochastic (off by default; see fit_parameters).
using SeriesResampler = std::function<std::vector<double>(std::uint64_t evaluation_index)>;

/// Search the unit box of smoothing parameters with the history-informed
/// optimizer.
FitResult fit_parameters(ModelKind kind, const std::vector<double>& series, int window_length,
                         int horizon, Metric metric, const OptimizerConfig& optimizer_cfg,
                         int season_length = 0, const SeriesResampler& resampler = nullptr);

/// Exhaustive lattice {0, a, 2a, ...}^d baseline; evaluations are exactly
/// (floor(1/a) + 1)^d.
FitResult grid_search_fit(ModelKind kind, const std::vector<double>& series, int window_length,
                          int horizon, Metric metric, double resolution, int season_length = 0);

/// amplitude * sin(2 pi t / period) + N(0, noise_sd^2), t = 0..n-1, seeded.
std::vector<double> synth_sinusoid(int n, double amplitude, double period, double noise_sd,
                                   std::uint64_t seed);

std::string metric_name(Metric metric);
Metric parse_metric(const std::string& name);
std::string kind_name(ModelKind kind);
ModelKind parse_kind(const std::string& name);

} // namespace almi::smooth

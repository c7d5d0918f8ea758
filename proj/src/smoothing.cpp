#include "almi/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace almi::smooth {

int SmoothingSpec::parameter_count() const {
    switch (kind) {
        case ModelKind::Single: return 1;
        case ModelKind::Double: return 2;
        case ModelKind::Triple: return 3;
    }
    throw std::invalid_argument("smoothing: unknown model kind");
}

void SmoothingSpec::validate(std::size_t series_length) const {
    if (static_cast<int>(params.size()) != parameter_count())
        throw std::invalid_argument("smoothing: parameter count does not match model kind");
    for (double p : params)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("smoothing: parameters must lie in [0, 1]");
    if (kind == ModelKind::Triple) {
        if (season_length < 2)
            throw std::invalid_argument("smoothing: seasonal model needs season_length >= 2");
        if (series_length < 2 * static_cast<std::size_t>(season_length))
            throw std::invalid_argument("smoothing: series shorter than two seasons");
    } else if (kind == ModelKind::Double && series_length < 2) {
        throw std::invalid_argument("smoothing: trend model needs at least 2 observations");
    } else if (series_length < 1) {
        throw std::invalid_argument("smoothing: empty series");
    }
}

std::vector<double> ses_smooth(const std::vector<double>& series, double alpha, double s0) {
    if (series.empty()) throw std::invalid_argument("ses_smooth: empty series");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ses_smooth: alpha must lie in [0, 1]");
    if (!std::isfinite(s0)) throw std::invalid_argument("ses_smooth: s0 must be finite");

    std::vector<double> smoothed(series.size());
    double state = s0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        state = alpha * series[t] + (1.0 - alpha) * state;
        smoothed[t] = state;
    }
    return smoothed;
}

HoltResult holt_forecast(const std::vector<double>& series, double alpha, double beta,
                         int horizon) {
    if (series.size() < 2) throw std::invalid_argument("holt_forecast: need at least 2 points");
    if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("holt_forecast: parameters must lie in [0, 1]");

    HoltResult result;
    result.level.reserve(series.size());
    result.trend.reserve(series.size());

    double level = series[0];
    double trend = series[1] - series[0];
    result.level.push_back(level);
    result.trend.push_back(trend);
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double previous_level = level;
        level = alpha * series[t] + (1.0 - alpha) * (level + trend);
        trend = beta * (level - previous_level) + (1.0 - beta) * trend;
        result.level.push_back(level);
        result.trend.push_back(trend);
    }
    for (int h = 1; h <= horizon; ++h)
        result.forecasts.push_back(level + static_cast<double>(h) * trend);
    return result;
}

std::vector<double> holt_winters_forecast(const std::vector<double>& series, double alpha,
                                          double beta, double gamma, int season_length,
                                          int horizon) {
    const std::size_t m = static_cast<std::size_t>(season_length);
    if (season_length < 1) throw std::invalid_argument("holt_winters: season_length must be >= 1");
    if (series.size() < 2 * m)
        throw std::invalid_argument("holt_winters: series shorter than two seasons");
    for (double p : {alpha, beta, gamma})
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("holt_winters: parameters must lie in [0, 1]");

    double first_season_mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) first_season_mean += series[i];
    first_season_mean /= static_cast<double>(m);
    double second_season_mean = 0.0;
    for (std::size_t i = m; i < 2 * m; ++i) second_season_mean += series[i];
    second_season_mean /= static_cast<double>(m);

    std::vector<double> seasonal(series.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) seasonal[i] = series[i] - first_season_mean;

    double level = first_season_mean;
    double trend = (second_season_mean - first_season_mean) / static_cast<double>(m);
    for (std::size_t t = m; t < series.size(); ++t) {
        const double previous_level = level;
        const double previous_trend = trend;
        level = alpha * (series[t] - seasonal[t - m]) + (1.0 - alpha) * (level + trend);
        trend = beta * (level - previous_level) + (1.0 - beta) * trend;
        seasonal[t] = gamma * (series[t] - previous_level - previous_trend) +
                      (1.0 - gamma) * seasonal[t - m];
    }

    std::vector<double> forecasts;
    forecasts.reserve(horizon);
    const std::size_t last = series.size();
    for (int h = 1; h <= horizon; ++h) {
        // Index of the matching in-cycle seasonal state from the last season.
        const std::size_t season_index = last - m + ((static_cast<std::size_t>(h) - 1) % m);
        forecasts.push_back(level + static_cast<double>(h) * trend + seasonal[season_index]);
    }
    return forecasts;
}

namespace {

/// Single horizon-step forecast from a trailing window.
double window_forecast(const SmoothingSpec& spec, const std::vector<double>& window,
                       int horizon) {
    switch (spec.kind) {
        case ModelKind::Single: {
            const std::vector<double> s = ses_smooth(window, spec.params[0], window.front());
            return s.back();
        }
        case ModelKind::Double: {
            const HoltResult r = holt_forecast(window, spec.params[0], spec.params[1], horizon);
            return r.forecasts.back();
        }
        case ModelKind::Triple: {
            const std::vector<double> f =
                holt_winters_forecast(window, spec.params[0], spec.params[1], spec.params[2],
                                      spec.season_length, horizon);
            return f.back();
        }
    }
    throw std::invalid_argument("smoothing: unknown model kind");
}

int minimum_window(const SmoothingSpec& spec) {
    switch (spec.kind) {
        case ModelKind::Single: return 1;
        case ModelKind::Double: return 2;
        case ModelKind::Triple: return 2 * spec.season_length;
    }
    return 1;
}

} // namespace

std::vector<OriginForecast> rolling_forecasts(const SmoothingSpec& spec,
                                              const std::vector<double>& series,
                                              int window_length, int horizon) {
    spec.validate(static_cast<std::size_t>(window_length));
    if (horizon < 1) throw std::invalid_argument("rolling_forecasts: horizon must be >= 1");
    if (window_length < minimum_window(spec))
        throw std::invalid_argument("rolling_forecasts: window too short for the model kind");
    if (static_cast<std::size_t>(window_length + horizon) > series.size())
        throw std::invalid_argument("rolling_forecasts: series shorter than window + horizon");

    std::vector<OriginForecast> forecasts;
    std::vector<double> window(static_cast<std::size_t>(window_length));
    for (std::size_t origin = static_cast<std::size_t>(window_length);
         origin + static_cast<std::size_t>(horizon) <= series.size(); ++origin) {
        std::copy(series.begin() + (origin - window_length), series.begin() + origin,
                  window.begin());
        const std::size_t target = origin + horizon - 1;
        forecasts.push_back({target, series[target], window_forecast(spec, window, horizon)});
    }
    return forecasts;
}

double forecast_loss(const SmoothingSpec& spec, const std::vector<double>& series,
                     int window_length, int horizon, Metric metric) {
    const std::vector<OriginForecast> forecasts =
        rolling_forecasts(spec, series, window_length, horizon);

    double accumulated = 0.0;
    for (const OriginForecast& f : forecasts) {
        const double error = f.predicted - f.actual;
        if (metric == Metric::Rmse)
            accumulated += error * error;
        else
            accumulated += std::abs(error) / std::max(std::abs(f.actual), 1e-9);
    }
    const double n = static_cast<double>(forecasts.size());
    if (metric == Metric::Rmse) return std::sqrt(accumulated / n);
    return 100.0 * accumulated / n;
}

namespace {

SmoothingSpec make_spec(ModelKind kind, const std::vector<double>& params, int season_length) {
    SmoothingSpec spec;
    spec.kind = kind;
    spec.params = params;
    spec.season_length = kind == ModelKind::Triple ? season_length : 0;
    return spec;
}

} // namespace

FitResult fit_parameters(ModelKind kind, const std::vector<double>& series, int window_length,
                         int horizon, Metric metric, const OptimizerConfig& optimizer_cfg,
                         int season_length, const SeriesResampler& resampler) {
    const int d = make_spec(kind, {}, season_length).parameter_count();

    std::uint64_t evaluation_index = 0;
    ObjectiveFunction objective;
    objective.dimension = d;
    objective.lower_bounds.assign(d, 0.0);
    objective.upper_bounds.assign(d, 1.0);
    objective.stochastic = static_cast<bool>(resampler);
    objective.evaluate = [&](const std::vector<double>& params) {
        const SmoothingSpec spec = make_spec(kind, params, season_length);
        const std::vector<double> scored = resampler ? resampler(evaluation_index++) : series;
        return forecast_loss(spec, scored, window_length, horizon, metric);
    };

    const RunSummary run = optimize(objective, optimizer_cfg);

    FitResult result;
    result.spec = make_spec(kind, run.best_position, season_length);
    result.loss = run.best_fitness;
    result.evaluations = run.evaluations_used;
    return result;
}

FitResult grid_search_fit(ModelKind kind, const std::vector<double>& series, int window_length,
                          int horizon, Metric metric, double resolution, int season_length) {
    if (!(resolution > 0.0 && resolution < 1.0))
        throw std::invalid_argument("grid_search_fit: resolution must lie in (0, 1)");

    const int d = make_spec(kind, {}, season_length).parameter_count();
    const int points_per_axis = static_cast<int>(std::floor(1.0 / resolution + 1e-9)) + 1;

    FitResult best;
    best.loss = std::numeric_limits<double>::infinity();
    best.spec = make_spec(kind, std::vector<double>(d, 0.0), season_length);

    std::vector<int> index(d, 0);
    std::vector<double> params(d, 0.0);
    while (true) {
        for (int axis = 0; axis < d; ++axis)
            params[axis] = std::min(1.0, index[axis] * resolution);
        const double loss =
            forecast_loss(make_spec(kind, params, season_length), series, window_length, horizon,
                          metric);
        ++best.evaluations;
        if (loss < best.loss) {
            best.loss = loss;
            best.spec.params = params;
        }
        int axis = 0;
        while (axis < d && ++index[axis] == points_per_axis) {
            index[axis] = 0;
            ++axis;
        }
        if (axis == d) break;
    }
    return best;
}

std::vector<double> synth_sinusoid(int n, double amplitude, double period, double noise_sd,
                                   std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("synth_sinusoid: n must be >= 1");
    if (!(period > 0.0)) throw std::invalid_argument("synth_sinusoid: period must be positive");
    if (noise_sd < 0.0) throw std::invalid_argument("synth_sinusoid: noise_sd must be >= 0");

    constexpr double kTwoPi = 6.283185307179586476925286766559;
    Rng rng(seed);
    std::vector<double> series(n);
    for (int t = 0; t < n; ++t)
        series[t] = amplitude * std::sin(kTwoPi * t / period) + noise_sd * rng.normal();
    return series;
}

std::string metric_name(Metric metric) { return metric == Metric::Mape ? "mape" : "rmse"; }

Metric parse_metric(const std::string& name) {
    if (name == "mape") return Metric::Mape;
    if (name == "rmse") return Metric::Rmse;
    throw std::invalid_argument("unknown metric: " + name);
}

std::string kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Single: return "ses";
        case ModelKind::Double: return "holt";
        case ModelKind::Triple: return "holt-winters";
    }
    throw std::invalid_argument("unknown model kind");
}

ModelKind parse_kind(const std::string& name) {
    if (name == "ses" || name == "single") return ModelKind::Single;
    if (name == "holt" || name == "double") return ModelKind::Double;
    if (name == "holt-winters" || name == "hw" || name == "triple") return ModelKind::Triple;
    throw std::invalid_argument("unknown model kind: " + name);
}

} // namespace almi::smooth

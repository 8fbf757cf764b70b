#pragma once

#include <cstddef>
#include <string>

#include "glucast/network.hpp"
#include "glucast/numerics.hpp"
#include "glucast/pipeline.hpp"

namespace glucast::metrics {

// All four criteria are computed in mg/dL after inverse scaling.
struct MetricsReport {
    double rmse = 0.0;
    double cc = 0.0;
    double tl_min = 0.0;
    double fit_pct = 0.0;
    std::size_t n = 0;
    std::size_t hypo_count = 0;   // maximal runs strictly below 70 mg/dL
    std::size_t hyper_count = 0;  // maximal runs strictly above 180 mg/dL
};

double rmse(const Vec& actual, const Vec& predicted);

/// Pearson correlation. Throws NumericError when either series is
/// constant; an undefined correlation is never reported as 0.
double cc(const Vec& actual, const Vec& predicted);

/// Smallest shift s in {0,5,...,max_shift_min} minutes maximizing the
/// correlation of actual[0..N-s) with predicted[s..N): predictions that
/// lag the actual series score a positive lag.
double time_lag(const Vec& actual, const Vec& predicted, int max_shift_min);

/// (1 - rmse / rms(actual - mean)) * 100. 100 is perfect, 0 matches the
/// mean predictor, negative is worse than the mean.
double fit(const Vec& actual, const Vec& predicted);

struct ExcursionCounts {
    std::size_t hypo = 0;
    std::size_t hyper = 0;
};

/// Counts maximal runs strictly below 70 / strictly above 180.
ExcursionCounts count_excursions(const Vec& values_mgdl);

struct DatasetSummary {
    std::string dataset;
    std::size_t samples = 0;
    double mean_mgdl = 0.0;
    std::size_t hypo = 0;
    std::size_t hyper = 0;
};

DatasetSummary summarize_dataset(const pipeline::SubDataset& sub);

/// Predictions for every window, inverse-scaled to mg/dL.
Vec predict_all(const network::Model& m, const pipeline::WindowSet& ws);

/// Evaluates the model on a test WindowSet that must share the model's
/// window length, horizon, and scaler (ConfigError otherwise). The time
/// lag search runs over shifts up to twice the horizon.
MetricsReport evaluate(const network::Model& m, const pipeline::WindowSet& test);

/// Same metrics for an arbitrary prediction vector in mg/dL.
MetricsReport evaluate_predictions(const Vec& actual_mgdl, const Vec& predicted_mgdl,
                                   int ph_minutes);

}  // namespace glucast::metrics

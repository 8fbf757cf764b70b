#pragma once

#include <cstddef>
#include <cstdint>

#include "glucast/numerics.hpp"
#include "glucast/pipeline.hpp"

namespace glucast::baselines {

// AR(p) on the d-times differenced series, fitted by ordinary least
// squares with an intercept. p = 0 fits nothing at all (intercept 0), so
// (0,1,0) is exactly the random-walk / last-value model.
struct ArimaModel {
    std::size_t p = 0;
    std::size_t d = 0;           // 0 or 1
    Vec coefficients;            // lag 1..p
    double intercept = 0.0;
    bool fitted = false;
};

/// Fits on a raw mg/dL series. Requires length > p + d + 10.
ArimaModel arima_fit(const Vec& series, std::size_t p, std::size_t d);

/// Iterates the recurrence k steps past the end of `history`, feeding
/// forecasts back in; un-differences when d=1. k=0 returns the last
/// observation.
double arima_forecast(const ArimaModel& m, const Vec& history, std::size_t k);

// Linear epsilon-insensitive regression on the L lag features of a
// window, trained by deterministic full-batch subgradient descent on
//   c * sum_i max(0, |w.x_i + b - y_i| - epsilon) + ||w||^2 / 2.
struct SvrModel {
    Vec weights;
    double bias = 0.0;
    double epsilon = 0.01;  // tube half-width, scaled units
    double c = 1.0;
    bool fitted = false;
};

SvrModel svr_fit(const pipeline::WindowSet& ws, double epsilon = 0.01, double c = 1.0,
                 std::size_t epochs = 200, std::uint64_t seed = 1);

/// w.x + b in scaled units. ShapeError on length mismatch.
double svr_predict(const SvrModel& m, const Vec& window);

double svr_objective(const SvrModel& m, const pipeline::WindowSet& ws);

/// Zero-order hold: the last window value, whatever the horizon.
double naive_forecast(const Vec& window, std::size_t k);

// Per-window predictions in mg/dL over a test WindowSet, mirroring
// metrics::predict_all so baselines share the network's exact splits.
Vec arima_predict_all(const ArimaModel& m, const pipeline::WindowSet& test);
Vec svr_predict_all(const SvrModel& m, const pipeline::WindowSet& test);
Vec naive_predict_all(const pipeline::WindowSet& test);

}  // namespace glucast::baselines

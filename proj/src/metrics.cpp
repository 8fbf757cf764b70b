#include "glucast/metrics.hpp"

#include <cmath>

namespace glucast::metrics {

namespace {

void require_same_length(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(what) + ": length mismatch, " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    }
    if (a.empty()) throw InputError(std::string(what) + ": empty series");
}

double mean(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Pearson correlation over [a_begin, a_begin+n) and [b_begin, b_begin+n).
// Returns false when either slice is constant.
bool pearson(const Vec& a, std::size_t a_begin, const Vec& b, std::size_t b_begin,
             std::size_t n, double* out) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[a_begin + i];
        mb += b[b_begin + i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[a_begin + i] - ma;
        const double db = b[b_begin + i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return false;
    *out = sab / std::sqrt(saa * sbb);
    return true;
}

}  // namespace

double rmse(const Vec& actual, const Vec& predicted) {
    require_same_length(actual, predicted, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(actual.size()));
}

double cc(const Vec& actual, const Vec& predicted) {
    require_same_length(actual, predicted, "cc");
    if (actual.size() < 2) throw InputError("cc: need at least 2 samples");
    double r = 0.0;
    if (!pearson(actual, 0, predicted, 0, actual.size(), &r)) {
        throw NumericError("cc: undefined correlation, a series has zero variance");
    }
    return r;
}

double time_lag(const Vec& actual, const Vec& predicted, int max_shift_min) {
    require_same_length(actual, predicted, "time_lag");
    if (max_shift_min < 0 || max_shift_min % 5 != 0) {
        throw InputError("time_lag: max shift must be a non-negative multiple of 5 minutes");
    }
    const auto max_steps = static_cast<std::size_t>(max_shift_min / 5);
    if (actual.size() <= max_steps + 2) {
        throw InputError("time_lag: series of length " + std::to_string(actual.size()) +
                         " too short for shifts up to " + std::to_string(max_shift_min) + " min");
    }

    bool found = false;
    double best_cc = 0.0;
    std::size_t best_shift = 0;
    for (std::size_t s = 0; s <= max_steps; ++s) {
        const std::size_t n = actual.size() - s;
        double r = 0.0;
        if (!pearson(actual, 0, predicted, s, n, &r)) continue;
        if (!found || r > best_cc) {  // strict: ties keep the smaller shift
            found = true;
            best_cc = r;
            best_shift = s;
        }
    }
    if (!found) throw NumericError("time_lag: every shifted pair has zero variance");
    return static_cast<double>(best_shift) * 5.0;
}

double fit(const Vec& actual, const Vec& predicted) {
    require_same_length(actual, predicted, "fit");
    if (actual.size() < 2) throw InputError("fit: need at least 2 samples");
    const double m = mean(actual);
    double s = 0.0;
    for (double x : actual) s += (x - m) * (x - m);
    const double denom = std::sqrt(s / static_cast<double>(actual.size()));
    if (denom == 0.0) throw NumericError("fit: actual series is constant");
    return (1.0 - rmse(actual, predicted) / denom) * 100.0;
}

ExcursionCounts count_excursions(const Vec& values_mgdl) {
    ExcursionCounts counts;
    bool in_hypo = false;
    bool in_hyper = false;
    for (double v : values_mgdl) {
        const bool hypo = v < 70.0;
        const bool hyper = v > 180.0;
        if (hypo && !in_hypo) ++counts.hypo;
        if (hyper && !in_hyper) ++counts.hyper;
        in_hypo = hypo;
        in_hyper = hyper;
    }
    return counts;
}

DatasetSummary summarize_dataset(const pipeline::SubDataset& sub) {
    DatasetSummary s;
    s.dataset = sub.subject_id;
    s.samples = sub.values.size();
    s.mean_mgdl = sub.values.empty() ? 0.0 : mean(sub.values);
    const ExcursionCounts counts = count_excursions(sub.values);
    s.hypo = counts.hypo;
    s.hyper = counts.hyper;
    return s;
}

Vec predict_all(const network::Model& m, const pipeline::WindowSet& ws) {
    Vec out;
    out.reserve(ws.size());
    for (const Vec& window : ws.inputs) {
        out.push_back(m.scaler.invert(model_forward(m, window)));
    }
    return out;
}

MetricsReport evaluate(const network::Model& m, const pipeline::WindowSet& test) {
    if (test.size() == 0) throw InputError("evaluate: empty test set");
    if (test.window_len != m.window_len) {
        throw ConfigError("evaluate: window length " + std::to_string(test.window_len) +
                          " does not match the model's " + std::to_string(m.window_len));
    }
    if (test.horizon_steps != m.train_config.horizon_steps()) {
        throw ConfigError("evaluate: horizon " + std::to_string(test.ph_minutes()) +
                          " min does not match the model's " +
                          std::to_string(m.train_config.ph_minutes) + " min");
    }
    if (!(test.scaler == m.scaler)) {
        throw ConfigError("evaluate: window set was scaled with a different scaler than the model");
    }

    Vec actual;
    actual.reserve(test.size());
    for (double t : test.targets) actual.push_back(test.scaler.invert(t));
    const Vec predicted = predict_all(m, test);
    return evaluate_predictions(actual, predicted, test.ph_minutes());
}

MetricsReport evaluate_predictions(const Vec& actual_mgdl, const Vec& predicted_mgdl,
                                   int ph_minutes) {
    MetricsReport r;
    r.n = actual_mgdl.size();
    r.rmse = rmse(actual_mgdl, predicted_mgdl);
    r.cc = cc(actual_mgdl, predicted_mgdl);
    r.tl_min = time_lag(actual_mgdl, predicted_mgdl, 2 * ph_minutes);
    r.fit_pct = fit(actual_mgdl, predicted_mgdl);
    const ExcursionCounts counts = count_excursions(actual_mgdl);
    r.hypo_count = counts.hypo;
    r.hyper_count = counts.hyper;
    return r;
}

}  // namespace glucast::metrics

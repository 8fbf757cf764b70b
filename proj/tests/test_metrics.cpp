#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "glucast/metrics.hpp"

using namespace glucast;
using namespace glucast::metrics;

namespace {

// Non-periodic wave: sinusoid plus trend, so shifted copies of it are
// never perfectly correlated with the original.
Vec wavy(std::size_t n) {
    Vec v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        v[i] = 140.0 + 35.0 * std::sin(t / 9.0) + 12.0 * std::sin(t / 23.0) + 0.08 * t;
    }
    return v;
}

// predicted[i] = actual[i - s]: a prediction that lags by s steps.
Vec lagged(const Vec& actual, std::size_t s) {
    Vec out(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
        out[i] = actual[i >= s ? i - s : 0];
    }
    return out;
}

}  // namespace

TEST_CASE("rmse fixed points") {
    // Squared errors 100, 100, 0: mean 200/3.
    const Vec a = {100.0, 100.0, 100.0};
    const Vec p = {110.0, 90.0, 100.0};
    CHECK(rmse(a, p) == doctest::Approx(std::sqrt(200.0 / 3.0)).epsilon(1e-14));
    CHECK(rmse(a, p) == doctest::Approx(8.16496580927726).epsilon(1e-9));

    // Constant error of 10 everywhere.
    CHECK(rmse({1.0, 2.0, 3.0}, {11.0, 12.0, 13.0}) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(rmse(a, a) == 0.0);

    CHECK_THROWS_AS(rmse({1.0}, {1.0, 2.0}), ShapeError);
    CHECK_THROWS_AS(rmse({}, {}), InputError);
}

TEST_CASE("correlation hits the endpoints exactly") {
    const Vec up = {1.0, 2.0, 3.0, 4.0};
    const Vec down = {8.0, 6.0, 4.0, 2.0};
    CHECK(cc(up, up) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cc(up, down) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("correlation is invariant under positive affine maps") {
    const Vec a = wavy(100);
    Vec b(100);
    for (std::size_t i = 0; i < 100; ++i) b[i] = std::cos(static_cast<double>(i) / 5.0) * 40.0;

    const double base = cc(a, b);
    for (double s : {0.5, 3.0, 1e6}) {
        for (double t : {-100.0, 0.0, 250.0}) {
            Vec b2(100);
            for (std::size_t i = 0; i < 100; ++i) b2[i] = s * b[i] + t;
            CHECK(cc(a, b2) == doctest::Approx(base).epsilon(1e-12));
        }
    }
    // Negative scale flips the sign.
    Vec neg(100);
    for (std::size_t i = 0; i < 100; ++i) neg[i] = -2.0 * b[i];
    CHECK(cc(a, neg) == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("correlation of a constant series is an error, not zero") {
    const Vec flat(10, 5.0);
    const Vec moving = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    CHECK_THROWS_AS(cc(flat, moving), NumericError);
    CHECK_THROWS_AS(cc(moving, flat), NumericError);
    CHECK_THROWS_AS(cc({1.0}, {2.0}), InputError);
    CHECK_THROWS_AS(cc({1.0, 2.0}, {2.0}), ShapeError);
}

TEST_CASE("time lag recovers planted shifts exactly") {
    const Vec actual = wavy(288);
    for (std::size_t s : {0, 1, 2, 3, 4, 5, 6}) {
        const Vec predicted = lagged(actual, s);
        CHECK(time_lag(actual, predicted, 60) == doctest::Approx(5.0 * static_cast<double>(s)));
    }
}

TEST_CASE("time lag prefers the smaller shift on ties") {
    // A perfectly linear series is equally correlated with itself at
    // every shift; the search must settle on zero.
    Vec lin(100);
    for (std::size_t i = 0; i < 100; ++i) lin[i] = 50.0 + 2.0 * static_cast<double>(i);
    CHECK(time_lag(lin, lin, 30) == 0.0);
}

TEST_CASE("time lag validates its inputs") {
    const Vec a = wavy(288);
    CHECK_THROWS_AS(time_lag(a, a, 7), InputError);    // not a multiple of 5
    CHECK_THROWS_AS(time_lag(a, a, -5), InputError);
    const Vec tiny = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(time_lag(tiny, tiny, 60), InputError);  // too short for the search
    Vec b = a;
    b.pop_back();
    CHECK_THROWS_AS(time_lag(a, b, 30), ShapeError);
}

TEST_CASE("fit: perfect, mean predictor, and twice-as-bad-as-mean") {
    const Vec a = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
    CHECK(fit(a, a) == 100.0);

    const Vec mean_pred(6, 0.0);
    CHECK(fit(a, mean_pred) == doctest::Approx(0.0).epsilon(1e-14));

    // Exactly inverted: rmse 2, rms about the mean 1.
    Vec inv = a;
    for (double& v : inv) v = -v;
    CHECK(fit(a, inv) == doctest::Approx(-100.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit(Vec(5, 3.0), Vec(5, 3.0)), NumericError);  // constant actual
}

TEST_CASE("excursions count maximal runs with strict thresholds") {
    CHECK(count_excursions({65.0, 65.0, 100.0, 200.0, 100.0}).hypo == 1);
    CHECK(count_excursions({65.0, 65.0, 100.0, 200.0, 100.0}).hyper == 1);

    // Separate runs count separately.
    const ExcursionCounts two = count_excursions({65.0, 100.0, 60.0, 100.0, 190.0});
    CHECK(two.hypo == 2);
    CHECK(two.hyper == 1);

    // Thresholds are strict: 70 and 180 are in range.
    CHECK(count_excursions({70.0, 180.0}).hypo == 0);
    CHECK(count_excursions({70.0, 180.0}).hyper == 0);
    CHECK(count_excursions({69.999, 180.001}).hypo == 1);
    CHECK(count_excursions({69.999, 180.001}).hyper == 1);

    // Runs touching the ends still count once.
    CHECK(count_excursions({60.0, 60.0}).hypo == 1);
    CHECK(count_excursions({}).hypo == 0);
}

TEST_CASE("dataset summary aggregates the series") {
    pipeline::SubDataset sub;
    sub.subject_id = "demo";
    sub.values = {60.0, 100.0, 200.0, 100.0, 60.0};
    const DatasetSummary s = summarize_dataset(sub);
    CHECK(s.dataset == "demo");
    CHECK(s.samples == 5);
    CHECK(s.mean_mgdl == doctest::Approx(104.0).epsilon(1e-14));
    CHECK(s.hypo == 2);
    CHECK(s.hyper == 1);
}

TEST_CASE("evaluate_predictions bundles the four criteria") {
    const Vec actual = wavy(288);
    const Vec predicted = lagged(actual, 3);

    const MetricsReport r = evaluate_predictions(actual, predicted, 30);
    CHECK(r.n == 288);
    CHECK(r.tl_min == 15.0);
    CHECK(r.rmse == doctest::Approx(::glucast::metrics::rmse(actual, predicted)));
    CHECK(r.cc == doctest::Approx(cc(actual, predicted)));
    CHECK(r.fit_pct == doctest::Approx(fit(actual, predicted)));
    CHECK(r.hypo_count == count_excursions(actual).hypo);
    CHECK(r.hyper_count == count_excursions(actual).hyper);
}

TEST_CASE("evaluate rejects mismatched window sets") {
    training::TrainConfig cfg;
    cfg.seed = 3;
    cfg.ph_minutes = 30;
    cfg.window_len = 12;
    pipeline::Scaler sc{40.0, 400.0};
    const network::Model m = network::init_model(cfg, sc);

    pipeline::SubDataset sub;
    sub.values = wavy(80);
    const pipeline::WindowSet good = pipeline::make_windows(sub, 12, 6, sc);
    CHECK_NOTHROW(evaluate(m, good));

    const pipeline::WindowSet wrong_len = pipeline::make_windows(sub, 10, 6, sc);
    CHECK_THROWS_AS(evaluate(m, wrong_len), ConfigError);

    const pipeline::WindowSet wrong_ph = pipeline::make_windows(sub, 12, 3, sc);
    CHECK_THROWS_AS(evaluate(m, wrong_ph), ConfigError);

    pipeline::Scaler other{0.0, 500.0};
    const pipeline::WindowSet wrong_sc = pipeline::make_windows(sub, 12, 6, other);
    CHECK_THROWS_AS(evaluate(m, wrong_sc), ConfigError);

    pipeline::WindowSet empty = good;
    empty.inputs.clear();
    empty.targets.clear();
    empty.start_index.clear();
    CHECK_THROWS_AS(evaluate(m, empty), InputError);
}

TEST_CASE("evaluate is consistent with predict_all plus evaluate_predictions") {
    training::TrainConfig cfg;
    cfg.seed = 8;
    cfg.ph_minutes = 30;
    cfg.window_len = 12;
    pipeline::Scaler sc{40.0, 400.0};
    const network::Model m = network::init_model(cfg, sc);

    pipeline::SubDataset sub;
    sub.values = wavy(220);
    const pipeline::WindowSet ws = pipeline::make_windows(sub, 12, 6, sc);

    const MetricsReport via_eval = evaluate(m, ws);
    Vec actual;
    for (double t : ws.targets) actual.push_back(sc.invert(t));
    const MetricsReport direct = evaluate_predictions(actual, predict_all(m, ws), 30);

    CHECK(via_eval.rmse == direct.rmse);
    CHECK(via_eval.cc == direct.cc);
    CHECK(via_eval.tl_min == direct.tl_min);
    CHECK(via_eval.fit_pct == direct.fit_pct);
    CHECK(via_eval.n == direct.n);
}

TEST_CASE("metrics survive scaling round trips") {
    // Computing in mg/dL after an apply/invert round trip must not move
    // the metrics beyond floating-point noise.
    const Vec actual = wavy(150);
    const Vec predicted = lagged(actual, 2);
    pipeline::Scaler sc{40.0, 400.0};

    Vec a2(actual.size()), p2(predicted.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
        a2[i] = sc.invert(sc.apply(actual[i]));
        p2[i] = sc.invert(sc.apply(predicted[i]));
    }
    CHECK(rmse(actual, predicted) == doctest::Approx(rmse(a2, p2)).epsilon(1e-10));
    CHECK(cc(actual, predicted) == doctest::Approx(cc(a2, p2)).epsilon(1e-10));
    CHECK(fit(actual, predicted) == doctest::Approx(fit(a2, p2)).epsilon(1e-10));
}

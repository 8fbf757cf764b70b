#include "glucast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glucast/errors.hpp"

namespace glucast::synth {

namespace {

constexpr double kMinutesPerDay = 1440.0;
constexpr double kTwoPi = 6.283185307179586;
constexpr double kClipLo = 40.0;
constexpr double kClipHi = 400.0;

// Meal bump A*u*exp(1-u) with u = (t-t_m)/tau peaks at exactly A one tau
// after the meal and is negligible two days out.
double meal_bump(double amp, double tau, double minutes_since_meal) {
    if (minutes_since_meal <= 0.0) return 0.0;
    const double u = minutes_since_meal / tau;
    return amp * u * std::exp(1.0 - u);
}

}  // namespace

double clean_signal(const SubjectProfile& p, double minutes) {
    double g = p.basal_mgdl + p.circadian_amp * std::sin(kTwoPi * minutes / kMinutesPerDay);
    const auto day = static_cast<long>(std::floor(minutes / kMinutesPerDay));
    for (std::size_t m = 0; m < p.meal_times_min.size(); ++m) {
        for (long d = std::max(0L, day - 2); d <= day; ++d) {
            const double t_meal = static_cast<double>(d) * kMinutesPerDay + p.meal_times_min[m];
            g += meal_bump(p.meal_amps[m], p.meal_tau_min, minutes - t_meal);
        }
    }
    return g;
}

SubjectProfile draw_profile(std::uint64_t master_seed, std::size_t index) {
    SubjectProfile p;
    char id[32];
    std::snprintf(id, sizeof(id), "sim_%03zu", index);
    p.subject_id = id;
    p.seed = derive_seed(master_seed, static_cast<std::uint64_t>(index));

    SeededRng rng(p.seed);
    p.basal_mgdl = rng.uniform(100.0, 150.0);
    p.circadian_amp = rng.uniform(5.0, 20.0);
    const double anchors[] = {7 * 60.0, 12 * 60.0 + 30.0, 19 * 60.0};
    for (double anchor : anchors) {
        p.meal_times_min.push_back(anchor + rng.uniform(-60.0, 60.0));
        p.meal_amps.push_back(rng.uniform(40.0, 110.0));
    }
    p.meal_tau_min = rng.uniform(40.0, 70.0);
    p.noise_phi = rng.uniform(0.5, 0.9);
    p.noise_sigma = rng.uniform(1.0, 5.0);
    return p;
}

pipeline::GlucoseSeries gen_subject(const SubjectProfile& p, std::size_t days,
                                    std::int64_t start_epoch_s) {
    if (days == 0) throw InputError("gen_subject: days must be at least 1");
    if (p.meal_times_min.size() != p.meal_amps.size()) {
        throw ShapeError("gen_subject: meal_times and meal_amps must have equal length");
    }

    pipeline::GlucoseSeries s;
    s.subject_id = p.subject_id;
    s.start_epoch_s = start_epoch_s;
    const std::size_t n = days * 288;
    s.values.reserve(n);

    // Noise draws come from a stream derived from the profile seed so the
    // profile draw order never shifts the trace.
    SeededRng noise_rng(derive_seed(p.seed, 1));
    double noise = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        noise = p.noise_phi * noise + noise_rng.normal(0.0, p.noise_sigma);
        const double g = clean_signal(p, static_cast<double>(i) * 5.0) + noise;
        s.values.push_back(std::clamp(g, kClipLo, kClipHi));
    }
    return s;
}

std::vector<pipeline::GlucoseSeries> gen_cohort(std::size_t n_subjects, std::size_t days,
                                                std::uint64_t master_seed) {
    if (n_subjects == 0) throw InputError("gen_cohort: need at least one subject");
    std::vector<pipeline::GlucoseSeries> cohort;
    cohort.reserve(n_subjects);
    for (std::size_t i = 0; i < n_subjects; ++i) {
        cohort.push_back(gen_subject(draw_profile(master_seed, i), days));
    }
    return cohort;
}

}  // namespace glucast::synth

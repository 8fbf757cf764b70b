#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glucast/numerics.hpp"
#include "glucast/pipeline.hpp"

namespace glucast::synth {

// 2024-01-01T00:00:00Z; traces start at local midnight so minutes-of-day
// line up with the circadian term.
constexpr std::int64_t kDefaultStartEpoch = 1704067200;

// One virtual subject. Glucose is a basal level plus a circadian sine,
// one decaying bump per daily meal, and AR(1) noise, clipped to the CGM
// reporting range [40, 400] mg/dL.
struct SubjectProfile {
    std::string subject_id;
    double basal_mgdl = 120.0;
    double circadian_amp = 10.0;           // mg/dL
    std::vector<double> meal_times_min;    // minutes after midnight
    std::vector<double> meal_amps;         // peak mg/dL per meal
    double meal_tau_min = 55.0;            // bump time constant
    double noise_phi = 0.7;                // AR(1) coefficient, in [0,1)
    double noise_sigma = 3.0;              // innovation std, mg/dL
    std::uint64_t seed = 1;                // drives the noise stream
};

/// Deterministic parameter draw for subject `index` of a cohort.
/// Ranges: basal [100,150], circadian amplitude [5,20], three meals near
/// 07:00 / 12:30 / 19:00 jittered by +-60 min, amplitudes [40,110],
/// tau [40,70] min, phi [0.5,0.9], sigma [1,5].
SubjectProfile draw_profile(std::uint64_t master_seed, std::size_t index);

/// days*288 samples on the 5-minute grid, no missing values.
pipeline::GlucoseSeries gen_subject(const SubjectProfile& profile, std::size_t days,
                                    std::int64_t start_epoch_s = kDefaultStartEpoch);

std::vector<pipeline::GlucoseSeries> gen_cohort(std::size_t n_subjects, std::size_t days,
                                                std::uint64_t master_seed);

/// The noise-free component of the model at `minutes` past the series
/// start. Exposed so tests can check meal bumps without the AR(1) term.
double clean_signal(const SubjectProfile& profile, double minutes);

}  // namespace glucast::synth

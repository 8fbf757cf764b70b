#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glucast/numerics.hpp"

namespace glucast::pipeline {

/// CGM sampling interval; every series lives on this grid.
constexpr std::int64_t kGridSeconds = 300;

/// Physiologic sanity bounds; readings outside become missing on ingest.
constexpr double kMinValidMgdl = 1.0;
constexpr double kMaxValidMgdl = 1000.0;

/// Marker for an empty grid slot.
double missing_value();
bool is_missing(double v);

/// One subject's glucose trace on the 5-minute grid. values[i] is the
/// sample at start_epoch_s + i*300s, or the missing marker.
struct GlucoseSeries {
    std::string subject_id;
    std::int64_t start_epoch_s = 0;
    std::vector<double> values;

    std::size_t present_count() const;
};

/// A maximal gap-free run cut out of a GlucoseSeries.
struct SubDataset {
    std::string subject_id;
    std::int64_t start_epoch_s = 0;  // absolute time of values[0]
    std::size_t start_slot = 0;      // grid index within the parent series
    Vec values;                      // contiguous, never missing
};

/// Min-max transform fitted on training data only. Test-time values may
/// map outside [0,1]; invert is the exact inverse.
struct Scaler {
    double min = 0.0;
    double max = 1.0;

    double apply(double x) const { return (x - min) / (max - min); }
    double invert(double y) const { return y * (max - min) + min; }

    bool operator==(const Scaler&) const = default;
};

/// Fixed-length input windows with horizon targets, all in scaled units.
/// Window i covers samples [start_index[i], start_index[i]+L) of its
/// source; the target sits horizon_steps after the window's last sample.
struct WindowSet {
    std::size_t window_len = 0;     // L
    std::size_t horizon_steps = 0;  // k = PH/5
    std::vector<Vec> inputs;        // N x L
    Vec targets;                    // N
    std::vector<std::size_t> start_index;
    Scaler scaler;

    std::size_t size() const { return inputs.size(); }
    int ph_minutes() const { return static_cast<int>(horizon_steps) * 5; }
};

// ---------------------------------------------------------------------------
// Timestamps. ISO-8601 "YYYY-MM-DDTHH:MM:SS" (optional trailing 'Z', space
// accepted instead of 'T') or plain epoch seconds.

std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t epoch_s);

// ---------------------------------------------------------------------------
// Operations

/// Reads a `timestamp,glucose_mgdl` CSV onto the 5-minute grid. Rows snap
/// to the nearest slot within +-60s; slots with no row become missing, as
/// do values outside [1,1000] mg/dl. Unparseable rows, rows that miss the
/// grid and duplicate slots raise InputError with the line number.
GlucoseSeries ingest_csv(const std::string& path);

/// Repairs isolated defects:
///   - a single missing slot flanked by two present values is filled with
///     their linear interpolation;
///   - a present value differing from both present neighbours by more than
///     50 mg/dl is an outlier and is replaced by the neighbour midpoint.
/// Runs of two or more missing slots are left alone. Passes repeat until
/// the series is stable, which makes the operation idempotent.
GlucoseSeries repair_singletons(GlucoseSeries s);

/// Cuts the series into maximal gap-free runs.
std::vector<SubDataset> split_on_gaps(const GlucoseSeries& s);

struct Partition {
    std::vector<SubDataset> kept;  // length >= min_len, kept individually
    std::vector<SubDataset> pool;  // the rest, merged into the pre-train
                                   // pool; segments keep hard boundaries
};

/// Splits sub-datasets by the minimum-length rule (inclusive).
Partition partition_by_length(std::vector<SubDataset> subs, std::size_t min_len = 1500);

/// Min-max fit. Throws NumericError when the samples carry fewer than two
/// distinct values.
Scaler fit_scaler(const Vec& train_samples);

/// Slides a length-L window over one gap-free run; the target lies k grid
/// steps after the window end. Yields len-L-k+1 pairs, scaled with the
/// given (already fitted) scaler. Throws InputError when the run is too
/// short for a single pair.
WindowSet make_windows(const SubDataset& sub, std::size_t window_len,
                       std::size_t horizon_steps, const Scaler& scaler);

/// make_windows over every segment, concatenated. No window straddles two
/// segments; start indices are offset so they stay globally disjoint.
WindowSet make_pool_windows(const std::vector<SubDataset>& segments,
                            std::size_t window_len, std::size_t horizon_steps,
                            const Scaler& scaler);

struct Split {
    WindowSet train;
    WindowSet test;
};

/// Chronological split: the first floor(train_frac*N) windows train, the
/// rest test. The first k test windows are dropped so no test input
/// touches a training target. Never shuffles.
Split chrono_split(const WindowSet& ws, double train_frac = 0.67);

/// All unscaled values covered by the training prefix of the window list
/// (inputs and targets). This is the region a leak-free scaler may see.
Vec train_region_samples(const std::vector<SubDataset>& segments,
                         std::size_t window_len, std::size_t horizon_steps,
                         double train_frac = 0.67);

// ---------------------------------------------------------------------------
// CSV emission / pool files

/// Writes `timestamp,glucose_mgdl`; missing slots are skipped.
void write_series_csv(const std::string& path, const GlucoseSeries& s);
void write_sub_csv(const std::string& path, const SubDataset& sub);

/// Pool file: same columns plus `segment_id` marking hard boundaries.
void write_pool_csv(const std::string& path, const std::vector<SubDataset>& segments);
std::vector<SubDataset> load_pool_csv(const std::string& path);

}  // namespace glucast::pipeline

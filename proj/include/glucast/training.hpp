#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "glucast/metrics.hpp"
#include "glucast/network.hpp"
#include "glucast/pipeline.hpp"
#include "glucast/train_config.hpp"

namespace glucast::training {

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0; // scaled units
    double val_mse = 0.0;   // equals train_mse when no validation set given
};

using History = std::vector<EpochStats>;

// Flat first/second moment accumulators over the fixed parameter order
// of network::parameter_views.
struct AdamState {
    Vec m;
    Vec v;
    std::size_t t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

double mse_loss(const Vec& preds, const Vec& targets);

/// Adam with bias correction: beta1=0.9, beta2=0.999, eps=1e-8. Throws
/// NumericError on any non-finite gradient.
void adam_step(const std::vector<double*>& params, const std::vector<double*>& grads,
               AdamState& state, double learning_rate);

/// Mean squared error of the model over a window set, scaled units.
double dataset_mse(const network::Model& m, const pipeline::WindowSet& ws);

/// Mini-batch training: per epoch, shuffle with a generator derived from
/// cfg.seed, walk batches of cfg.batch_size (last one partial), apply the
/// mean gradient per batch via Adam. No early stopping. The model's
/// train_config is replaced by cfg.
History train(network::Model& m, const pipeline::WindowSet& train_ws, const TrainConfig& cfg,
              const pipeline::WindowSet* val_ws = nullptr);

// Windows for a set of gap-free segments with a leakage-free scaler: the
// scaler is fitted only on samples touched by the chronological training
// portion, then all windows are scaled and chrono-split.
struct Prepared {
    pipeline::Scaler scaler;
    pipeline::Split split;
};

Prepared prepare_windows(const std::vector<pipeline::SubDataset>& segments,
                         std::size_t window_len, std::size_t horizon_steps,
                         double train_frac = 0.67);

// Two-round pretraining: round 1 trains a fresh model on the simulated
// pool, round 2 continues on the pool of short real segments. Round 2
// uses a shuffle seed derived from cfg.seed so the rounds do not replay
// the same batch order. epochs_r2 = 0 skips round 2.
struct PretrainResult {
    network::Model round1;
    network::Model global_model;
    History history1;
    History history2;
};

PretrainResult pretrain_models(const std::vector<pipeline::SubDataset>& sim_segments,
                               const std::vector<pipeline::SubDataset>& short_real_segments,
                               std::size_t epochs_r1, std::size_t epochs_r2, TrainConfig cfg);

// Same, but saves round1.json and global.json under out_dir with the
// global checkpoint's parent_checkpoint_hash set to the round-1 file's
// digest, making the lineage reconstructible from disk.
struct PretrainFiles {
    std::string round1_path;
    std::string global_path;
    History history1;
    History history2;
};

PretrainFiles pretrain_workflow(const std::vector<pipeline::SubDataset>& sim_segments,
                                const std::vector<pipeline::SubDataset>& short_real_segments,
                                std::size_t epochs_r1, std::size_t epochs_r2, TrainConfig cfg,
                                const std::string& out_dir);

// Fine-tune the global model on one patient's segments: refit the scaler
// on the patient's training region, train cfg.epochs epochs on the first
// 67% of windows, evaluate on the held-out remainder. cfg must agree
// with the global model's window length and horizon (ConfigError).
struct FinetuneResult {
    network::Model model;
    History history;
    metrics::MetricsReport report;
    pipeline::Split split;
};

FinetuneResult finetune_model(const network::Model& global_model,
                              const std::vector<pipeline::SubDataset>& patient_segments,
                              TrainConfig cfg);

// Epoch sweep: one row per pretrain epoch count (both rounds use the
// same count), each row fully retrained from the same base seed, then
// fine-tuned on every evaluation subject; metrics are unweighted means
// across subjects.
struct SweepRow {
    std::size_t epochs = 0;
    double rmse = 0.0;
    double cc = 0.0;
    double tl_min = 0.0;
    double fit_pct = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t selected_epochs = 0;
};

SweepResult epoch_sweep(const std::vector<pipeline::SubDataset>& sim_segments,
                        const std::vector<pipeline::SubDataset>& short_real_segments,
                        const std::vector<std::vector<pipeline::SubDataset>>& eval_subjects,
                        TrainConfig cfg, std::size_t finetune_epochs, std::size_t from,
                        std::size_t to, std::size_t step, std::size_t jobs = 1);

/// Minimum-RMSE row; ties go to the smaller epoch count.
std::size_t select_epochs(const std::vector<SweepRow>& rows);

}  // namespace glucast::training

#include "glucast/training.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <thread>

namespace glucast::training {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

// Stream ids for seeds derived from a run's master seed.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kRound2Stream = 2;

void check_windows_match(const network::Model& m, const pipeline::WindowSet& ws,
                         std::size_t horizon_steps, const char* what) {
    if (ws.window_len != m.window_len) {
        throw ConfigError(std::string(what) + ": window length " + std::to_string(ws.window_len) +
                          " does not match the model's " + std::to_string(m.window_len));
    }
    if (ws.horizon_steps != horizon_steps) {
        throw ConfigError(std::string(what) + ": horizon " + std::to_string(ws.ph_minutes()) +
                          " min does not match the configured " +
                          std::to_string(horizon_steps * 5) + " min");
    }
    if (!(ws.scaler == m.scaler)) {
        throw ConfigError(std::string(what) +
                          ": windows were scaled with a different scaler than the model");
    }
}

}  // namespace

double mse_loss(const Vec& preds, const Vec& targets) {
    if (preds.size() != targets.size()) {
        throw ShapeError("mse_loss: length mismatch, " + std::to_string(preds.size()) + " vs " +
                         std::to_string(targets.size()));
    }
    if (preds.empty()) throw InputError("mse_loss: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - targets[i];
        s += d * d;
    }
    return s / static_cast<double>(preds.size());
}

void adam_step(const std::vector<double*>& params, const std::vector<double*>& grads,
               AdamState& state, double learning_rate) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: params " + std::to_string(params.size()) + ", grads " +
                         std::to_string(grads.size()) + ", state " +
                         std::to_string(state.m.size()) + " must all agree");
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = *grads[i];
        if (!std::isfinite(g)) {
            throw NumericError("adam_step: non-finite gradient at parameter " + std::to_string(i));
        }
        state.m[i] = kBeta1 * state.m[i] + (1.0 - kBeta1) * g;
        state.v[i] = kBeta2 * state.v[i] + (1.0 - kBeta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        *params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + kEps);
    }
}

double dataset_mse(const network::Model& m, const pipeline::WindowSet& ws) {
    if (ws.size() == 0) throw InputError("dataset_mse: empty window set");
    double s = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const double d = network::model_forward(m, ws.inputs[i]) - ws.targets[i];
        s += d * d;
    }
    return s / static_cast<double>(ws.size());
}

History train(network::Model& m, const pipeline::WindowSet& train_ws, const TrainConfig& cfg,
              const pipeline::WindowSet* val_ws) {
    cfg.validate();
    if (train_ws.size() == 0) throw InputError("train: empty training window set");
    if (cfg.window_len != m.window_len) {
        throw ConfigError("train: cfg window length " + std::to_string(cfg.window_len) +
                          " does not match the model's " + std::to_string(m.window_len));
    }
    check_windows_match(m, train_ws, cfg.horizon_steps(), "train");
    if (val_ws && val_ws->size() > 0) check_windows_match(m, *val_ws, cfg.horizon_steps(), "train (val)");
    m.train_config = cfg;

    const auto params = network::parameter_views(m);
    network::Gradients grads = network::zero_gradients(m);
    const auto grad_views = network::parameter_views(grads);
    AdamState state(params.size());
    SeededRng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));

    std::vector<std::size_t> order(train_ws.size());
    std::iota(order.begin(), order.end(), 0);

    History history;
    history.reserve(cfg.epochs);
    network::ForwardCache cache;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        std::size_t batch_idx = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_idx) {
            const std::size_t b = std::min(cfg.batch_size, order.size() - start);
            for (double* g : grad_views) *g = 0.0;
            double batch_sse = 0.0;
            for (std::size_t j = 0; j < b; ++j) {
                const std::size_t idx = order[start + j];
                const double pred = network::model_forward(m, train_ws.inputs[idx], &cache);
                const double err = pred - train_ws.targets[idx];
                batch_sse += err * err;
                // d(batch MSE)/d(pred) for this sample
                network::model_backward(m, cache, 2.0 * err / static_cast<double>(b), grads);
            }
            if (!std::isfinite(batch_sse)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_idx));
            }
            try {
                adam_step(params, grad_views, state, cfg.learning_rate);
            } catch (const NumericError& e) {
                throw NumericError("train: epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_idx) + ": " + e.what());
            }
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = dataset_mse(m, train_ws);
        stats.val_mse = (val_ws && val_ws->size() > 0) ? dataset_mse(m, *val_ws) : stats.train_mse;
        history.push_back(stats);
    }
    return history;
}

Prepared prepare_windows(const std::vector<pipeline::SubDataset>& segments,
                         std::size_t window_len, std::size_t horizon_steps, double train_frac) {
    Prepared p;
    const Vec region =
        pipeline::train_region_samples(segments, window_len, horizon_steps, train_frac);
    p.scaler = pipeline::fit_scaler(region);
    const pipeline::WindowSet all =
        pipeline::make_pool_windows(segments, window_len, horizon_steps, p.scaler);
    p.split = pipeline::chrono_split(all, train_frac);
    return p;
}

PretrainResult pretrain_models(const std::vector<pipeline::SubDataset>& sim_segments,
                               const std::vector<pipeline::SubDataset>& short_real_segments,
                               std::size_t epochs_r1, std::size_t epochs_r2, TrainConfig cfg) {
    PretrainResult result;

    TrainConfig cfg1 = cfg;
    cfg1.epochs = epochs_r1;
    cfg1.phase = Phase::pretrain1;
    Prepared prep1 = prepare_windows(sim_segments, cfg.window_len, cfg.horizon_steps());
    result.round1 = network::init_model(cfg1, prep1.scaler);
    result.history1 = train(result.round1, prep1.split.train, cfg1, &prep1.split.test);

    result.global_model = result.round1;
    if (epochs_r2 > 0) {
        TrainConfig cfg2 = cfg;
        cfg2.epochs = epochs_r2;
        cfg2.phase = Phase::pretrain2;
        cfg2.seed = derive_seed(cfg.seed, kRound2Stream);
        Prepared prep2 = prepare_windows(short_real_segments, cfg.window_len, cfg.horizon_steps());
        result.global_model.scaler = prep2.scaler;
        result.history2 = train(result.global_model, prep2.split.train, cfg2, &prep2.split.test);
    }
    return result;
}

PretrainFiles pretrain_workflow(const std::vector<pipeline::SubDataset>& sim_segments,
                                const std::vector<pipeline::SubDataset>& short_real_segments,
                                std::size_t epochs_r1, std::size_t epochs_r2, TrainConfig cfg,
                                const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());

    PretrainResult models =
        pretrain_models(sim_segments, short_real_segments, epochs_r1, epochs_r2, cfg);

    PretrainFiles files;
    files.history1 = std::move(models.history1);
    files.history2 = std::move(models.history2);
    files.round1_path = (std::filesystem::path(out_dir) / "round1.json").string();
    files.global_path = (std::filesystem::path(out_dir) / "global.json").string();

    network::save_model(models.round1, files.round1_path);
    models.global_model.parent_checkpoint_hash = network::checkpoint_hash(files.round1_path);
    network::save_model(models.global_model, files.global_path);
    return files;
}

FinetuneResult finetune_model(const network::Model& global_model,
                              const std::vector<pipeline::SubDataset>& patient_segments,
                              TrainConfig cfg) {
    if (cfg.window_len != global_model.window_len) {
        throw ConfigError("finetune: window length " + std::to_string(cfg.window_len) +
                          " does not match the checkpoint's " +
                          std::to_string(global_model.window_len));
    }
    if (cfg.ph_minutes != global_model.train_config.ph_minutes) {
        throw ConfigError("finetune: horizon " + std::to_string(cfg.ph_minutes) +
                          " min does not match the checkpoint's " +
                          std::to_string(global_model.train_config.ph_minutes) + " min");
    }
    cfg.phase = Phase::finetune;

    FinetuneResult result;
    Prepared prep = prepare_windows(patient_segments, cfg.window_len, cfg.horizon_steps());
    result.model = global_model;
    result.model.scaler = prep.scaler;
    result.history = train(result.model, prep.split.train, cfg, &prep.split.test);
    result.report = metrics::evaluate(result.model, prep.split.test);
    result.split = std::move(prep.split);
    return result;
}

std::size_t select_epochs(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw InputError("select_epochs: empty sweep");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        // Strict comparison: on ties the earlier (smaller) count stands.
        if (rows[i].rmse < rows[best].rmse) best = i;
    }
    return rows[best].epochs;
}

SweepResult epoch_sweep(const std::vector<pipeline::SubDataset>& sim_segments,
                        const std::vector<pipeline::SubDataset>& short_real_segments,
                        const std::vector<std::vector<pipeline::SubDataset>>& eval_subjects,
                        TrainConfig cfg, std::size_t finetune_epochs, std::size_t from,
                        std::size_t to, std::size_t step, std::size_t jobs) {
    if (step == 0) throw ConfigError("epoch_sweep: step must be positive");
    if (from == 0) throw ConfigError("epoch_sweep: epoch counts start at 1");
    if (to < from) throw ConfigError("epoch_sweep: sweep range is empty");
    if (eval_subjects.empty()) throw InputError("epoch_sweep: no evaluation subjects");

    std::vector<std::size_t> grid;
    for (std::size_t e = from; e <= to; e += step) grid.push_back(e);

    SweepResult result;
    result.rows.assign(grid.size(), SweepRow{});

    auto run_row = [&](std::size_t row_idx) {
        const std::size_t e = grid[row_idx];
        PretrainResult pre = pretrain_models(sim_segments, short_real_segments, e, e, cfg);
        TrainConfig ft = cfg;
        ft.epochs = finetune_epochs;
        SweepRow row;
        row.epochs = e;
        for (const auto& subject : eval_subjects) {
            const FinetuneResult fr = finetune_model(pre.global_model, subject, ft);
            row.rmse += fr.report.rmse;
            row.cc += fr.report.cc;
            row.tl_min += fr.report.tl_min;
            row.fit_pct += fr.report.fit_pct;
        }
        const auto n = static_cast<double>(eval_subjects.size());
        row.rmse /= n;
        row.cc /= n;
        row.tl_min /= n;
        row.fit_pct /= n;
        result.rows[row_idx] = row;
    };

    if (jobs <= 1 || grid.size() <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_row(i);
    } else {
        // Rows are independent; any interleaving yields the same table.
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            try {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                    run_row(i);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min(jobs, grid.size());
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    result.selected_epochs = select_epochs(result.rows);
    return result;
}

}  // namespace glucast::training

// Command-line workbench tying the library together: generate synthetic
// cohorts, preprocess CGM files, pretrain/finetune/evaluate the network,
// sweep pretrain epochs, and run the classical baselines.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "glucast/baselines.hpp"
#include "glucast/errors.hpp"
#include "glucast/metrics.hpp"
#include "glucast/network.hpp"
#include "glucast/pipeline.hpp"
#include "glucast/report.hpp"
#include "glucast/synth.hpp"
#include "glucast/training.hpp"

namespace fs = std::filesystem;
using namespace glucast;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

std::vector<std::string> list_csv_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        const std::string name = entry.path().filename().string();
        // Workbench outputs that may sit next to subject data.
        if (name == "summary.csv" || name == "pretrain_pool.csv" || name == "report.csv" ||
            name == "sweep.csv") {
            continue;
        }
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Ingest one CSV, repair singleton artifacts, cut at gaps.
std::vector<pipeline::SubDataset> load_segments(const std::string& csv_path) {
    pipeline::GlucoseSeries s = pipeline::repair_singletons(pipeline::ingest_csv(csv_path));
    s.subject_id = fs::path(csv_path).stem().string();
    auto segments = pipeline::split_on_gaps(s);
    if (segments.empty()) throw InputError(csv_path + ": no usable samples");
    return segments;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

// Resolved-flags sidecar: every run records how it was invoked.
void write_run_config(const std::string& out_dir, const std::string& command,
                      const std::map<std::string, std::string>& flags) {
    std::ofstream out(fs::path(out_dir) / "run_config.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write run_config.json under " + out_dir);
    out << "{\"command\":\"" << json_escape(command) << "\",\"flags\":{";
    bool first = true;
    for (const auto& [k, v] : flags) {
        if (!first) out << ',';
        first = false;
        out << '"' << json_escape(k) << "\":\"" << json_escape(v) << '"';
    }
    out << "}}\n";
    if (!out) throw ConfigError("write failed: run_config.json");
}

std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

Vec targets_mgdl(const pipeline::WindowSet& ws) {
    Vec out;
    out.reserve(ws.size());
    for (double t : ws.targets) out.push_back(ws.scaler.invert(t));
    return out;
}

struct TrainFlags {
    std::uint64_t seed = 1;
    std::size_t ph = 30;
    std::size_t window_len = 12;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_ph = true) {
    cmd->add_option("--seed", f.seed, "Master random seed")->capture_default_str();
    if (with_ph) {
        cmd->add_option("--ph", f.ph, "Prediction horizon in minutes")
            ->check(CLI::IsMember({15, 30, 45, 60}))
            ->capture_default_str();
    }
    cmd->add_option("--window-len", f.window_len, "Input window length in samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--batch-size", f.batch_size, "Mini-batch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lr", f.learning_rate, "Adam learning rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

training::TrainConfig to_config(const TrainFlags& f, std::size_t epochs) {
    training::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = f.batch_size;
    cfg.learning_rate = f.learning_rate;
    cfg.seed = f.seed;
    cfg.ph_minutes = f.ph;
    cfg.window_len = f.window_len;
    return cfg;
}

struct BaselineFlags {
    std::size_t arima_p = 3;
    std::size_t arima_d = 1;
    double svr_epsilon = 0.01;
    double svr_c = 1.0;
    std::size_t svr_epochs = 200;
};

void add_baseline_flags(CLI::App* cmd, BaselineFlags& f) {
    cmd->add_option("--arima-p", f.arima_p, "AR order")->capture_default_str();
    cmd->add_option("--arima-d", f.arima_d, "Differencing order (0 or 1)")
        ->check(CLI::Range(0, 1))
        ->capture_default_str();
    cmd->add_option("--svr-epsilon", f.svr_epsilon, "SVR insensitive-tube half width (scaled)")
        ->capture_default_str();
    cmd->add_option("--svr-c", f.svr_c, "SVR hinge weight")->capture_default_str();
    cmd->add_option("--svr-epochs", f.svr_epochs, "SVR subgradient epochs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

std::vector<std::string> split_methods(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    for (const auto& m : out) {
        if (m != "naive" && m != "ari" && m != "svr" && m != "none") {
            throw ConfigError("unknown baseline method '" + m + "' (naive, ari, svr, or none)");
        }
    }
    if (std::find(out.begin(), out.end(), "none") != out.end()) out.clear();
    return out;
}

// Baseline rows for one dataset at one horizon, sharing the exact window
// partition the network uses.
void append_baseline_rows(std::vector<report::ReportRow>& rows, const std::string& dataset,
                          const std::vector<pipeline::SubDataset>& segments,
                          const std::vector<std::string>& methods, std::size_t ph,
                          std::size_t window_len, const BaselineFlags& bf, std::uint64_t seed) {
    if (methods.empty()) return;
    const std::size_t k = ph / 5;
    const training::Prepared prep = training::prepare_windows(segments, window_len, k);
    if (prep.split.test.size() < 2) {
        throw InputError(dataset + ": too few test windows for baselines at ph=" + num(ph));
    }
    const Vec actual = targets_mgdl(prep.split.test);

    for (const std::string& method : methods) {
        Vec preds;
        std::string label = method;
        if (method == "naive") {
            preds = baselines::naive_predict_all(prep.split.test);
        } else if (method == "ari") {
            const Vec train_raw = pipeline::train_region_samples(segments, window_len, k);
            const baselines::ArimaModel am = baselines::arima_fit(train_raw, bf.arima_p, bf.arima_d);
            preds = baselines::arima_predict_all(am, prep.split.test);
            label = "ari(" + num(bf.arima_p) + "," + num(bf.arima_d) + ")";
        } else {  // svr
            const baselines::SvrModel sm = baselines::svr_fit(
                prep.split.train, bf.svr_epsilon, bf.svr_c, bf.svr_epochs, seed);
            preds = baselines::svr_predict_all(sm, prep.split.test);
        }
        rows.push_back(report::make_row(dataset, label, static_cast<int>(ph),
                                        metrics::evaluate_predictions(actual, preds,
                                                                      static_cast<int>(ph))));
    }
}

void setup_synth(CLI::App& app) {
    auto cmd = app.add_subcommand("synth", "Generate a synthetic CGM cohort as CSV files");
    auto subjects = std::make_shared<std::size_t>(11);
    auto days = std::make_shared<std::size_t>(38);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--subjects", *subjects, "Number of virtual subjects")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--days", *days, "Days per subject (288 samples/day)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", *seed, "Master random seed")->capture_default_str();
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        ensure_dir(*out);
        const auto cohort = synth::gen_cohort(*subjects, *days, *seed);
        for (const auto& series : cohort) {
            pipeline::write_series_csv((fs::path(*out) / (series.subject_id + ".csv")).string(),
                                       series);
        }
        write_run_config(*out, "synth",
                         {{"subjects", num(*subjects)},
                          {"days", num(*days)},
                          {"seed", num(*seed)},
                          {"out", *out}});
        std::cout << "wrote " << cohort.size() << " subjects to " << *out << '\n';
    });
}

void setup_preprocess(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "preprocess", "Ingest raw CGM CSVs: repair, split at gaps, filter, pool short runs");
    auto in = std::make_shared<std::string>();
    auto min_len = std::make_shared<std::size_t>(1500);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--in", *in, "Directory of raw CSV files")->required();
    cmd->add_option("--min-len", *min_len, "Minimum samples for a standalone sub-dataset")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        const auto files = list_csv_files(*in);
        if (files.empty()) throw InputError("no CSV files in " + *in);
        ensure_dir(*out);

        std::vector<pipeline::SubDataset> all_subs;
        for (const auto& f : files) {
            const std::string stem = fs::path(f).stem().string();
            auto segments = load_segments(f);
            for (std::size_t i = 0; i < segments.size(); ++i) {
                char suffix[24];
                std::snprintf(suffix, sizeof(suffix), "_sub%02zu", i);
                segments[i].subject_id = stem + suffix;
                all_subs.push_back(std::move(segments[i]));
            }
        }

        pipeline::Partition part = pipeline::partition_by_length(std::move(all_subs), *min_len);

        std::vector<metrics::DatasetSummary> summary;
        for (const auto& sub : part.kept) {
            pipeline::write_sub_csv((fs::path(*out) / (sub.subject_id + ".csv")).string(), sub);
            summary.push_back(metrics::summarize_dataset(sub));
        }
        if (!part.pool.empty()) {
            pipeline::write_pool_csv((fs::path(*out) / "pretrain_pool.csv").string(), part.pool);
            metrics::DatasetSummary pool_row;
            pool_row.dataset = "pretrain_pool";
            double total = 0.0;
            for (const auto& seg : part.pool) {
                pool_row.samples += seg.values.size();
                for (double v : seg.values) total += v;
                const auto counts = metrics::count_excursions(seg.values);
                pool_row.hypo += counts.hypo;
                pool_row.hyper += counts.hyper;
            }
            pool_row.mean_mgdl = total / static_cast<double>(pool_row.samples);
            summary.push_back(pool_row);
        }
        report::write_summary_csv((fs::path(*out) / "summary.csv").string(), summary);
        write_run_config(*out, "preprocess",
                         {{"in", *in}, {"min_len", num(*min_len)}, {"out", *out}});
        std::cout << "kept " << part.kept.size() << " sub-datasets, pooled " << part.pool.size()
                  << " short segments\n";
    });
}

void setup_pretrain(CLI::App& app) {
    auto cmd = app.add_subcommand("pretrain",
                                  "Two-round pretraining: simulated pool, then short real pool");
    auto flags = std::make_shared<TrainFlags>();
    auto sim_dir = std::make_shared<std::string>();
    auto pool = std::make_shared<std::string>();
    auto epochs_r1 = std::make_shared<std::size_t>(150);
    auto epochs_r2 = std::make_shared<std::size_t>(100);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--sim-dir", *sim_dir, "Directory of simulated subject CSVs")->required();
    cmd->add_option("--pool", *pool, "pretrain_pool.csv of short real segments (round 2)");
    cmd->add_option("--epochs-r1", *epochs_r1, "Round-1 epochs")->capture_default_str();
    cmd->add_option("--epochs-r2", *epochs_r2, "Round-2 epochs (0 skips round 2)")
        ->capture_default_str();
    add_train_flags(cmd, *flags);
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        if (*epochs_r1 == 0) throw ConfigError("--epochs-r1 must be at least 1");
        const auto sim_files = list_csv_files(*sim_dir);
        if (sim_files.empty()) throw InputError("no CSV files in " + *sim_dir);
        std::vector<pipeline::SubDataset> sim_segments;
        for (const auto& f : sim_files) {
            for (auto& seg : load_segments(f)) sim_segments.push_back(std::move(seg));
        }
        std::vector<pipeline::SubDataset> short_real;
        if (*epochs_r2 > 0) {
            if (pool->empty()) {
                throw ConfigError("round 2 needs --pool (or set --epochs-r2 0 to skip)");
            }
            short_real = pipeline::load_pool_csv(*pool);
        }

        ensure_dir(*out);
        const auto files = training::pretrain_workflow(sim_segments, short_real, *epochs_r1,
                                                       *epochs_r2, to_config(*flags, *epochs_r1),
                                                       *out);
        report::write_history_csv((fs::path(*out) / "history_round1.csv").string(),
                                  files.history1);
        if (!files.history2.empty()) {
            report::write_history_csv((fs::path(*out) / "history_round2.csv").string(),
                                      files.history2);
        }
        write_run_config(*out, "pretrain",
                         {{"sim_dir", *sim_dir},
                          {"pool", *pool},
                          {"epochs_r1", num(*epochs_r1)},
                          {"epochs_r2", num(*epochs_r2)},
                          {"seed", num(flags->seed)},
                          {"ph", num(flags->ph)},
                          {"window_len", num(flags->window_len)},
                          {"batch_size", num(flags->batch_size)},
                          {"lr", num(flags->learning_rate)},
                          {"out", *out}});
        std::cout << "global model: " << files.global_path << '\n';
    });
}

void setup_finetune(CLI::App& app) {
    auto cmd = app.add_subcommand("finetune",
                                  "Fine-tune a global checkpoint on one patient dataset");
    auto flags = std::make_shared<TrainFlags>();
    auto checkpoint = std::make_shared<std::string>();
    auto data = std::make_shared<std::string>();
    auto epochs = std::make_shared<std::size_t>(100);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--checkpoint", *checkpoint, "Global model checkpoint")->required();
    cmd->add_option("--data", *data, "Patient CSV")->required();
    cmd->add_option("--epochs", *epochs, "Fine-tune epochs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_train_flags(cmd, *flags);
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        const network::Model global_model = network::load_model(*checkpoint);
        const auto segments = load_segments(*data);
        const std::string dataset = fs::path(*data).stem().string();

        training::FinetuneResult result =
            training::finetune_model(global_model, segments, to_config(*flags, *epochs));
        result.model.parent_checkpoint_hash = network::checkpoint_hash(*checkpoint);

        ensure_dir(*out);
        network::save_model(result.model, (fs::path(*out) / "finetuned.json").string());
        report::write_history_csv((fs::path(*out) / "history.csv").string(), result.history);
        report::write_report_csv(
            (fs::path(*out) / "report.csv").string(),
            {report::make_row(dataset, "lstm", static_cast<int>(flags->ph), result.report)});
        write_run_config(*out, "finetune",
                         {{"checkpoint", *checkpoint},
                          {"data", *data},
                          {"epochs", num(*epochs)},
                          {"seed", num(flags->seed)},
                          {"ph", num(flags->ph)},
                          {"window_len", num(flags->window_len)},
                          {"batch_size", num(flags->batch_size)},
                          {"lr", num(flags->learning_rate)},
                          {"out", *out}});
        std::cout << "rmse=" << result.report.rmse << " cc=" << result.report.cc
                  << " tl=" << result.report.tl_min << " fit=" << result.report.fit_pct << '\n';
    });
}

void setup_eval(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "eval", "Evaluate fine-tuned checkpoints (and baselines) on a patient dataset");
    auto checkpoints = std::make_shared<std::vector<std::string>>();
    auto data = std::make_shared<std::string>();
    auto phs = std::make_shared<std::vector<std::size_t>>();
    auto window_len = std::make_shared<std::size_t>(12);
    auto methods_csv = std::make_shared<std::string>("naive,ari,svr");
    auto bf = std::make_shared<BaselineFlags>();
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--checkpoint", *checkpoints,
                    "Fine-tuned checkpoint (repeatable; horizon read from the file)");
    cmd->add_option("--data", *data, "Patient CSV")->required();
    cmd->add_option("--ph", *phs, "Extra horizons for baselines (minutes, repeatable)")
        ->check(CLI::IsMember({15, 30, 45, 60}));
    cmd->add_option("--window-len", *window_len, "Window length for baseline models")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--baselines", *methods_csv, "Comma list of naive,ari,svr, or none")
        ->capture_default_str();
    add_baseline_flags(cmd, *bf);
    cmd->add_option("--seed", *seed, "Seed for the SVR baseline")->capture_default_str();
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        const auto segments = load_segments(*data);
        const std::string dataset = fs::path(*data).stem().string();
        const auto methods = split_methods(*methods_csv);
        if (checkpoints->empty() && methods.empty()) {
            throw ConfigError("nothing to evaluate: no --checkpoint and --baselines none");
        }
        ensure_dir(*out);

        std::vector<report::ReportRow> rows;
        std::set<std::size_t> baseline_phs(phs->begin(), phs->end());

        for (const auto& path : *checkpoints) {
            const network::Model m = network::load_model(path);
            const std::size_t ph = m.train_config.ph_minutes;
            baseline_phs.insert(ph);
            const pipeline::WindowSet all = pipeline::make_pool_windows(
                segments, m.window_len, m.train_config.horizon_steps(), m.scaler);
            const pipeline::Split split = pipeline::chrono_split(all);
            rows.push_back(report::make_row(dataset, "lstm", static_cast<int>(ph),
                                            metrics::evaluate(m, split.test)));
            const Vec actual = targets_mgdl(split.test);
            const Vec predicted = metrics::predict_all(m, split.test);
            report::write_prediction_svg(
                (fs::path(*out) / (dataset + "_lstm_ph" + num(ph) + ".svg")).string(), actual,
                predicted, dataset + ": actual vs predicted, PH " + num(ph) + " min");
        }

        for (std::size_t ph : baseline_phs) {
            append_baseline_rows(rows, dataset, segments, methods, ph, *window_len, *bf, *seed);
        }
        report::write_report_csv((fs::path(*out) / "report.csv").string(), rows);

        std::string ckpt_list;
        for (const auto& c : *checkpoints) ckpt_list += (ckpt_list.empty() ? "" : ";") + c;
        write_run_config(*out, "eval",
                         {{"checkpoints", ckpt_list},
                          {"data", *data},
                          {"baselines", *methods_csv},
                          {"window_len", num(*window_len)},
                          {"seed", num(*seed)},
                          {"out", *out}});
        std::cout << "wrote " << rows.size() << " report rows\n";
    });
}

void setup_baseline(CLI::App& app) {
    auto cmd = app.add_subcommand("baseline",
                                  "Run the classical baselines alone on a patient dataset");
    auto data = std::make_shared<std::string>();
    auto phs = std::make_shared<std::vector<std::size_t>>(std::vector<std::size_t>{30});
    auto window_len = std::make_shared<std::size_t>(12);
    auto methods_csv = std::make_shared<std::string>("naive,ari,svr");
    auto bf = std::make_shared<BaselineFlags>();
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--data", *data, "Patient CSV")->required();
    cmd->add_option("--ph", *phs, "Horizons in minutes (repeatable)")
        ->check(CLI::IsMember({15, 30, 45, 60}))
        ->capture_default_str();
    cmd->add_option("--window-len", *window_len, "Window length in samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--methods", *methods_csv, "Comma list of naive,ari,svr")
        ->capture_default_str();
    add_baseline_flags(cmd, *bf);
    cmd->add_option("--seed", *seed, "Seed for the SVR baseline")->capture_default_str();
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        const auto segments = load_segments(*data);
        const std::string dataset = fs::path(*data).stem().string();
        const auto methods = split_methods(*methods_csv);
        if (methods.empty()) throw ConfigError("no baseline methods selected");
        ensure_dir(*out);

        std::vector<report::ReportRow> rows;
        std::set<std::size_t> unique_phs(phs->begin(), phs->end());
        for (std::size_t ph : unique_phs) {
            append_baseline_rows(rows, dataset, segments, methods, ph, *window_len, *bf, *seed);
        }
        report::write_report_csv((fs::path(*out) / "report.csv").string(), rows);
        write_run_config(*out, "baseline",
                         {{"data", *data},
                          {"methods", *methods_csv},
                          {"window_len", num(*window_len)},
                          {"seed", num(*seed)},
                          {"out", *out}});
        std::cout << "wrote " << rows.size() << " report rows\n";
    });
}

void setup_sweep(CLI::App& app) {
    auto cmd = app.add_subcommand(
        "sweep", "Pretrain-epoch sweep: retrain at each count, fine-tune, average metrics");
    auto flags = std::make_shared<TrainFlags>();
    auto sim_dir = std::make_shared<std::string>();
    auto pool = std::make_shared<std::string>();
    auto eval_dir = std::make_shared<std::string>();
    auto from = std::make_shared<std::size_t>(100);
    auto to = std::make_shared<std::size_t>(2000);
    auto step = std::make_shared<std::size_t>(100);
    auto finetune_epochs = std::make_shared<std::size_t>(100);
    auto jobs = std::make_shared<std::size_t>(1);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--sim-dir", *sim_dir, "Directory of simulated subject CSVs")->required();
    cmd->add_option("--pool", *pool, "pretrain_pool.csv for round 2")->required();
    cmd->add_option("--eval-dir", *eval_dir, "Directory of evaluation patient CSVs")->required();
    cmd->add_option("--from", *from, "First epoch count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--to", *to, "Last epoch count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--step", *step, "Increment")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--finetune-epochs", *finetune_epochs, "Fine-tune epochs per subject")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--jobs", *jobs, "Parallel sweep rows")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_train_flags(cmd, *flags);
    cmd->add_option("--out", *out, "Output directory")->required();

    cmd->callback([=] {
        const auto sim_files = list_csv_files(*sim_dir);
        if (sim_files.empty()) throw InputError("no CSV files in " + *sim_dir);
        std::vector<pipeline::SubDataset> sim_segments;
        for (const auto& f : sim_files) {
            for (auto& seg : load_segments(f)) sim_segments.push_back(std::move(seg));
        }
        const auto short_real = pipeline::load_pool_csv(*pool);

        const auto eval_files = list_csv_files(*eval_dir);
        if (eval_files.empty()) throw InputError("no CSV files in " + *eval_dir);
        std::vector<std::vector<pipeline::SubDataset>> eval_subjects;
        for (const auto& f : eval_files) eval_subjects.push_back(load_segments(f));

        const training::SweepResult result = training::epoch_sweep(
            sim_segments, short_real, eval_subjects, to_config(*flags, *from), *finetune_epochs,
            *from, *to, *step, *jobs);

        ensure_dir(*out);
        report::write_sweep_csv((fs::path(*out) / "sweep.csv").string(), result.rows);
        write_run_config(*out, "sweep",
                         {{"sim_dir", *sim_dir},
                          {"pool", *pool},
                          {"eval_dir", *eval_dir},
                          {"from", num(*from)},
                          {"to", num(*to)},
                          {"step", num(*step)},
                          {"finetune_epochs", num(*finetune_epochs)},
                          {"jobs", num(*jobs)},
                          {"seed", num(flags->seed)},
                          {"ph", num(flags->ph)},
                          {"window_len", num(flags->window_len)},
                          {"batch_size", num(flags->batch_size)},
                          {"lr", num(flags->learning_rate)},
                          {"out", *out}});
        std::cout << "selected epochs: " << result.selected_epochs << '\n';
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blood glucose forecasting workbench (LSTM + Bi-LSTM and baselines)"};
    app.require_subcommand(1);
    setup_synth(app);
    setup_preprocess(app);
    setup_pretrain(app);
    setup_finetune(app);
    setup_eval(app);
    setup_baseline(app);
    setup_sweep(app);

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;  // InputError, ShapeError, and anything unexpected
    }
}

// iws: generate synthetic trial datasets, run the segmentation experiment, score predictions.

#include "iws/data.hpp"
#include "iws/eval.hpp"
#include "iws/json_io.hpp"
#include "iws/pipeline.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDataset = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(iws::ErrorKind kind) {
    using iws::ErrorKind;
    switch (kind) {
        case ErrorKind::ConfigError: return kExitConfig;
        case ErrorKind::MalformedFile:
        case ErrorKind::InvariantViolation:
        case ErrorKind::IoError:
        case ErrorKind::SegmentTooShort:
        case ErrorKind::TooFewTrials:
        case ErrorKind::LengthMismatch: return kExitDataset;
        default: return kExitNumerical;
    }
}

int report_error(const std::string& stage, const iws::Error& e, int code) {
    spdlog::error("{}: {}", stage, e.what());
    return code;
}

int cmd_generate(const fs::path& config_path, const fs::path& out_dir) {
    iws::SynthConfig config;
    try {
        config = iws::synth_config_from_json(iws::read_config_file(config_path));
    } catch (const iws::Error& e) {
        return report_error("config", e, kExitConfig);
    }
    try {
        const auto subjects = iws::generate_synthetic_dataset(config);
        iws::write_dataset(subjects, out_dir);
        spdlog::info("wrote {} subjects x {} trials to {}", config.n_subjects, config.trials_per_subject,
                     out_dir.string());
    } catch (const iws::Error& e) {
        return report_error("generate", e, exit_code_for(e.kind()));
    }
    return 0;
}

int cmd_run(const fs::path& config_path, const fs::path& out_override, int jobs) {
    iws::RunConfig config;
    try {
        const json j = iws::read_config_file(config_path);
        config = iws::run_config_from_json(j);
        // Paths inside the config file are relative to the file; --out is relative to the working directory.
        const fs::path base = config_path.parent_path();
        if (config.dataset_path.is_relative()) config.dataset_path = base / config.dataset_path;
        if (!out_override.empty()) config.output_path = out_override;
        else if (!config.output_path.empty() && config.output_path.is_relative()) config.output_path = base / config.output_path;
        iws::require(!config.output_path.empty(), iws::ErrorKind::ConfigError, "output_path: not set (use --out)");
    } catch (const iws::Error& e) {
        return report_error("config", e, kExitConfig);
    }

    std::vector<iws::SubjectDataset> subjects;
    try {
        subjects = iws::read_dataset(config.dataset_path);
    } catch (const iws::Error& e) {
        return report_error("dataset", e, e.kind() == iws::ErrorKind::ConfigError ? kExitConfig : kExitDataset);
    }

    try {
        const iws::RunResults results = iws::run_experiment(config, subjects, jobs);
        iws::write_file_atomic(config.output_path, iws::report_text(results));
        fs::path csv = config.output_path;
        csv.replace_extension(".csv");
        iws::write_file_atomic(csv, iws::report_csv(results));
        spdlog::info("report written to {}", config.output_path.string());
    } catch (const iws::Error& e) {
        return report_error("run", e, exit_code_for(e.kind()));
    }
    return 0;
}

int cmd_score(const fs::path& pred_path, const fs::path& dataset_dir) {
    std::map<std::string, iws::SubjectDataset> by_subject;
    json predictions;
    try {
        for (auto& ds : iws::read_dataset(dataset_dir)) by_subject.emplace(ds.subject_id, std::move(ds));
        predictions = iws::read_config_file(pred_path);
    } catch (const iws::Error& e) {
        return report_error("input", e, kExitDataset);
    }

    try {
        if (!predictions.is_object() || !predictions.contains("predictions") || !predictions["predictions"].is_array())
            iws::fail(iws::ErrorKind::MalformedFile, "predictions: expected array");
        std::vector<iws::TrialScore> scores;
        for (const json& entry : predictions["predictions"]) {
            const auto subject = entry.at("subject_id").get<std::string>();
            const int index = entry.at("trial_index").get<int>();
            const auto bins = entry.at("bins").get<iws::BinaryVector>();
            const auto it = by_subject.find(subject);
            if (it == by_subject.end() || index < 0 || index >= static_cast<int>(it->second.trials.size()))
                iws::fail(iws::ErrorKind::MalformedFile, "no trial " + subject + "#" + std::to_string(index));
            const iws::Trial& trial = it->second.trials[static_cast<std::size_t>(index)];
            const auto truth = iws::truth_bins(trial, iws::bin_count(trial.sample_count()));
            std::string id = iws::trial_file_name(subject, index);
            id.resize(id.size() - 5);
            const iws::TrialScore s = iws::score_trial(bins, truth, id);
            std::printf("%s precision=%.6f recall=%.6f f1=%.6f\n", s.trial_id.c_str(), s.precision, s.recall, s.f1);
            scores.push_back(s);
        }
        const iws::Aggregate a = iws::aggregate(scores);
        std::printf("aggregate precision=%.6f±%.6f recall=%.6f±%.6f f1=%.6f±%.6f\n", a.mean.precision,
                    a.std.precision, a.mean.recall, a.std.recall, a.mean.f1, a.std.f1);
    } catch (const iws::Error& e) {
        return report_error("score", e, kExitDataset);
    } catch (const json::exception& e) {
        spdlog::error("score: malformed prediction file: {}", e.what());
        return kExitDataset;
    }
    return 0;
}

int cmd_features(const fs::path& dataset_dir, int feature_set, const fs::path& out) {
    try {
        const auto subjects = iws::read_dataset(dataset_dir);
        std::vector<iws::FeatureVector> vectors;
        std::int64_t id = 0;
        for (const auto& ds : subjects) {
            for (const auto& raw : ds.trials) {
                for (const auto& w : iws::segment_training_trial(iws::car_filter(raw))) {
                    if (feature_set <= 3) {
                        vectors.push_back(iws::extract_features(w, feature_set, {}, id));
                    } else {
                        vectors.push_back(iws::assemble_fs4(iws::extract_features(w, 1, {}, id),
                                                            iws::extract_features(w, 2, {}, id),
                                                            iws::extract_features(w, 3, {}, id)));
                    }
                    ++id;
                }
            }
        }
        iws::write_feature_csv(out, vectors);
        spdlog::info("wrote {} feature vectors to {}", vectors.size(), out.string());
    } catch (const iws::Error& e) {
        return report_error("features", e, exit_code_for(e.kind()));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imagined-word segment detection in continuous EEG trials"};
    app.require_subcommand(1);
    app.fallthrough();

    int jobs = 1;
    std::string log_level = "info";
    app.add_option("--jobs", jobs, "Parallel subjects")->check(CLI::PositiveNumber);
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

    std::string config, out, pred, dataset;
    int feature_set = 1;

    auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
    gen->add_option("--config", config, "Synthetic dataset config (JSON)")->required();
    gen->add_option("--out", out, "Output dataset directory")->required();

    auto* run = app.add_subcommand("run", "Run the per-subject experiment and write a report");
    run->add_option("--config", config, "Run config (JSON)")->required();
    run->add_option("--out", out, "Report path (overrides output_path)");

    auto* score = app.add_subcommand("score", "Score per-trial bin predictions against a dataset");
    score->add_option("--pred", pred, "Prediction file (JSON)")->required();
    score->add_option("--dataset", dataset, "Dataset directory")->required();

    auto* feats = app.add_subcommand("features", "Export training-window feature vectors as CSV");
    feats->add_option("--dataset", dataset, "Dataset directory")->required();
    feats->add_option("--feature-set", feature_set, "Feature set 1..4")->check(CLI::Range(1, 4));
    feats->add_option("--out", out, "CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    auto logger = spdlog::stderr_color_mt("iws");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(log_level));

    if (*gen) return cmd_generate(config, out);
    if (*run) return cmd_run(config, out, jobs);
    if (*score) return cmd_score(pred, dataset);
    if (*feats) return cmd_features(dataset, feature_set, out);
    return kExitConfig;
}

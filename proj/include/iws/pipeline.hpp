#pragma once

#include "iws/eval.hpp"
#include "iws/feature_sets.hpp"
#include "iws/learn.hpp"
#include "iws/preprocess.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace iws {

struct RunConfig {
    std::filesystem::path dataset_path;
    std::vector<int> feature_sets{1};
    std::vector<ClassifierKind> classifiers{ClassifierKind::RandomForest};
    int folds = kFoldCount;
    double train_ratio = kTrainRatio;
    WindowingParams windowing;
    std::uint64_t seed = 0;
    std::filesystem::path output_path;
    double pca_target_ratio = 0.90;
    int rf_trees = 100;
    int knn_k = 50;
};

/// Throws ConfigError naming the offending field.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
void validate(const RunConfig& config);

/// Runs the per-subject protocol on already-loaded data:
/// CAR, fold plan, then per fold: labeled training windows, features, scaler (and PCA
/// for set 5) fit on training trials only, classifier, continuous test windows,
/// window reduction, error correction, scoring.
///
/// Subjects run on up to `jobs` threads; every seed is derived from (root seed, subject,
/// fold), so the result does not depend on the schedule.
RunResults run_experiment(const RunConfig& config, const std::vector<SubjectDataset>& subjects, int jobs = 1);

/// Loads `config.dataset_path` and runs the experiment.
RunResults run_experiment(const RunConfig& config, int jobs = 1);

/// Writes `text` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Serialized report as written to disk (2-space indented JSON plus newline).
std::string report_text(const RunResults& results);

}  // namespace iws

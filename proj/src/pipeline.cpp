#include "iws/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

namespace iws {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* name, T& out) {
    if (!j.contains(name)) return;
    try {
        out = j.at(name).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::ConfigError, std::string(name) + ": wrong type");
    }
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    require(j.is_object(), ErrorKind::ConfigError, "config: expected JSON object");
    RunConfig c;
    std::string dataset;
    read_field(j, "dataset_path", dataset);
    c.dataset_path = dataset;
    read_field(j, "feature_sets", c.feature_sets);
    if (j.contains("classifiers")) {
        std::vector<std::string> names;
        read_field(j, "classifiers", names);
        c.classifiers.clear();
        for (const auto& n : names) {
            try {
                c.classifiers.push_back(classifier_kind_from_string(n));
            } catch (const Error&) {
                fail(ErrorKind::ConfigError, "classifiers: unknown classifier '" + n + "'");
            }
        }
    }
    read_field(j, "folds", c.folds);
    read_field(j, "train_ratio", c.train_ratio);
    read_field(j, "window_samples", c.windowing.window_samples);
    read_field(j, "step_samples", c.windowing.step_samples);
    read_field(j, "seed", c.seed);
    std::string output;
    read_field(j, "output_path", output);
    c.output_path = output;
    read_field(j, "pca_target_ratio", c.pca_target_ratio);
    read_field(j, "rf_trees", c.rf_trees);
    read_field(j, "knn_k", c.knn_k);
    validate(c);
    return c;
}

json to_json(const RunConfig& c) {
    std::vector<std::string> classifiers;
    for (auto k : c.classifiers) classifiers.push_back(to_string(k));
    return json{{"dataset_path", c.dataset_path.string()},
                {"feature_sets", c.feature_sets},
                {"classifiers", classifiers},
                {"folds", c.folds},
                {"train_ratio", c.train_ratio},
                {"window_samples", c.windowing.window_samples},
                {"step_samples", c.windowing.step_samples},
                {"seed", c.seed},
                {"pca_target_ratio", c.pca_target_ratio},
                {"rf_trees", c.rf_trees},
                {"knn_k", c.knn_k}};
}

void validate(const RunConfig& c) {
    auto check = [](bool ok, const std::string& field, const std::string& why) {
        require(ok, ErrorKind::ConfigError, field + ": " + why);
    };
    check(!c.feature_sets.empty(), "feature_sets", "must not be empty");
    for (int fs : c.feature_sets) check(fs >= 1 && fs <= 5, "feature_sets", "entries must be in 1..5");
    check(std::set<int>(c.feature_sets.begin(), c.feature_sets.end()).size() == c.feature_sets.size(),
          "feature_sets", "duplicate entry");
    check(!c.classifiers.empty(), "classifiers", "must not be empty");
    check(c.folds >= 1, "folds", "must be >= 1");
    check(c.train_ratio > 0.0 && c.train_ratio < 1.0, "train_ratio", "must be in (0, 1)");
    check(c.windowing.window_samples == kWindowSamples, "window_samples",
          "feature extraction requires " + std::to_string(kWindowSamples));
    check(c.windowing.step_samples > 0 && c.windowing.step_samples <= c.windowing.window_samples, "step_samples",
          "must be in [1, window_samples]");
    check(c.pca_target_ratio > 0.0 && c.pca_target_ratio <= 1.0, "pca_target_ratio", "must be in (0, 1]");
    check(c.rf_trees > 0, "rf_trees", "must be positive");
    check(c.knn_k > 0, "knn_k", "must be positive");
}

namespace {

// Base feature sets (1..3) are computed once per trial and shared by every fold.
struct TrialFeatures {
    std::array<MatrixXd, 3> train;  // indexed by base set - 1
    Labels train_labels;
    std::array<MatrixXd, 3> test;
};

MatrixXd rows_for(const std::array<MatrixXd, 3>& base, int fs) {
    if (fs <= 3) return base[fs - 1];
    MatrixXd out(base[0].rows(), kFs4Width);
    out << base[0], base[1], base[2];
    return out;
}

std::string trial_id(const SubjectDataset& ds, int index) {
    std::string name = trial_file_name(ds.subject_id, index);
    return name.substr(0, name.size() - 5);  // drop ".json"
}

class StageTimer {
public:
    StageTimer(std::string subject, std::string stage)
        : subject_(std::move(subject)), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        spdlog::info("subject {} stage {:<9} {:.3f} s", subject_, stage_, elapsed.count());
    }

private:
    std::string subject_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<SubjectReport> run_subject(const RunConfig& config, const SubjectDataset& raw, std::size_t subject_index) {
    const std::uint64_t subject_seed = derive_seed(config.seed, subject_index, 0x7375626aU);
    const int n_trials = static_cast<int>(raw.trials.size());

    std::set<int> base_sets;
    for (int fs : config.feature_sets) {
        if (fs <= 3) base_sets.insert(fs);
        else base_sets.insert({1, 2, 3});
    }

    std::vector<Trial> trials;
    {
        StageTimer timer(raw.subject_id, "car");
        for (const auto& t : raw.trials) trials.push_back(car_filter(t));
    }

    FoldPlan plan;
    {
        StageTimer timer(raw.subject_id, "folds");
        plan = make_fold_plan(n_trials, derive_seed(subject_seed, 0x706c616eU), config.folds, config.train_ratio);
    }

    std::vector<TrialFeatures> cache(static_cast<std::size_t>(n_trials));
    {
        StageTimer timer(raw.subject_id, "features");
        for (int i = 0; i < n_trials; ++i) {
            const Trial& t = trials[static_cast<std::size_t>(i)];
            std::vector<SignalInstance> train_windows, test_windows;
            try {
                train_windows = segment_training_trial(t, config.windowing);
                test_windows = segment_test_trial(t, config.windowing);
            } catch (const Error& e) {
                fail(e.kind(), "trial " + trial_id(raw, i) + ": " + e.what());
            }
            TrialFeatures& f = cache[static_cast<std::size_t>(i)];
            for (const auto& w : train_windows) f.train_labels.push_back(static_cast<int>(*w.label));
            for (int fs : base_sets) {
                try {
                    f.train[fs - 1] = extract_feature_matrix(train_windows, fs);
                    f.test[fs - 1] = extract_feature_matrix(test_windows, fs);
                } catch (const Error& e) {
                    fail(e.kind(), "trial " + trial_id(raw, i) + ", feature set " + std::to_string(fs) + ": " + e.what());
                }
            }
        }
    }

    std::vector<SubjectReport> reports;
    for (int fs : config.feature_sets)
        for (ClassifierKind kind : config.classifiers)
            reports.push_back(SubjectReport{raw.subject_id, kind, fs, {}});

    StageTimer timer(raw.subject_id, "classify");
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const Fold& fold = plan.folds[f];
        const std::uint64_t fold_seed = derive_seed(subject_seed, f + 1);
        std::size_t report_index = 0;
        for (int fs : config.feature_sets) {
            std::vector<MatrixXd> blocks;
            Labels labels;
            for (int t : fold.train) {
                const auto& c = cache[static_cast<std::size_t>(t)];
                blocks.push_back(rows_for(c.train, fs));
                labels.insert(labels.end(), c.train_labels.begin(), c.train_labels.end());
            }
            Eigen::Index n_rows = 0;
            for (const auto& b : blocks) n_rows += b.rows();
            MatrixXd X(n_rows, blocks.front().cols());
            Eigen::Index at = 0;
            for (const auto& b : blocks) {
                X.middleRows(at, b.rows()) = b;
                at += b.rows();
            }

            const ScalerModel scaler = scaler_fit(X);
            X = scaler_apply(scaler, X);
            std::optional<PcaModel> pca;
            if (fs == 5) {
                try {
                    pca = pca_fit(X, config.pca_target_ratio);
                } catch (const Error& e) {
                    fail(e.kind(), "subject " + raw.subject_id + ", fold " + std::to_string(f) + ", pca: " + e.what());
                }
                X = pca_apply(*pca, X);
            }

            for (ClassifierKind kind : config.classifiers) {
                ClassifierSpec spec;
                spec.kind = kind;
                spec.rf_trees = config.rf_trees;
                spec.knn_k = config.knn_k;
                spec.seed = derive_seed(fold_seed, static_cast<std::uint64_t>(fs), static_cast<std::uint64_t>(kind));
                Model model;
                try {
                    model = train(spec, X, labels);
                } catch (const Error& e) {
                    fail(e.kind(), "subject " + raw.subject_id + ", fold " + std::to_string(f) + ", train " +
                                       to_string(kind) + ": " + e.what());
                }

                FoldResult result;
                result.fold = static_cast<int>(f);
                result.seed = spec.seed;
                result.train_trials = fold.train;
                result.test_trials = fold.test;
                if (pca) {
                    result.pca_components = pca->component_count();
                    result.pca_retained_ratio = pca->retained_variance_ratio;
                }
                for (int t : fold.test) {
                    MatrixXd test_rows = scaler_apply(scaler, rows_for(cache[static_cast<std::size_t>(t)].test, fs));
                    if (pca) test_rows = pca_apply(*pca, test_rows);
                    const Labels raw_labels = model.predict(test_rows);
                    const TrialPrediction p =
                        smooth_trial_prediction(trials[static_cast<std::size_t>(t)], raw_labels, config.windowing);
                    result.scores.push_back(score_trial(p.corrected_labels, p.truth_labels, trial_id(raw, t)));
                }
                reports[report_index++].folds.push_back(std::move(result));
            }
        }
    }
    return reports;
}

}  // namespace

RunResults run_experiment(const RunConfig& config, const std::vector<SubjectDataset>& subjects, int jobs) {
    validate(config);
    require(!subjects.empty(), ErrorKind::EmptyInput, "run_experiment: no subjects");
    for (const auto& s : subjects) validate(s);

    const std::size_t n = subjects.size();
    std::vector<std::vector<SubjectReport>> per_subject(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                per_subject[i] = run_subject(config, subjects[i], i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(n));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunResults results;
    results.config = to_json(config);
    results.protocol_tag = to_string(subjects.front().protocol_tag);
    // Group-major order: feature set, classifier, then subject.
    const std::size_t combos = config.feature_sets.size() * config.classifiers.size();
    for (std::size_t c = 0; c < combos; ++c)
        for (std::size_t s = 0; s < n; ++s) results.subjects.push_back(std::move(per_subject[s][c]));
    return results;
}

RunResults run_experiment(const RunConfig& config, int jobs) {
    validate(config);
    const auto subjects = read_dataset(config.dataset_path);
    return run_experiment(config, subjects, jobs);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) fail(ErrorKind::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::IoError, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string report_text(const RunResults& results) { return build_report(results).dump(2) + "\n"; }

}  // namespace iws

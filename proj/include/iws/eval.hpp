#pragma once

#include "iws/learn.hpp"
#include "iws/postprocess.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iws {

struct TrialScore {
    std::string trial_id;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Bin-wise precision/recall/F1 with 1 as the positive class; 0/0 counts as 0.
TrialScore score_trial(const BinaryVector& pred, const BinaryVector& truth, std::string trial_id = {});

struct MetricTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Arithmetic mean and population standard deviation per metric.
struct Aggregate {
    MetricTriple mean;
    MetricTriple std;
};

Aggregate aggregate(const std::vector<TrialScore>& scores);

struct FoldResult {
    int fold = 0;
    std::uint64_t seed = 0;
    std::vector<int> train_trials;
    std::vector<int> test_trials;
    std::optional<int> pca_components;
    std::optional<double> pca_retained_ratio;
    std::vector<TrialScore> scores;
};

struct SubjectReport {
    std::string subject_id;
    ClassifierKind classifier = ClassifierKind::RandomForest;
    int feature_set_id = 1;
    std::vector<FoldResult> folds;

    /// Pooled over every scored test trial of every fold.
    Aggregate summary() const;
};

struct RunResults {
    nlohmann::json config;       // echoed verbatim
    std::string protocol_tag;
    std::vector<SubjectReport> subjects;  // one per (subject, feature set, classifier)
};

inline constexpr int kReportSchemaVersion = 1;

/// Box-plot quartiles with linear interpolation between order statistics.
struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};
Quartiles quartiles(std::vector<double> values);

/// Report document: config echo, reference targets, per (feature set, classifier) group the
/// per-subject summaries with 1.5 IQR outlier flags, population mean/std, and the best
/// combination per metric.
nlohmann::json build_report(const RunResults& results);

/// One row per subject x feature set x classifier.
std::string report_csv(const RunResults& results);

/// Abbreviation used in result cells, e.g. "(RF, 5)".
std::string classifier_abbreviation(ClassifierKind kind);

}  // namespace iws

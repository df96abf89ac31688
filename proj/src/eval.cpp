#include "iws/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace iws {

using nlohmann::json;

TrialScore score_trial(const BinaryVector& pred, const BinaryVector& truth, std::string trial_id) {
    require(pred.size() == truth.size(), ErrorKind::LengthMismatch,
            "score_trial: prediction has " + std::to_string(pred.size()) + " bins, truth has " +
                std::to_string(truth.size()));
    require(!pred.empty(), ErrorKind::EmptyInput, "score_trial: empty vectors");
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0;
        const bool t = truth[i] != 0;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
    }
    TrialScore s;
    s.trial_id = std::move(trial_id);
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

Aggregate aggregate_triples(const std::vector<MetricTriple>& values) {
    require(!values.empty(), ErrorKind::EmptyInput, "aggregate: no scores");
    std::vector<double> p, r, f;
    for (const auto& v : values) {
        p.push_back(v.precision);
        r.push_back(v.recall);
        f.push_back(v.f1);
    }
    Aggregate a;
    std::tie(a.mean.precision, a.std.precision) = mean_std(p);
    std::tie(a.mean.recall, a.std.recall) = mean_std(r);
    std::tie(a.mean.f1, a.std.f1) = mean_std(f);
    return a;
}

json to_json(const MetricTriple& m) {
    return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

double metric(const MetricTriple& m, const std::string& name) {
    if (name == "precision") return m.precision;
    if (name == "recall") return m.recall;
    return m.f1;
}

std::string format_cell(ClassifierKind kind, int fs, double mean, double std) {
    char buffer[96];
    std::snprintf(buffer, sizeof buffer, "(%s, %d) %.2f ± %.2f", classifier_abbreviation(kind).c_str(), fs,
                  mean, std);
    return buffer;
}

struct ReferenceTarget {
    const char* dataset;
    ClassifierKind classifier;
    int feature_set;
    double f1_mean;
    double f1_std;
};

// Best published F1 per dataset (all five feature sets considered).
constexpr ReferenceTarget kReferenceTargets[] = {
    {"dataset1", ClassifierKind::RandomForest, 5, 0.73, 0.07},
    {"dataset2", ClassifierKind::RandomForest, 5, 0.79, 0.04},
    {"dataset3", ClassifierKind::LogReg, 4, 0.68, 0.04},
};

const char* const kMetrics[] = {"f1", "precision", "recall"};

}  // namespace

Aggregate aggregate(const std::vector<TrialScore>& scores) {
    std::vector<MetricTriple> triples;
    for (const auto& s : scores) triples.push_back({s.precision, s.recall, s.f1});
    return aggregate_triples(triples);
}

Aggregate SubjectReport::summary() const {
    std::vector<TrialScore> all;
    for (const auto& f : folds) all.insert(all.end(), f.scores.begin(), f.scores.end());
    return aggregate(all);
}

Quartiles quartiles(std::vector<double> v) {
    require(!v.empty(), ErrorKind::EmptyInput, "quartiles: no values");
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {at(0.25), at(0.5), at(0.75)};
}

std::string classifier_abbreviation(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::RandomForest: return "RF";
        case ClassifierKind::Knn: return "KNN";
        case ClassifierKind::LogReg: return "LR";
    }
    return "?";
}

json build_report(const RunResults& results) {
    require(!results.subjects.empty(), ErrorKind::EmptyInput, "build_report: no subject results");

    // Groups keep first-appearance order so the document follows the run configuration.
    std::vector<std::pair<int, ClassifierKind>> order;
    std::map<std::pair<int, ClassifierKind>, std::vector<const SubjectReport*>> groups;
    for (const auto& s : results.subjects) {
        const auto key = std::make_pair(s.feature_set_id, s.classifier);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&s);
    }

    json groups_json = json::array();
    struct Best {
        double mean = -1.0, std = 0.0;
        int fs = 0;
        ClassifierKind kind = ClassifierKind::RandomForest;
    };
    std::map<std::string, Best> best;

    for (const auto& key : order) {
        const auto& members = groups[key];
        std::vector<MetricTriple> subject_means;
        std::vector<Aggregate> summaries;
        for (const SubjectReport* s : members) {
            summaries.push_back(s->summary());
            subject_means.push_back(summaries.back().mean);
        }
        const Aggregate population = aggregate_triples(subject_means);

        json quartiles_json = json::object();
        std::map<std::string, std::pair<double, double>> fences;
        for (const char* m : kMetrics) {
            std::vector<double> values;
            for (const auto& v : subject_means) values.push_back(metric(v, m));
            const Quartiles q = quartiles(values);
            const double iqr = q.q3 - q.q1;
            fences[m] = {q.q1 - 1.5 * iqr, q.q3 + 1.5 * iqr};
            quartiles_json[m] = json{{"q1", q.q1}, {"median", q.median}, {"q3", q.q3}};
        }

        json subjects_json = json::array();
        for (std::size_t i = 0; i < members.size(); ++i) {
            const SubjectReport& s = *members[i];
            json outliers = json::object();
            for (const char* m : kMetrics) {
                const double v = metric(summaries[i].mean, m);
                outliers[m] = v < fences[m].first || v > fences[m].second;
            }
            json folds = json::array();
            for (const auto& f : s.folds) {
                json scores = json::array();
                for (const auto& t : f.scores)
                    scores.push_back(json{{"trial_id", t.trial_id},
                                          {"precision", t.precision},
                                          {"recall", t.recall},
                                          {"f1", t.f1}});
                json fold{{"fold", f.fold},
                          {"seed", f.seed},
                          {"train_trials", f.train_trials},
                          {"test_trials", f.test_trials},
                          {"trial_scores", std::move(scores)}};
                if (f.pca_components) fold["pca_components"] = *f.pca_components;
                if (f.pca_retained_ratio) fold["pca_retained_ratio"] = *f.pca_retained_ratio;
                folds.push_back(std::move(fold));
            }
            subjects_json.push_back(json{{"subject_id", s.subject_id},
                                         {"mean", to_json(summaries[i].mean)},
                                         {"std", to_json(summaries[i].std)},
                                         {"outlier", std::move(outliers)},
                                         {"folds", std::move(folds)}});
        }

        for (const char* m : kMetrics) {
            const double mean = metric(population.mean, m);
            Best& b = best[m];
            if (mean > b.mean) b = {mean, metric(population.std, m), key.first, key.second};
        }

        groups_json.push_back(json{{"feature_set", key.first},
                                   {"classifier", to_string(key.second)},
                                   {"subjects", std::move(subjects_json)},
                                   {"population", json{{"mean", to_json(population.mean)},
                                                       {"std", to_json(population.std)}}},
                                   {"quartiles", std::move(quartiles_json)}});
    }

    json best_json = json::object();
    for (const char* m : kMetrics) {
        const Best& b = best[m];
        best_json[m] = json{{"classifier", to_string(b.kind)},
                            {"feature_set", b.fs},
                            {"mean", b.mean},
                            {"std", b.std},
                            {"cell", format_cell(b.kind, b.fs, b.mean, b.std)}};
    }

    json references = json::array();
    for (const auto& r : kReferenceTargets)
        references.push_back(json{{"dataset", r.dataset},
                                  {"classifier", to_string(r.classifier)},
                                  {"feature_set", r.feature_set},
                                  {"f1_mean", r.f1_mean},
                                  {"f1_std", r.f1_std},
                                  {"cell", format_cell(r.classifier, r.feature_set, r.f1_mean, r.f1_std)}});

    return json{{"format", "iws-report"},
                {"schema_version", kReportSchemaVersion},
                {"protocol_tag", results.protocol_tag},
                {"config", results.config},
                {"reference_targets", std::move(references)},
                {"results", std::move(groups_json)},
                {"best", std::move(best_json)}};
}

std::string report_csv(const RunResults& results) {
    std::ostringstream os;
    os.precision(17);
    os << "subject_id,feature_set,classifier,n_trials,precision_mean,precision_std,recall_mean,recall_std,f1_mean,"
          "f1_std\n";
    for (const auto& s : results.subjects) {
        std::size_t n = 0;
        for (const auto& f : s.folds) n += f.scores.size();
        const Aggregate a = s.summary();
        os << s.subject_id << ',' << s.feature_set_id << ',' << to_string(s.classifier) << ',' << n << ','
           << a.mean.precision << ',' << a.std.precision << ',' << a.mean.recall << ',' << a.std.recall << ','
           << a.mean.f1 << ',' << a.std.f1 << '\n';
    }
    return os.str();
}

}  // namespace iws

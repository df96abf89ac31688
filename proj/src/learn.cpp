#include "iws/learn.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace iws {

using nlohmann::json;

RandomForestModel train_forest(const ClassifierSpec& spec, const MatrixXd& X, const Labels& y);

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::RandomForest: return "rf";
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::LogReg: return "logreg";
    }
    return "rf";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
    if (s == "rf" || s == "random_forest") return ClassifierKind::RandomForest;
    if (s == "knn") return ClassifierKind::Knn;
    if (s == "logreg" || s == "lr" || s == "logistic_regression") return ClassifierKind::LogReg;
    fail(ErrorKind::ConfigError, "classifier: unknown kind '" + s + "'");
}

void validate(const ClassifierSpec& spec) {
    auto check = [](bool ok, const char* what) { require(ok, ErrorKind::ConfigError, what); };
    switch (spec.kind) {
        case ClassifierKind::RandomForest:
            check(spec.rf_trees > 0, "rf_trees must be positive");
            check(spec.rf_features_per_split >= 0, "rf_features_per_split must be >= 0");
            break;
        case ClassifierKind::Knn: check(spec.knn_k > 0, "knn_k must be positive"); break;
        case ClassifierKind::LogReg:
            check(spec.logreg_c > 0, "logreg_c must be positive");
            check(spec.logreg_max_iterations > 0, "logreg_max_iterations must be positive");
            check(spec.logreg_tolerance > 0, "logreg_tolerance must be positive");
            break;
    }
}

FoldPlan make_fold_plan(int trial_count, std::uint64_t seed, int folds, double train_ratio) {
    require(trial_count >= kMinTrialsPerSubject, ErrorKind::TooFewTrials,
            "fold plan needs at least " + std::to_string(kMinTrialsPerSubject) + " trials, got " +
                std::to_string(trial_count));
    require(folds > 0 && train_ratio > 0.0 && train_ratio < 1.0, ErrorKind::ConfigError,
            "fold plan: need folds > 0 and 0 < train_ratio < 1");
    const int n_train = static_cast<int>(std::lround(train_ratio * trial_count));
    require(n_train >= 1 && n_train < trial_count, ErrorKind::TooFewTrials, "fold plan: empty train or test side");

    FoldPlan plan;
    for (int f = 0; f < folds; ++f) {
        std::vector<int> order(trial_count);
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(f), 0x666f6c64U));
        std::shuffle(order.begin(), order.end(), rng);
        Fold fold;
        fold.train.assign(order.begin(), order.begin() + n_train);
        fold.test.assign(order.begin() + n_train, order.end());
        std::sort(fold.train.begin(), fold.train.end());
        std::sort(fold.test.begin(), fold.test.end());
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

FoldPlan make_fold_plan(const SubjectDataset& dataset, std::uint64_t seed) {
    return make_fold_plan(static_cast<int>(dataset.trials.size()), seed);
}

namespace {

double log1p_exp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Mean log-loss plus ||w||^2 / (2 C n); same minimizer as C * sum(log-loss) + ||w||^2 / 2.
struct LogisticObjective {
    const MatrixXd& X;
    VectorXd y;
    double penalty;

    double value(const VectorXd& w, double b) const {
        const VectorXd z = (X * w).array() + b;
        double loss = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) loss += log1p_exp(z(i)) - y(i) * z(i);
        return loss / static_cast<double>(X.rows()) + 0.5 * penalty * w.squaredNorm();
    }

    void gradient(const VectorXd& w, double b, VectorXd& gw, double& gb) const {
        const VectorXd z = (X * w).array() + b;
        VectorXd residual(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) residual(i) = sigmoid(z(i)) - y(i);
        const double n = static_cast<double>(X.rows());
        gw = X.transpose() * residual / n + penalty * w;
        gb = residual.sum() / n;
    }
};

LogRegModel train_logreg(const ClassifierSpec& spec, const MatrixXd& X, const Labels& labels) {
    const double n = static_cast<double>(X.rows());
    VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = labels[static_cast<std::size_t>(i)];
    const LogisticObjective objective{X, y, 1.0 / (spec.logreg_c * n)};

    LogRegModel m;
    m.weights = VectorXd::Zero(X.cols());
    double loss = objective.value(m.weights, m.intercept);
    m.loss_history.push_back(loss);

    VectorXd gw;
    double gb = 0.0;
    double step = 1.0;
    constexpr double kArmijo = 1e-4;
    for (int it = 0; it < spec.logreg_max_iterations; ++it) {
        objective.gradient(m.weights, m.intercept, gw, gb);
        const double grad_sq = gw.squaredNorm() + gb * gb;
        if (std::sqrt(grad_sq) < spec.logreg_tolerance) break;

        step = std::min(step * 2.0, 1e6);
        bool accepted = false;
        while (step > 1e-16) {
            const VectorXd w_new = m.weights - step * gw;
            const double b_new = m.intercept - step * gb;
            const double loss_new = objective.value(w_new, b_new);
            if (loss_new <= loss - kArmijo * step * grad_sq) {
                m.weights = w_new;
                m.intercept = b_new;
                loss = loss_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        m.loss_history.push_back(loss);
        m.iterations = it + 1;
    }
    require(m.weights.allFinite() && std::isfinite(m.intercept), ErrorKind::NumericalFailure,
            "logistic regression diverged");
    return m;
}

Labels predict_knn(const KnnModel& m, const MatrixXd& X) {
    Labels out(static_cast<std::size_t>(X.rows()));
    const Eigen::Index n = m.X.rows();
    std::vector<std::pair<double, int>> ranked(static_cast<std::size_t>(n));
    const auto k = static_cast<std::ptrdiff_t>(m.k);
    for (Eigen::Index q = 0; q < X.rows(); ++q) {
        const VectorXd dist = (m.X.rowwise() - X.row(q)).rowwise().squaredNorm();
        for (Eigen::Index i = 0; i < n; ++i) ranked[static_cast<std::size_t>(i)] = {dist(i), m.y[static_cast<std::size_t>(i)]};
        // Ordering by (distance, label) makes the neighbour multiset independent of row order.
        std::nth_element(ranked.begin(), ranked.begin() + (k - 1), ranked.end());
        int votes = 0;
        for (std::ptrdiff_t i = 0; i < k; ++i) votes += ranked[static_cast<std::size_t>(i)].second;
        out[static_cast<std::size_t>(q)] = 2 * votes > m.k ? 1 : 0;
    }
    return out;
}

}  // namespace

Model train(const ClassifierSpec& spec, const MatrixXd& X, const Labels& y) {
    validate(spec);
    require(X.rows() == static_cast<Eigen::Index>(y.size()), ErrorKind::LengthMismatch,
            "train: feature rows and labels differ in count");
    require(X.rows() >= 2, ErrorKind::EmptyInput, "train: need at least 2 samples");
    require(X.allFinite(), ErrorKind::NumericalFailure, "train: non-finite features");
    for (int label : y) require(label == 0 || label == 1, ErrorKind::InvariantViolation, "train: labels must be 0/1");
    const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
    const int width = static_cast<int>(X.cols());

    switch (spec.kind) {
        case ClassifierKind::RandomForest:
            require(has0 && has1, ErrorKind::SingleClassTraining, "random forest needs both classes");
            return Model(spec, train_forest(spec, X, y), width);
        case ClassifierKind::LogReg:
            require(has0 && has1, ErrorKind::SingleClassTraining, "logistic regression needs both classes");
            return Model(spec, train_logreg(spec, X, y), width);
        case ClassifierKind::Knn: {
            KnnModel m{X, y, spec.knn_k};
            if (X.rows() < spec.knn_k) {
                spdlog::warn("knn: only {} training samples, using k = {} instead of {}", X.rows(), X.rows(),
                             spec.knn_k);
                m.k = static_cast<int>(X.rows());
            }
            return Model(spec, std::move(m), width);
        }
    }
    fail(ErrorKind::ConfigError, "unknown classifier kind");
}

Labels Model::predict(const MatrixXd& X) const {
    if (X.rows() == 0) return {};
    require(X.cols() == width_, ErrorKind::WidthMismatch,
            "predict: model expects width " + std::to_string(width_) + ", got " + std::to_string(X.cols()));
    return std::visit(
        [&](const auto& m) -> Labels {
            using T = std::decay_t<decltype(m)>;
            Labels out(static_cast<std::size_t>(X.rows()));
            if constexpr (std::is_same_v<T, RandomForestModel>) {
                for (Eigen::Index i = 0; i < X.rows(); ++i) {
                    const VectorXd row = X.row(i).transpose();
                    int votes = 0;
                    for (const auto& tree : m.trees) votes += tree.predict(row);
                    out[static_cast<std::size_t>(i)] = 2 * votes > static_cast<int>(m.trees.size()) ? 1 : 0;
                }
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                out = predict_knn(m, X);
            } else {
                const VectorXd z = (X * m.weights).array() + m.intercept;
                for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = z(i) > 0.0 ? 1 : 0;
            }
            return out;
        },
        impl_);
}

namespace {

json spec_to_json(const ClassifierSpec& s) {
    return json{{"kind", to_string(s.kind)},
                {"rf_trees", s.rf_trees},
                {"rf_features_per_split", s.rf_features_per_split},
                {"rf_bootstrap", s.rf_bootstrap},
                {"knn_k", s.knn_k},
                {"logreg_c", s.logreg_c},
                {"logreg_max_iterations", s.logreg_max_iterations},
                {"logreg_tolerance", s.logreg_tolerance},
                {"seed", s.seed}};
}

ClassifierSpec spec_from_json(const json& j) {
    ClassifierSpec s;
    s.kind = classifier_kind_from_string(j.at("kind").get<std::string>());
    s.rf_trees = j.at("rf_trees").get<int>();
    s.rf_features_per_split = j.at("rf_features_per_split").get<int>();
    s.rf_bootstrap = j.at("rf_bootstrap").get<bool>();
    s.knn_k = j.at("knn_k").get<int>();
    s.logreg_c = j.at("logreg_c").get<double>();
    s.logreg_max_iterations = j.at("logreg_max_iterations").get<int>();
    s.logreg_tolerance = j.at("logreg_tolerance").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

json matrix_to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const json& rows, int width) {
    MatrixXd m(static_cast<Eigen::Index>(rows.size()), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i].at(static_cast<std::size_t>(j)).get<double>();
    return m;
}

}  // namespace

inline constexpr int kModelFormatVersion = 1;

json Model::to_json() const {
    json j{{"format", "iws-model"}, {"version", kModelFormatVersion}, {"width", width_}, {"spec", spec_to_json(spec_)}};
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RandomForestModel>) {
                json trees = json::array();
                for (const auto& tree : m.trees) {
                    json feature = json::array(), threshold = json::array(), left = json::array(),
                         right = json::array(), label = json::array();
                    for (const auto& node : tree.nodes) {
                        feature.push_back(node.feature);
                        threshold.push_back(node.threshold);
                        left.push_back(node.left);
                        right.push_back(node.right);
                        label.push_back(node.label);
                    }
                    trees.push_back(json{{"feature", feature}, {"threshold", threshold}, {"left", left},
                                         {"right", right}, {"label", label}});
                }
                j["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                j["k"] = m.k;
                j["X"] = matrix_to_json(m.X);
                j["y"] = m.y;
            } else {
                j["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
                j["intercept"] = m.intercept;
                j["iterations"] = m.iterations;
            }
        },
        impl_);
    return j;
}

Model Model::from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "iws-model")
            fail(ErrorKind::MalformedFile, "model: unexpected format tag");
        if (j.at("version").get<int>() != kModelFormatVersion)
            fail(ErrorKind::MalformedFile, "model: unsupported version");
        const ClassifierSpec spec = spec_from_json(j.at("spec"));
        const int width = j.at("width").get<int>();
        switch (spec.kind) {
            case ClassifierKind::RandomForest: {
                RandomForestModel m;
                m.width = width;
                for (const json& t : j.at("trees")) {
                    DecisionTree tree;
                    const auto feature = t.at("feature").get<std::vector<int>>();
                    const auto threshold = t.at("threshold").get<std::vector<double>>();
                    const auto left = t.at("left").get<std::vector<int>>();
                    const auto right = t.at("right").get<std::vector<int>>();
                    const auto label = t.at("label").get<std::vector<int>>();
                    for (std::size_t i = 0; i < feature.size(); ++i)
                        tree.nodes.push_back({feature[i], threshold.at(i), left.at(i), right.at(i), label.at(i)});
                    m.trees.push_back(std::move(tree));
                }
                return Model(spec, std::move(m), width);
            }
            case ClassifierKind::Knn: {
                KnnModel m{matrix_from_json(j.at("X"), width), j.at("y").get<Labels>(), j.at("k").get<int>()};
                return Model(spec, std::move(m), width);
            }
            case ClassifierKind::LogReg: {
                LogRegModel m;
                const auto w = j.at("weights").get<std::vector<double>>();
                m.weights = Eigen::Map<const VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
                m.intercept = j.at("intercept").get<double>();
                m.iterations = j.at("iterations").get<int>();
                return Model(spec, std::move(m), width);
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::MalformedFile, std::string("model: ") + e.what());
    }
    fail(ErrorKind::MalformedFile, "model: unknown kind");
}

}  // namespace iws

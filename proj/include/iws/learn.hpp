#pragma once

#include "iws/common.hpp"
#include "iws/data.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace iws {

using Labels = std::vector<int>;

enum class ClassifierKind { RandomForest, Knn, LogReg };

std::string to_string(ClassifierKind kind);
/// Accepts "rf", "knn", "logreg" (and the long names).
ClassifierKind classifier_kind_from_string(const std::string& s);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::RandomForest;
    int rf_trees = 100;
    // 0 selects floor(sqrt(feature count)).
    int rf_features_per_split = 0;
    bool rf_bootstrap = true;
    int knn_k = 50;
    double logreg_c = 1.0;
    int logreg_max_iterations = 5000;
    double logreg_tolerance = 1e-6;
    std::uint64_t seed = 0;
};

void validate(const ClassifierSpec& spec);

struct Fold {
    std::vector<int> train;  // trial indices, ascending
    std::vector<int> test;
};

struct FoldPlan {
    std::vector<Fold> folds;
};

inline constexpr int kFoldCount = 4;
inline constexpr double kTrainRatio = 0.75;

/// Independent seeded 75/25 shuffles at trial granularity.
FoldPlan make_fold_plan(int trial_count, std::uint64_t seed, int folds = kFoldCount,
                        double train_ratio = kTrainRatio);
FoldPlan make_fold_plan(const SubjectDataset& dataset, std::uint64_t seed);

/// CART tree grown to purity with Gini impurity.
struct DecisionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int label = 0;
    };
    std::vector<Node> nodes;

    int predict(const Eigen::Ref<const VectorXd>& x) const;
};

/// Trains one tree on the rows `sample` of X (duplicates allowed).
DecisionTree train_tree(const MatrixXd& X, const Labels& y, const std::vector<int>& sample, int features_per_split,
                        std::uint64_t seed);

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    int width = 0;
};

struct KnnModel {
    MatrixXd X;
    Labels y;
    int k = 50;
};

struct LogRegModel {
    VectorXd weights;
    double intercept = 0.0;
    // Objective value after each accepted gradient step (first entry is the start point).
    std::vector<double> loss_history;
    int iterations = 0;
};

class Model {
public:
    Model() = default;
    Model(ClassifierSpec spec, std::variant<RandomForestModel, KnnModel, LogRegModel> impl, int width)
        : spec_(spec), impl_(std::move(impl)), width_(width) {}

    const ClassifierSpec& spec() const { return spec_; }
    int width() const { return width_; }
    const auto& impl() const { return impl_; }

    Labels predict(const MatrixXd& X) const;

    nlohmann::json to_json() const;
    static Model from_json(const nlohmann::json& j);

private:
    ClassifierSpec spec_;
    std::variant<RandomForestModel, KnnModel, LogRegModel> impl_;
    int width_ = 0;
};

Model train(const ClassifierSpec& spec, const MatrixXd& X, const Labels& y);
inline Labels predict(const Model& model, const MatrixXd& X) { return model.predict(X); }

}  // namespace iws

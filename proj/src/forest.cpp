#include "iws/learn.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace iws {

int DecisionTree::predict(const Eigen::Ref<const VectorXd>& x) const {
    int at = 0;
    while (nodes[at].feature >= 0) at = x(nodes[at].feature) <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
    return nodes[at].label;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // weighted Gini: n_left * gini_left + n_right * gini_right
};

double weighted_gini(double n, double positives) {
    if (n <= 0.0) return 0.0;
    const double p = positives / n;
    return n * 2.0 * p * (1.0 - p);
}

/// Best threshold on one feature over rows [begin, end) of `index`; feature = -1 if constant.
Split best_split_on(const MatrixXd& X, const Labels& y, const std::vector<int>& index, std::size_t begin,
                    std::size_t end, int feature, std::vector<std::pair<double, int>>& scratch) {
    scratch.clear();
    for (std::size_t i = begin; i < end; ++i) scratch.emplace_back(X(index[i], feature), y[index[i]]);
    std::sort(scratch.begin(), scratch.end());

    const double n = static_cast<double>(scratch.size());
    double total_pos = 0.0;
    for (const auto& [v, label] : scratch) total_pos += label;

    Split best;
    double left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        left_pos += scratch[i].second;
        if (!(scratch[i].first < scratch[i + 1].first)) continue;
        const double nl = static_cast<double>(i + 1);
        const double score = weighted_gini(nl, left_pos) + weighted_gini(n - nl, total_pos - left_pos);
        if (best.feature < 0 || score < best.score) {
            double threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
            if (!(threshold < scratch[i + 1].first)) threshold = scratch[i].first;
            best = {feature, threshold, score};
        }
    }
    return best;
}

}  // namespace

DecisionTree train_tree(const MatrixXd& X, const Labels& y, const std::vector<int>& sample, int features_per_split,
                        std::uint64_t seed) {
    const int width = static_cast<int>(X.cols());
    require(!sample.empty(), ErrorKind::EmptyInput, "train_tree: empty sample");
    require(features_per_split >= 1 && features_per_split <= width, ErrorKind::InvariantViolation,
            "train_tree: features_per_split must be in [1, width]");
    std::mt19937_64 rng(seed);

    DecisionTree tree;
    std::vector<int> index = sample;
    std::vector<int> features(width);
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(index.size());

    struct Pending {
        int node;
        std::size_t begin, end;
    };
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, index.size()}};

    while (!stack.empty()) {
        const Pending job = stack.back();
        stack.pop_back();
        const std::size_t n = job.end - job.begin;
        int positives = 0;
        for (std::size_t i = job.begin; i < job.end; ++i) positives += y[index[i]];
        // Majority label; ties resolve to 0.
        tree.nodes[job.node].label = 2 * positives > static_cast<int>(n) ? 1 : 0;
        if (positives == 0 || positives == static_cast<int>(n) || n < 2) continue;

        std::iota(features.begin(), features.end(), 0);
        Split best;
        // Visit features in random order; the first `features_per_split` are candidates, and
        // more are drawn only while no candidate admits a split.
        for (int drawn = 0; drawn < width; ++drawn) {
            if (drawn >= features_per_split && best.feature >= 0) break;
            const int pick = std::uniform_int_distribution<int>(drawn, width - 1)(rng);
            std::swap(features[drawn], features[pick]);
            const Split s = best_split_on(X, y, index, job.begin, job.end, features[drawn], scratch);
            if (s.feature < 0) continue;
            if (best.feature < 0 || s.score < best.score || (s.score == best.score && s.feature < best.feature))
                best = s;
        }
        if (best.feature < 0) continue;

        const auto mid = std::partition(index.begin() + static_cast<std::ptrdiff_t>(job.begin),
                                         index.begin() + static_cast<std::ptrdiff_t>(job.end),
                                         [&](int r) { return X(r, best.feature) <= best.threshold; });
        const auto split_at = static_cast<std::size_t>(mid - index.begin());

        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const int right = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        auto& node = tree.nodes[job.node];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        stack.push_back({right, split_at, job.end});
        stack.push_back({left, job.begin, split_at});
    }
    return tree;
}

RandomForestModel train_forest(const ClassifierSpec& spec, const MatrixXd& X, const Labels& y) {
    const int n = static_cast<int>(X.rows());
    const int width = static_cast<int>(X.cols());
    const int mtry = spec.rf_features_per_split > 0
                         ? std::min(spec.rf_features_per_split, width)
                         : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(width)))));
    RandomForestModel forest;
    forest.width = width;
    forest.trees.resize(spec.rf_trees);
    // Each tree draws from its own derived seed, so tree order of training is irrelevant.
    for (int t = 0; t < spec.rf_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t), 0x7265U);
        std::vector<int> sample(n);
        if (spec.rf_bootstrap) {
            std::mt19937_64 rng(derive_seed(tree_seed, 1));
            std::uniform_int_distribution<int> draw(0, n - 1);
            for (int& s : sample) s = draw(rng);
        } else {
            std::iota(sample.begin(), sample.end(), 0);
        }
        forest.trees[t] = train_tree(X, y, sample, mtry, derive_seed(tree_seed, 2));
    }
    return forest;
}

}  // namespace iws

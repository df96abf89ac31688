#include "support.hpp"

#include "iws/learn.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace iws;

namespace {

struct Blobs {
    MatrixXd X;
    Labels y;
};

// Two Gaussian clouds, class 1 shifted by `gap` along every axis.
Blobs blobs(int n_per_class, int width, double gap, std::uint64_t seed) {
    Blobs b;
    b.X.resize(2 * n_per_class, width);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 2 * n_per_class; ++i) {
        const int label = i % 2;
        for (int j = 0; j < width; ++j) b.X(i, j) = g(rng) + label * gap;
        b.y.push_back(label);
    }
    return b;
}

double accuracy(const Labels& a, const Labels& b) {
    int same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
    return static_cast<double>(same) / static_cast<double>(a.size());
}

// Newton-Raphson on the same objective: mean log-loss + ||w||^2 / (2 C n), intercept free.
VectorXd newton_logreg(const MatrixXd& X, const Labels& y, double c) {
    const Eigen::Index n = X.rows(), d = X.cols();
    MatrixXd A(n, d + 1);
    A << X, VectorXd::Ones(n);
    VectorXd theta = VectorXd::Zero(d + 1);
    VectorXd reg = VectorXd::Constant(d + 1, 1.0 / (c * n));
    reg(d) = 0.0;
    for (int it = 0; it < 50; ++it) {
        const VectorXd p = (-(A * theta)).array().exp().matrix().unaryExpr([](double e) { return 1.0 / (1.0 + e); });
        VectorXd yv(n);
        for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];
        const VectorXd grad = A.transpose() * (p - yv) / double(n) + reg.cwiseProduct(theta);
        const VectorXd wdiag = p.array() * (1.0 - p.array());
        MatrixXd H = A.transpose() * wdiag.asDiagonal() * A / double(n);
        H.diagonal() += reg;
        theta -= H.ldlt().solve(grad);
    }
    return theta;
}

}  // namespace

TEST_CASE("fold plan: sizes, disjointness, determinism") {
    for (int n : {8, 10, 24, 37}) {
        const FoldPlan plan = make_fold_plan(n, 123);
        REQUIRE(plan.folds.size() == 4);
        const auto n_train = static_cast<std::size_t>(std::lround(0.75 * n));
        for (const auto& f : plan.folds) {
            CHECK(f.train.size() == n_train);
            CHECK(f.test.size() == static_cast<std::size_t>(n) - n_train);
            CHECK(std::is_sorted(f.train.begin(), f.train.end()));
            std::set<int> all(f.train.begin(), f.train.end());
            all.insert(f.test.begin(), f.test.end());
            CHECK(all.size() == static_cast<std::size_t>(n));
            CHECK(*all.begin() == 0);
            CHECK(*all.rbegin() == n - 1);
        }
        const FoldPlan again = make_fold_plan(n, 123);
        for (std::size_t f = 0; f < 4; ++f) CHECK(again.folds[f].test == plan.folds[f].test);
    }
    const FoldPlan a = make_fold_plan(24, 1), b = make_fold_plan(24, 2);
    bool differs = false;
    for (std::size_t f = 0; f < 4; ++f) differs = differs || a.folds[f].test != b.folds[f].test;
    CHECK(differs);
    // The four folds are separate shuffles, not a partition.
    CHECK(a.folds[0].test != a.folds[1].test);
}

TEST_CASE("fold plan rejects small subjects") {
    try {
        make_fold_plan(7, 1);
        FAIL("expected TooFewTrials");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TooFewTrials);
    }
}

TEST_CASE("a single tree without bootstrap fits its training set exactly") {
    const Blobs b = blobs(60, 5, 0.5, 3);
    std::vector<int> all(b.X.rows());
    std::iota(all.begin(), all.end(), 0);
    const DecisionTree tree = train_tree(b.X, b.y, all, 2, 17);
    Labels pred;
    for (Eigen::Index i = 0; i < b.X.rows(); ++i) pred.push_back(tree.predict(b.X.row(i).transpose()));
    CHECK(pred == b.y);
}

TEST_CASE("a tree splits the obvious feature") {
    MatrixXd X(6, 2);
    X << 0, 5, 1, 3, 2, 9, 10, 4, 11, 8, 12, 1;
    const Labels y{0, 0, 0, 1, 1, 1};
    const DecisionTree tree = train_tree(X, y, {0, 1, 2, 3, 4, 5}, 2, 1);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == doctest::Approx(6.0));
}

TEST_CASE("random forest learns separable blobs and is seed deterministic") {
    const Blobs train_set = blobs(80, 8, 2.0, 1);
    const Blobs test_set = blobs(80, 8, 2.0, 2);
    ClassifierSpec spec;
    spec.rf_trees = 30;
    spec.seed = 5;
    const Model m = train(spec, train_set.X, train_set.y);
    CHECK(accuracy(m.predict(test_set.X), test_set.y) > 0.9);
    const Model again = train(spec, train_set.X, train_set.y);
    CHECK(again.predict(test_set.X) == m.predict(test_set.X));
    CHECK(std::get<RandomForestModel>(m.impl()).trees.size() == 30);
}

TEST_CASE("kNN votes over the k nearest, ties go to 0") {
    MatrixXd X(4, 1);
    X << 0, 1, 10, 11;
    const Labels y{0, 0, 1, 1};
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Knn;
    spec.knn_k = 1;
    MatrixXd q(3, 1);
    q << 0.2, 10.4, 5.6;
    CHECK(train(spec, X, y).predict(q) == Labels{0, 1, 1});

    spec.knn_k = 2;
    MatrixXd mid(1, 1);
    mid << 5.5;
    MatrixXd X2(2, 1);
    X2 << 5, 6;
    CHECK(train(spec, X2, Labels{1, 0}).predict(mid) == Labels{0});
}

TEST_CASE("kNN result does not depend on training row order") {
    const Blobs b = blobs(40, 3, 0.7, 9);
    const Blobs q = blobs(30, 3, 0.7, 10);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Knn;
    spec.knn_k = 15;
    const Labels ref = train(spec, b.X, b.y).predict(q.X);
    std::vector<int> perm(b.X.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(4);
    std::shuffle(perm.begin(), perm.end(), rng);
    MatrixXd Xp(b.X.rows(), b.X.cols());
    Labels yp;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        Xp.row(static_cast<Eigen::Index>(i)) = b.X.row(perm[i]);
        yp.push_back(b.y[static_cast<std::size_t>(perm[i])]);
    }
    CHECK(train(spec, Xp, yp).predict(q.X) == ref);
}

TEST_CASE("kNN with fewer samples than k uses all of them") {
    const Blobs b = blobs(5, 2, 5.0, 1);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::Knn;
    const Model m = train(spec, b.X, b.y);
    CHECK(std::get<KnnModel>(m.impl()).k == 10);
}

TEST_CASE("logistic regression converges to the Newton solution") {
    const Blobs b = blobs(50, 3, 1.0, 12);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::LogReg;
    spec.logreg_c = 0.5;
    const Model m = train(spec, b.X, b.y);
    const auto& lr = std::get<LogRegModel>(m.impl());
    const VectorXd theta = newton_logreg(b.X, b.y, 0.5);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(lr.weights(j) - theta(j)) < 1e-4);
    CHECK(std::abs(lr.intercept - theta(3)) < 1e-4);
    for (std::size_t i = 1; i < lr.loss_history.size(); ++i) CHECK(lr.loss_history[i] <= lr.loss_history[i - 1]);
    CHECK(lr.iterations < spec.logreg_max_iterations);
}

TEST_CASE("training errors") {
    const Blobs b = blobs(10, 2, 1.0, 1);
    const Labels ones(b.y.size(), 1);
    for (auto kind : {ClassifierKind::RandomForest, ClassifierKind::LogReg}) {
        ClassifierSpec spec;
        spec.kind = kind;
        try {
            train(spec, b.X, ones);
            FAIL("expected SingleClassTraining");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SingleClassTraining);
        }
    }
    ClassifierSpec spec;
    spec.rf_trees = 3;
    const Model m = train(spec, b.X, b.y);
    try {
        m.predict(MatrixXd::Zero(2, 3));
        FAIL("expected WidthMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WidthMismatch);
    }
    CHECK(m.predict(MatrixXd(0, 2)).empty());
    CHECK_THROWS_AS(train(spec, b.X, Labels{0, 1}), Error);
}

TEST_CASE("model JSON round trip predicts identically") {
    const Blobs b = blobs(30, 4, 1.0, 2);
    const Blobs q = blobs(20, 4, 1.0, 3);
    for (auto kind : {ClassifierKind::RandomForest, ClassifierKind::Knn, ClassifierKind::LogReg}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.rf_trees = 10;
        spec.knn_k = 7;
        const Model m = train(spec, b.X, b.y);
        const Model back = Model::from_json(nlohmann::json::parse(m.to_json().dump()));
        CHECK(back.spec().kind == kind);
        CHECK(back.width() == 4);
        CHECK(back.predict(q.X) == m.predict(q.X));
    }
}

TEST_CASE("classifier names") {
    CHECK(classifier_kind_from_string("rf") == ClassifierKind::RandomForest);
    CHECK(classifier_kind_from_string("knn") == ClassifierKind::Knn);
    CHECK(classifier_kind_from_string("lr") == ClassifierKind::LogReg);
    CHECK(to_string(ClassifierKind::LogReg) == "logreg");
    CHECK_THROWS_AS(classifier_kind_from_string("svm"), Error);
}

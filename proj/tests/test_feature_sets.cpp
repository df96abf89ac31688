#include "support.hpp"

#include "iws/feature_sets.hpp"
#include "iws/wavelet.hpp"

#include <doctest.h>

#include <fstream>
#include <set>

using namespace iws;

namespace {

SignalInstance window(std::uint64_t seed, std::optional<Label> label = Label::Iws) {
    const Trial t = testing::noise_trial(kWindowSamples, 1, 2, seed);
    return {car_filter(t.samples), label, 0};
}

}  // namespace

TEST_CASE("feature set widths and layouts") {
    CHECK(kFs1Width == 70);
    CHECK(kFs2Width == 168);
    CHECK(kFs3Width == 28);
    CHECK(kFs4Width == 266);
    for (int id = 1; id <= 4; ++id) {
        const auto layout = feature_layout(id);
        std::set<std::string> names;
        for (const auto& d : *layout) names.insert(d.name());
        CHECK(names.size() == layout->size());
    }
    CHECK(feature_layout(1)->size() == 70);
    CHECK(feature_layout(4)->size() == 266);
    CHECK((*feature_layout(1))[6].name() == "ch1:w2:IE");
    CHECK((*feature_layout(2))[13].name() == "ch1:h1:IE");
    CHECK((*feature_layout(3))[1].name() == "ch0:raw:GHE2");
    CHECK_THROWS_AS(feature_layout(5), Error);
}

TEST_CASE("extract_features widths, labels and provenance") {
    const SignalInstance w = window(3);
    const int widths[3] = {70, 168, 28};
    for (int id = 1; id <= 3; ++id) {
        const FeatureVector v = extract_features(w, id, {}, 42);
        CHECK(v.values.size() == widths[id - 1]);
        CHECK(v.values.allFinite());
        CHECK(v.feature_set_id == id);
        CHECK(v.label == Label::Iws);
        CHECK(v.instance_id == 42);
        CHECK(v.layout == feature_layout(id));
    }
    CHECK_THROWS_AS(extract_features(w, 4), Error);
}

TEST_CASE("FS1 is the IE of each DWT band, channel-major") {
    const SignalInstance w = window(4);
    const FeatureVector v = extract_features(w, 1);
    for (int ch : {0, 7, 13}) {
        const auto bands = dwt_bior22(w.samples.col(ch));
        for (int b = 0; b < 5; ++b) CHECK(v.values(ch * 5 + b) == doctest::Approx(instantaneous_energy(bands[b].values)));
    }
}

TEST_CASE("FS3 is GHE(1), GHE(2) of each channel") {
    const SignalInstance w = window(5);
    const FeatureVector v = extract_features(w, 3);
    for (int ch = 0; ch < kChannelCount; ++ch) {
        CHECK(v.values(2 * ch) == doctest::Approx(ghe(w.samples.col(ch), 1)));
        CHECK(v.values(2 * ch + 1) == doctest::Approx(ghe(w.samples.col(ch), 2)));
    }
}

TEST_CASE("FS2 uses the Minkowski-selected IMFs") {
    const SignalInstance w = window(6);
    const FeatureVector v = extract_features(w, 2);
    const int ch = 2;
    const VectorXd x = w.samples.col(ch);
    const auto picked = select_imfs_minkowski(x, emd(x).imfs);
    for (int slot = 0; slot < 2; ++slot) {
        const VectorXd& h = picked[slot].values;
        const int base = ch * 12 + slot * 6;
        CHECK(v.values(base + 0) == doctest::Approx(teager_energy(h)));
        CHECK(v.values(base + 1) == doctest::Approx(instantaneous_energy(h)));
        CHECK(v.values(base + 2) == doctest::Approx(higuchi_fd(h)));
        CHECK(v.values(base + 3) == doctest::Approx(katz_fd(h)));
        CHECK(v.values(base + 4) == doctest::Approx(ghe(h, 1)));
        CHECK(v.values(base + 5) == doctest::Approx(ghe(h, 2)));
    }
}

TEST_CASE("FS2 survives a channel without IMFs") {
    SignalInstance w = window(7);
    w.samples.col(0) = testing::ramp(kWindowSamples, 0.5);
    const FeatureVector v = extract_features(w, 2);
    CHECK(v.values.allFinite());
    CHECK(v.values.segment(0, 6) == v.values.segment(6, 6));
}

TEST_CASE("FS4 concatenates FS1, FS2, FS3 of one instance") {
    const SignalInstance w = window(8);
    const auto v1 = extract_features(w, 1, {}, 9);
    const auto v2 = extract_features(w, 2, {}, 9);
    const auto v3 = extract_features(w, 3, {}, 9);
    const FeatureVector v4 = assemble_fs4(v1, v2, v3);
    CHECK(v4.values.size() == 266);
    CHECK(v4.values.head(70) == v1.values);
    CHECK(v4.values.segment(70, 168) == v2.values);
    CHECK(v4.values.tail(28) == v3.values);
    CHECK(v4.feature_set_id == 4);

    const MatrixXd rows = extract_feature_matrix({w}, 4);
    CHECK(rows.row(0).transpose() == v4.values);

    const auto other = extract_features(w, 2, {}, 10);
    try {
        assemble_fs4(v1, other, v3);
        FAIL("expected LayoutMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LayoutMismatch);
    }
    CHECK_THROWS_AS(assemble_fs4(v2, v1, v3), Error);
}

TEST_CASE("scaler: population std and zero-variance guard") {
    MatrixXd x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    const ScalerModel m = scaler_fit(x);
    CHECK(m.mean(0) == doctest::Approx(2.0));
    CHECK(m.std(0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(m.std(1) == 1.0);
    const MatrixXd z = scaler_apply(m, x);
    CHECK(z(2, 0) == doctest::Approx(1.224744871391589));
    CHECK(z.col(1).isZero());
    CHECK(z.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(scaler_apply(m, MatrixXd::Zero(1, 3)), Error);
}

TEST_CASE("PCA keeps the fewest components reaching the target") {
    // Variance concentrated along three known axes.
    MatrixXd x(400, 6);
    const VectorXd a = testing::gaussian(400, 1, 12.0), b = testing::gaussian(400, 2, 3.0),
                   c = testing::gaussian(400, 3, 1.0);
    for (int i = 0; i < 400; ++i) x.row(i) << a(i), b(i), c(i), 0.01 * a(i), 0.0, 0.0;
    const PcaModel m = pca_fit(x, 0.90);
    CHECK(m.component_count() == 1);
    CHECK(m.retained_variance_ratio >= 0.90);
    const PcaModel all = pca_fit(x, 1.0);
    CHECK(all.retained_variance_ratio == doctest::Approx(1.0));

    const MatrixXd p = pca_apply(m, x);
    CHECK(p.cols() == 1);
    const MatrixXd centered = x.rowwise() - x.colwise().mean();
    const double total = centered.squaredNorm();
    const MatrixXd pc = p.rowwise() - p.colwise().mean();
    CHECK(pc.squaredNorm() / total >= 0.90);

    const MatrixXd gram = m.components * m.components.transpose();
    CHECK((gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("PCA on FS4 rows of real windows") {
    std::vector<SignalInstance> instances;
    for (std::uint64_t s = 0; s < 40; ++s) instances.push_back(window(100 + s));
    const MatrixXd rows = extract_feature_matrix(instances, 4);
    const MatrixXd z = scaler_apply(scaler_fit(rows), rows);
    const PcaModel m = pca_fit(z, 0.90);
    CHECK(m.component_count() <= 266);
    const MatrixXd p = pca_apply(m, z);
    const MatrixXd pc = p.rowwise() - p.colwise().mean();
    const MatrixXd zc = z.rowwise() - z.colwise().mean();
    CHECK(pc.squaredNorm() / zc.squaredNorm() >= 0.90);

    const FeatureVector one = pca_apply(m, FeatureVector{z.row(0).transpose(), 4, Label::Iss, feature_layout(4), 0});
    CHECK(one.feature_set_id == 5);
    CHECK(one.values.size() == m.component_count());
    CHECK(one.layout->size() == static_cast<std::size_t>(m.component_count()));
}

TEST_CASE("feature CSV export") {
    testing::TempDir dir("csv");
    const auto v = extract_features(window(1), 3, {}, 0);
    write_feature_csv(dir.path() / "f.csv", {v, v});
    std::ifstream in(dir.path() / "f.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("ch0:raw:GHE1,", 0) == 0);
    CHECK(header.substr(header.size() - 5) == "label");
    CHECK(row.back() == '1');
}

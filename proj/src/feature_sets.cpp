#include "iws/feature_sets.hpp"

#include "iws/wavelet.hpp"

#include <spdlog/spdlog.h>

#include <array>
#include <fstream>

namespace iws {

std::string FeatureDescriptor::name() const {
    return "ch" + std::to_string(channel) + ":" + band + ":" + feature;
}

namespace {

constexpr std::array<const char*, 5> kDwtBands = {"w1", "w2", "w3", "w4", "a5"};
constexpr std::array<const char*, 2> kImfSlots = {"h1", "h2"};
constexpr std::array<const char*, 6> kImfFeatures = {"TE", "IE", "HFD", "KFD", "GHE1", "GHE2"};

FeatureLayout build_layout(int id) {
    FeatureLayout layout;
    for (int ch = 0; ch < kChannelCount; ++ch) {
        switch (id) {
            case 1:
                for (const char* band : kDwtBands) layout.push_back({ch, band, "IE"});
                break;
            case 2:
                for (const char* slot : kImfSlots)
                    for (const char* f : kImfFeatures) layout.push_back({ch, slot, f});
                break;
            case 3:
                layout.push_back({ch, "raw", "GHE1"});
                layout.push_back({ch, "raw", "GHE2"});
                break;
            default: break;
        }
    }
    return layout;
}

void check_window(const MatrixXd& window) {
    require(window.rows() == kWindowSamples && window.cols() == kChannelCount, ErrorKind::InvariantViolation,
            "feature extraction expects a " + std::to_string(kWindowSamples) + "x" +
                std::to_string(kChannelCount) + " window");
}

}  // namespace

std::shared_ptr<const FeatureLayout> feature_layout(int feature_set_id) {
    static const std::array<std::shared_ptr<const FeatureLayout>, 4> layouts = [] {
        std::array<std::shared_ptr<const FeatureLayout>, 4> out;
        for (int id = 1; id <= 3; ++id) out[id - 1] = std::make_shared<const FeatureLayout>(build_layout(id));
        FeatureLayout all;
        for (int id = 1; id <= 3; ++id) all.insert(all.end(), out[id - 1]->begin(), out[id - 1]->end());
        out[3] = std::make_shared<const FeatureLayout>(std::move(all));
        return out;
    }();
    require(feature_set_id >= 1 && feature_set_id <= 4, ErrorKind::InvariantViolation,
            "feature_layout: feature set must be 1..4");
    return layouts[feature_set_id - 1];
}

void extract_fs1(const MatrixXd& window, Eigen::Ref<VectorXd> out) {
    check_window(window);
    for (int ch = 0; ch < kChannelCount; ++ch) {
        const auto bands = dwt_bior22(window.col(ch), ch);
        for (std::size_t b = 0; b < bands.size(); ++b)
            out(ch * 5 + static_cast<Eigen::Index>(b)) = instantaneous_energy(bands[b].values);
    }
}

void extract_fs2(const MatrixXd& window, Eigen::Ref<VectorXd> out, const FeatureParams& params) {
    check_window(window);
    for (int ch = 0; ch < kChannelCount; ++ch) {
        const VectorXd signal = window.col(ch);
        std::vector<CoefficientSet<double>> selected;
        try {
            const auto decomposition = emd(signal, params.emd, ch);
            selected = select_imfs_minkowski(signal, decomposition.imfs);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DecompositionFailure) throw;
            spdlog::debug("channel {}: no IMF extracted, using the residual as a pseudo-IMF", ch);
            CoefficientSet<double> pseudo{signal, BandKind::Imf, 1, ch};
            selected = {pseudo, pseudo};
        }
        for (int slot = 0; slot < 2; ++slot) {
            const VectorXd& h = selected[slot].values;
            const Eigen::Index base = ch * 12 + slot * 6;
            try {
                out(base + 0) = teager_energy(h);
                out(base + 1) = instantaneous_energy(h);
                out(base + 2) = higuchi_fd(h, params.higuchi_k_max);
                out(base + 3) = katz_fd(h);
                out(base + 4) = ghe(h, 1, params.ghe);
                out(base + 5) = ghe(h, 2, params.ghe);
            } catch (const Error& e) {
                fail(e.kind(), "channel " + std::to_string(ch) + ", IMF slot " + std::to_string(slot + 1) +
                                   ": " + e.what());
            }
        }
    }
}

void extract_fs3(const MatrixXd& window, Eigen::Ref<VectorXd> out, const FeatureParams& params) {
    check_window(window);
    for (int ch = 0; ch < kChannelCount; ++ch) {
        try {
            out(ch * 2 + 0) = ghe(window.col(ch), 1, params.ghe);
            out(ch * 2 + 1) = ghe(window.col(ch), 2, params.ghe);
        } catch (const Error& e) {
            fail(e.kind(), "channel " + std::to_string(ch) + ": " + e.what());
        }
    }
}

namespace {

VectorXd extract_values(const MatrixXd& window, int id, const FeatureParams& params) {
    VectorXd out;
    switch (id) {
        case 1:
            out.resize(kFs1Width);
            extract_fs1(window, out);
            break;
        case 2:
            out.resize(kFs2Width);
            extract_fs2(window, out, params);
            break;
        case 3:
            out.resize(kFs3Width);
            extract_fs3(window, out, params);
            break;
        case 4:
            out.resize(kFs4Width);
            extract_fs1(window, out.segment(0, kFs1Width));
            extract_fs2(window, out.segment(kFs1Width, kFs2Width), params);
            extract_fs3(window, out.segment(kFs1Width + kFs2Width, kFs3Width), params);
            break;
        default: fail(ErrorKind::InvariantViolation, "feature set must be 1..4, got " + std::to_string(id));
    }
    return out;
}

}  // namespace

FeatureVector extract_features(const SignalInstance& instance, int feature_set_id, const FeatureParams& params,
                               std::int64_t instance_id) {
    require(feature_set_id >= 1 && feature_set_id <= 3, ErrorKind::InvariantViolation,
            "extract_features: feature set must be 1..3 (4 via assemble_fs4, 5 via pca_apply)");
    FeatureVector v;
    try {
        v.values = extract_values(instance.samples, feature_set_id, params);
    } catch (const Error& e) {
        fail(e.kind(), "instance " + std::to_string(instance_id) + " (offset " +
                           std::to_string(instance.trial_offset) + "): " + e.what());
    }
    v.feature_set_id = feature_set_id;
    v.label = instance.label;
    v.layout = feature_layout(feature_set_id);
    v.instance_id = instance_id;
    return v;
}

FeatureVector assemble_fs4(const FeatureVector& v1, const FeatureVector& v2, const FeatureVector& v3) {
    require(v1.feature_set_id == 1 && v2.feature_set_id == 2 && v3.feature_set_id == 3, ErrorKind::LayoutMismatch,
            "assemble_fs4: expected feature sets 1, 2, 3 in order");
    require(v1.values.size() == kFs1Width && v2.values.size() == kFs2Width && v3.values.size() == kFs3Width,
            ErrorKind::LayoutMismatch, "assemble_fs4: unexpected widths");
    require(v1.instance_id == v2.instance_id && v2.instance_id == v3.instance_id, ErrorKind::LayoutMismatch,
            "assemble_fs4: vectors come from different instances");
    require(v1.label == v2.label && v2.label == v3.label, ErrorKind::LayoutMismatch,
            "assemble_fs4: vectors carry different labels");
    FeatureVector out;
    out.values.resize(kFs4Width);
    out.values << v1.values, v2.values, v3.values;
    out.feature_set_id = 4;
    out.label = v1.label;
    out.layout = feature_layout(4);
    out.instance_id = v1.instance_id;
    return out;
}

MatrixXd extract_feature_matrix(const std::vector<SignalInstance>& instances, int feature_set_id,
                                const FeatureParams& params) {
    const Eigen::Index width = static_cast<Eigen::Index>(feature_layout(feature_set_id)->size());
    MatrixXd rows(static_cast<Eigen::Index>(instances.size()), width);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        try {
            rows.row(static_cast<Eigen::Index>(i)) = extract_values(instances[i].samples, feature_set_id, params);
        } catch (const Error& e) {
            fail(e.kind(), "instance " + std::to_string(i) + " (offset " +
                               std::to_string(instances[i].trial_offset) + "): " + e.what());
        }
    }
    return rows;
}

namespace {

MatrixXd stack(const std::vector<FeatureVector>& vectors) {
    require(!vectors.empty(), ErrorKind::EmptyInput, "no feature vectors");
    const Eigen::Index width = vectors.front().values.size();
    MatrixXd rows(static_cast<Eigen::Index>(vectors.size()), width);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        require(vectors[i].values.size() == width, ErrorKind::WidthMismatch, "feature vectors differ in width");
        rows.row(static_cast<Eigen::Index>(i)) = vectors[i].values.transpose();
    }
    return rows;
}

}  // namespace

ScalerModel scaler_fit(const MatrixXd& train) {
    require(train.rows() > 0, ErrorKind::EmptyInput, "scaler_fit: empty training set");
    ScalerModel m;
    m.mean = train.colwise().mean().transpose();
    const MatrixXd centered = train.rowwise() - m.mean.transpose();
    m.std = (centered.colwise().squaredNorm() / static_cast<double>(train.rows())).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < m.std.size(); ++j)
        if (!(m.std(j) > 0.0)) m.std(j) = 1.0;
    return m;
}

ScalerModel scaler_fit(const std::vector<FeatureVector>& train) { return scaler_fit(stack(train)); }

MatrixXd scaler_apply(const ScalerModel& model, const MatrixXd& rows) {
    require(rows.cols() == model.mean.size(), ErrorKind::WidthMismatch, "scaler_apply: width mismatch");
    return (rows.rowwise() - model.mean.transpose()).array().rowwise() / model.std.transpose().array();
}

FeatureVector scaler_apply(const ScalerModel& model, const FeatureVector& v) {
    require(v.values.size() == model.mean.size(), ErrorKind::WidthMismatch, "scaler_apply: width mismatch");
    FeatureVector out = v;
    out.values = (v.values - model.mean).cwiseQuotient(model.std);
    return out;
}

PcaModel pca_fit(const MatrixXd& train, double target_ratio) {
    require(train.rows() >= 2, ErrorKind::EmptyInput, "pca_fit: need at least 2 training rows");
    require(target_ratio > 0.0 && target_ratio <= 1.0, ErrorKind::InvariantViolation,
            "pca_fit: target ratio must be in (0, 1]");
    PcaModel m;
    m.mean = train.colwise().mean().transpose();
    const MatrixXd centered = train.rowwise() - m.mean.transpose();
    const MatrixXd covariance = centered.transpose() * centered / static_cast<double>(train.rows());

    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(covariance);
    require(solver.info() == Eigen::Success, ErrorKind::NumericalFailure, "pca_fit: eigensolver did not converge");

    // Eigen returns ascending order.
    const Eigen::Index d = covariance.rows();
    m.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
    const double total = m.eigenvalues.sum();
    Eigen::Index keep = 1;
    double kept = m.eigenvalues(0);
    if (total > 0.0) {
        while (keep < d && kept < target_ratio * total) kept += m.eigenvalues(keep++);
        m.retained_variance_ratio = kept / total;
    } else {
        m.retained_variance_ratio = 1.0;
    }
    m.components = solver.eigenvectors().rowwise().reverse().leftCols(keep).transpose();
    return m;
}

MatrixXd pca_apply(const PcaModel& model, const MatrixXd& rows) {
    require(rows.cols() == model.mean.size(), ErrorKind::WidthMismatch, "pca_apply: width mismatch");
    return (rows.rowwise() - model.mean.transpose()) * model.components.transpose();
}

FeatureVector pca_apply(const PcaModel& model, const FeatureVector& v) {
    require(v.values.size() == model.mean.size(), ErrorKind::WidthMismatch, "pca_apply: width mismatch");
    FeatureVector out;
    out.values = model.components * (v.values - model.mean);
    out.feature_set_id = 5;
    out.label = v.label;
    out.instance_id = v.instance_id;
    auto layout = std::make_shared<FeatureLayout>();
    for (int k = 0; k < model.component_count(); ++k) layout->push_back({-1, "pc" + std::to_string(k + 1), "PC"});
    out.layout = std::move(layout);
    return out;
}

void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out.precision(17);
    if (!vectors.empty() && vectors.front().layout) {
        for (const auto& d : *vectors.front().layout) out << d.name() << ',';
    }
    out << "label\n";
    for (const auto& v : vectors) {
        for (Eigen::Index i = 0; i < v.values.size(); ++i) out << v.values(i) << ',';
        if (v.label) out << static_cast<int>(*v.label);
        out << '\n';
    }
    if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace iws

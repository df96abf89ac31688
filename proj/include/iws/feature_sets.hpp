#pragma once

#include "iws/common.hpp"
#include "iws/emd.hpp"
#include "iws/features.hpp"
#include "iws/preprocess.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iws {

struct FeatureDescriptor {
    int channel = 0;
    std::string band;     // "w1".."w4", "a5", "h1", "h2", "raw", or "pcN"
    std::string feature;  // "IE", "TE", "HFD", "KFD", "GHE1", "GHE2", "PC"

    std::string name() const;
    friend bool operator==(const FeatureDescriptor&, const FeatureDescriptor&) = default;
};

using FeatureLayout = std::vector<FeatureDescriptor>;

inline constexpr int kFs1Width = 5 * kChannelCount;
inline constexpr int kFs2Width = 6 * 2 * kChannelCount;
inline constexpr int kFs3Width = 2 * kChannelCount;
inline constexpr int kFs4Width = kFs1Width + kFs2Width + kFs3Width;

/// Shared, immutable layout for feature sets 1..4.
std::shared_ptr<const FeatureLayout> feature_layout(int feature_set_id);

struct FeatureVector {
    VectorXd values;
    int feature_set_id = 1;
    std::optional<Label> label;
    std::shared_ptr<const FeatureLayout> layout;
    // Identifies the source instance; -1 when unknown.
    std::int64_t instance_id = -1;
};

struct FeatureParams {
    EmdParams emd;
    GheParams ghe;
    int higuchi_k_max = 10;
};

/// Feature sets 1..3 for one instance, channel-major:
///   1: IE of the five bior2.2 bands,
///   2: TE, IE, HFD, KFD, GHE(1), GHE(2) of the two Minkowski-selected IMFs,
///   3: GHE(1), GHE(2) of the cleaned window.
FeatureVector extract_features(const SignalInstance& instance, int feature_set_id,
                               const FeatureParams& params = {}, std::int64_t instance_id = -1);

/// Concatenation FS1 || FS2 || FS3 of vectors computed from the same instance.
FeatureVector assemble_fs4(const FeatureVector& v1, const FeatureVector& v2, const FeatureVector& v3);

/// Per-channel feature blocks written into `out` (length = set width).
void extract_fs1(const MatrixXd& window, Eigen::Ref<VectorXd> out);
void extract_fs2(const MatrixXd& window, Eigen::Ref<VectorXd> out, const FeatureParams& params = {});
void extract_fs3(const MatrixXd& window, Eigen::Ref<VectorXd> out, const FeatureParams& params = {});

/// Rows of the returned matrix are feature vectors (1..4) for each instance.
MatrixXd extract_feature_matrix(const std::vector<SignalInstance>& instances, int feature_set_id,
                                const FeatureParams& params = {});

/// z-score model; population standard deviation, zero-variance dimensions keep std = 1.
struct ScalerModel {
    VectorXd mean;
    VectorXd std;
};

ScalerModel scaler_fit(const MatrixXd& train);
ScalerModel scaler_fit(const std::vector<FeatureVector>& train);
MatrixXd scaler_apply(const ScalerModel& model, const MatrixXd& rows);
FeatureVector scaler_apply(const ScalerModel& model, const FeatureVector& v);

struct PcaModel {
    VectorXd mean;
    MatrixXd components;  // k x input_dim, orthonormal rows in decreasing-eigenvalue order
    VectorXd eigenvalues; // full spectrum, decreasing
    double retained_variance_ratio = 0.0;

    int component_count() const { return static_cast<int>(components.rows()); }
};

/// Keeps the fewest leading components whose eigenvalue share reaches `target_ratio`.
PcaModel pca_fit(const MatrixXd& train, double target_ratio = 0.90);
MatrixXd pca_apply(const PcaModel& model, const MatrixXd& rows);
FeatureVector pca_apply(const PcaModel& model, const FeatureVector& v);

/// Header row of layout names (plus "label"), then one row per vector.
void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors);

}  // namespace iws

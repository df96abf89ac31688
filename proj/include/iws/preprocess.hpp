#pragma once

#include "iws/common.hpp"
#include "iws/data.hpp"

#include <optional>
#include <vector>

namespace iws {

enum class Label : int { Iss = 0, Iws = 1 };

struct WindowingParams {
    int window_samples = kWindowSamples;
    // 0.1 s at 128 Hz is 12.8 samples; rounded to the nearest integer.
    int step_samples = kStepSamples;
};

void validate(const WindowingParams& params);

/// One window cut from a trial. Only training segmentation attaches a label.
struct SignalInstance {
    MatrixXd samples;  // window_samples x channels
    std::optional<Label> label;
    int trial_offset = 0;
};

/// Common average reference: subtracts the across-channel mean from every time sample.
template <typename Derived>
Matrix<typename Derived::Scalar> car_filter(const Eigen::MatrixBase<Derived>& samples) {
    require(samples.allFinite(), ErrorKind::InvariantViolation, "car_filter: non-finite input");
    Matrix<typename Derived::Scalar> out = samples;
    out.colwise() -= samples.rowwise().mean();
    return out;
}

/// Returns a copy of `trial` whose samples are CAR-filtered.
Trial car_filter(const Trial& trial);

/// Labeled windows from the three class-pure segments (idle, imagined word, idle).
/// Throws SegmentTooShort if any segment cannot host one full window.
std::vector<SignalInstance> segment_training_trial(const Trial& trial,
                                                   const WindowingParams& params = {});

/// Continuous unlabeled windows over the whole trial; markers are never read.
std::vector<SignalInstance> segment_test_trial(const Trial& trial,
                                               const WindowingParams& params = {});

/// Window count produced by segment_test_trial for a trial of `n_samples`.
int test_window_count(int n_samples, const WindowingParams& params = {});

}  // namespace iws

#pragma once

#include "iws/data.hpp"
#include "iws/preprocess.hpp"

#include <vector>

namespace iws {

using BinaryVector = std::vector<int>;

/// Window labels before and after smoothing, plus ground truth, at bin resolution.
struct TrialPrediction {
    BinaryVector raw_window_labels;
    BinaryVector bin_labels;
    BinaryVector corrected_labels;
    BinaryVector truth_labels;
};

/// Number of step-sized bins in a trial: floor(n_samples / step). Every such bin is
/// overlapped by at least one test window.
int bin_count(int n_samples, const WindowingParams& params = {});

/// Bin b spans samples [b*step, (b+1)*step). It takes the majority label of the windows
/// overlapping it (up to ceil(window/step) of them); ties, including no window, give 0.
BinaryVector reduce_windows(const BinaryVector& raw, int n_bins, const WindowingParams& params = {});

/// One left-to-right pass of first-neighbour correction: an interior bin whose two
/// neighbours agree with each other and not with it is flipped, unless its left
/// neighbour was itself just flipped. End bins are never changed.
BinaryVector correct_errors(const BinaryVector& bins);

/// Bin b is 1 iff more than half of its samples lie in [onset, ending).
BinaryVector truth_bins(const Trial& trial, int n_bins, const WindowingParams& params = {});

/// reduce_windows + correct_errors + truth_bins for one test trial.
TrialPrediction smooth_trial_prediction(const Trial& trial, const BinaryVector& raw_window_labels,
                                        const WindowingParams& params = {});

}  // namespace iws

#include "iws/postprocess.hpp"

#include <algorithm>

namespace iws {

int bin_count(int n_samples, const WindowingParams& params) {
    validate(params);
    return n_samples / params.step_samples;
}

BinaryVector reduce_windows(const BinaryVector& raw, int n_bins, const WindowingParams& params) {
    validate(params);
    require(!raw.empty(), ErrorKind::EmptyInput, "reduce_windows: no window labels");
    require(n_bins >= 0, ErrorKind::InvariantViolation, "reduce_windows: negative bin count");
    const int step = params.step_samples;
    const int window = params.window_samples;
    const int n_windows = static_cast<int>(raw.size());

    BinaryVector bins(static_cast<std::size_t>(n_bins), 0);
    for (int b = 0; b < n_bins; ++b) {
        // Window w spans [w*step, w*step + window); it overlaps bin b iff
        // w*step < (b+1)*step and b*step < w*step + window.
        const int first = std::max(0, b - (window + step - 1) / step + 1);
        const int last = std::min(n_windows - 1, b);
        int votes = 0, voters = 0;
        for (int w = first; w <= last; ++w) {
            if (w * step + window <= b * step) continue;
            votes += raw[static_cast<std::size_t>(w)];
            ++voters;
        }
        bins[static_cast<std::size_t>(b)] = 2 * votes > voters ? 1 : 0;
    }
    return bins;
}

BinaryVector correct_errors(const BinaryVector& bins) {
    BinaryVector out = bins;
    bool previous_flipped = false;
    for (std::size_t i = 1; i + 1 < bins.size(); ++i) {
        const bool island = bins[i - 1] == bins[i + 1] && bins[i] != bins[i - 1];
        if (island && !previous_flipped) {
            out[i] = bins[i - 1];
            previous_flipped = true;
        } else {
            previous_flipped = false;
        }
    }
    return out;
}

BinaryVector truth_bins(const Trial& trial, int n_bins, const WindowingParams& params) {
    validate(params);
    const int step = params.step_samples;
    BinaryVector out(static_cast<std::size_t>(n_bins), 0);
    for (int b = 0; b < n_bins; ++b) {
        const int lo = std::max(b * step, trial.onset_sample);
        const int hi = std::min((b + 1) * step, trial.ending_sample);
        const int inside = std::max(0, hi - lo);
        out[static_cast<std::size_t>(b)] = 2 * inside > step ? 1 : 0;
    }
    return out;
}

TrialPrediction smooth_trial_prediction(const Trial& trial, const BinaryVector& raw_window_labels,
                                        const WindowingParams& params) {
    const int expected = test_window_count(trial.sample_count(), params);
    require(static_cast<int>(raw_window_labels.size()) == expected, ErrorKind::LengthMismatch,
            "expected " + std::to_string(expected) + " window labels, got " +
                std::to_string(raw_window_labels.size()));
    TrialPrediction p;
    const int n_bins = bin_count(trial.sample_count(), params);
    p.raw_window_labels = raw_window_labels;
    p.bin_labels = reduce_windows(raw_window_labels, n_bins, params);
    p.corrected_labels = correct_errors(p.bin_labels);
    p.truth_labels = truth_bins(trial, n_bins, params);
    return p;
}

}  // namespace iws

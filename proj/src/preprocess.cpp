#include "iws/preprocess.hpp"

namespace iws {

void validate(const WindowingParams& p) {
    require(p.window_samples > 0 && p.step_samples > 0 && p.step_samples <= p.window_samples,
            ErrorKind::InvariantViolation, "windowing: need 0 < step_samples <= window_samples");
}

Trial car_filter(const Trial& trial) {
    Trial out = trial;
    out.samples = car_filter(trial.samples);
    return out;
}

namespace {

void append_pass(const Trial& trial, const WindowingParams& p, int begin, int end,
                 std::optional<Label> label, std::vector<SignalInstance>& out, const char* segment) {
    if (begin + p.window_samples > end)
        fail(ErrorKind::SegmentTooShort,
             std::string(segment) + " segment [" + std::to_string(begin) + ", " + std::to_string(end) +
                 ") is shorter than one " + std::to_string(p.window_samples) + "-sample window");
    for (int start = begin; start + p.window_samples <= end; start += p.step_samples)
        out.push_back({trial.samples.middleRows(start, p.window_samples), label, start});
}

}  // namespace

std::vector<SignalInstance> segment_training_trial(const Trial& trial, const WindowingParams& params) {
    validate(params);
    validate(trial);
    std::vector<SignalInstance> out;
    append_pass(trial, params, 0, trial.onset_sample, Label::Iss, out, "leading idle");
    append_pass(trial, params, trial.onset_sample, trial.ending_sample, Label::Iws, out, "imagined-word");
    append_pass(trial, params, trial.ending_sample, trial.sample_count(), Label::Iss, out, "trailing idle");
    return out;
}

int test_window_count(int n_samples, const WindowingParams& params) {
    if (n_samples < params.window_samples) return 0;
    return (n_samples - params.window_samples) / params.step_samples + 1;
}

std::vector<SignalInstance> segment_test_trial(const Trial& trial, const WindowingParams& params) {
    validate(params);
    std::vector<SignalInstance> out;
    append_pass(trial, params, 0, trial.sample_count(), std::nullopt, out, "trial");
    return out;
}

}  // namespace iws

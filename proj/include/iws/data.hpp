#pragma once

#include "iws/common.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace iws {

/// Default 14-electrode montage used by the consumer headsets the data model targets.
inline const std::array<std::string, kChannelCount> kDefaultChannelNames = {
    "AF3", "F7", "F3", "FC5", "T7", "P7", "O1", "O2", "P8", "T8", "FC6", "F4", "F8", "AF4"};

/// One recording: idle segment, imagined-word segment [onset, ending), idle segment.
///
/// Markers are sample indices; `ending_sample` is exclusive.
struct Trial {
    std::string subject_id;
    int sampling_rate = kSamplingRate;
    std::vector<std::string> channel_names{kDefaultChannelNames.begin(), kDefaultChannelNames.end()};
    MatrixXd samples;  // n_samples x channels, microvolts
    int onset_sample = 0;
    int ending_sample = 0;

    int sample_count() const { return static_cast<int>(samples.rows()); }
    int channel_count() const { return static_cast<int>(samples.cols()); }
    int iws_length() const { return ending_sample - onset_sample; }

    friend bool operator==(const Trial& a, const Trial& b) {
        return a.subject_id == b.subject_id && a.sampling_rate == b.sampling_rate &&
               a.channel_names == b.channel_names && a.onset_sample == b.onset_sample &&
               a.ending_sample == b.ending_sample && a.samples.rows() == b.samples.rows() &&
               a.samples.cols() == b.samples.cols() && a.samples == b.samples;
    }
};

/// Throws InvariantViolation naming the first broken invariant.
void validate(const Trial& trial);

enum class ProtocolTag { Dataset1, Dataset2, Dataset3, Synthetic };

std::string to_string(ProtocolTag tag);
ProtocolTag protocol_tag_from_string(const std::string& s);

struct SubjectDataset {
    std::string subject_id;
    std::vector<Trial> trials;
    ProtocolTag protocol_tag = ProtocolTag::Synthetic;
};

inline constexpr int kMinTrialsPerSubject = 8;

void validate(const SubjectDataset& dataset);

struct SynthConfig {
    int n_subjects = 5;
    int trials_per_subject = 24;
    int trial_length_samples = 512;
    std::array<int, 2> iws_length_range{160, 256};
    std::array<double, 2> carrier_band_hz{8.0, 12.0};
    double snr = 5.0;
    double background_std = 10.0;
    std::uint64_t seed = 7;
};

/// Throws ConfigError naming the offending field.
void validate(const SynthConfig& config);

std::vector<SubjectDataset> generate_synthetic_dataset(const SynthConfig& config);

Trial read_trial_file(const std::filesystem::path& path);
void write_trial_file(const Trial& trial, const std::filesystem::path& path);

/// Writes `<subject>_<index>.json` files plus manifest.json into `dir` (created if missing).
void write_dataset(const std::vector<SubjectDataset>& subjects, const std::filesystem::path& dir);
std::vector<SubjectDataset> read_dataset(const std::filesystem::path& dir);

std::string trial_file_name(const std::string& subject_id, int trial_index);

}  // namespace iws

#include "iws/data.hpp"
#include "iws/json_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace iws {

namespace fs = std::filesystem;
using nlohmann::json;

void validate(const Trial& trial) {
    const int n = trial.sample_count();
    require(trial.sampling_rate == kSamplingRate, ErrorKind::InvariantViolation,
            "sampling_rate must be " + std::to_string(kSamplingRate));
    require(trial.channel_count() == kChannelCount, ErrorKind::InvariantViolation,
            "channel count must be " + std::to_string(kChannelCount));
    require(static_cast<int>(trial.channel_names.size()) == kChannelCount,
            ErrorKind::InvariantViolation, "channel name count must match channel count");
    require(n >= 3 * kWindowSamples, ErrorKind::InvariantViolation,
            "trial needs at least " + std::to_string(3 * kWindowSamples) + " samples, has " +
                std::to_string(n));
    require(0 < trial.onset_sample && trial.onset_sample < trial.ending_sample &&
                trial.ending_sample < n,
            ErrorKind::InvariantViolation,
            "markers must satisfy 0 < onset < ending < n_samples (onset=" +
                std::to_string(trial.onset_sample) + ", ending=" +
                std::to_string(trial.ending_sample) + ", n=" + std::to_string(n) + ")");
    require(trial.samples.allFinite(), ErrorKind::InvariantViolation,
            "samples contain non-finite values");
}

std::string to_string(ProtocolTag tag) {
    switch (tag) {
        case ProtocolTag::Dataset1: return "dataset1";
        case ProtocolTag::Dataset2: return "dataset2";
        case ProtocolTag::Dataset3: return "dataset3";
        case ProtocolTag::Synthetic: return "synthetic";
    }
    return "synthetic";
}

ProtocolTag protocol_tag_from_string(const std::string& s) {
    if (s == "dataset1") return ProtocolTag::Dataset1;
    if (s == "dataset2") return ProtocolTag::Dataset2;
    if (s == "dataset3") return ProtocolTag::Dataset3;
    if (s == "synthetic") return ProtocolTag::Synthetic;
    fail(ErrorKind::MalformedFile, "protocol_tag: unknown value '" + s + "'");
}

void validate(const SubjectDataset& dataset) {
    require(static_cast<int>(dataset.trials.size()) >= kMinTrialsPerSubject,
            ErrorKind::TooFewTrials,
            "subject " + dataset.subject_id + " has " + std::to_string(dataset.trials.size()) +
                " trials, need at least " + std::to_string(kMinTrialsPerSubject));
    for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
        try {
            validate(dataset.trials[i]);
        } catch (const Error& e) {
            fail(e.kind(), trial_file_name(dataset.subject_id, static_cast<int>(i)) + ": " + e.what());
        }
    }
}

void validate(const SynthConfig& c) {
    auto check = [](bool ok, const std::string& field, const std::string& why) {
        require(ok, ErrorKind::ConfigError, field + ": " + why);
    };
    check(c.n_subjects >= 1, "n_subjects", "must be >= 1");
    check(c.trials_per_subject >= kMinTrialsPerSubject, "trials_per_subject",
          "must be >= " + std::to_string(kMinTrialsPerSubject));
    check(c.iws_length_range[0] >= kWindowSamples, "iws_length_range",
          "minimum must be >= " + std::to_string(kWindowSamples));
    check(c.iws_length_range[0] <= c.iws_length_range[1], "iws_length_range", "min must be <= max");
    check(c.trial_length_samples >= c.iws_length_range[1] + 2 * kWindowSamples,
          "trial_length_samples", "must leave >= 64 idle samples on each side of the longest IWS");
    check(c.carrier_band_hz[0] > 0.0 && c.carrier_band_hz[0] < c.carrier_band_hz[1] &&
              c.carrier_band_hz[1] < kSamplingRate / 2.0,
          "carrier_band_hz", "must satisfy 0 < low < high < Nyquist");
    check(std::isfinite(c.snr) && c.snr >= 0.0, "snr", "must be finite and >= 0");
    check(std::isfinite(c.background_std) && c.background_std > 0.0, "background_std",
          "must be > 0");
}

namespace {

Trial synth_trial(const SynthConfig& c, const std::string& subject_id, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n = c.trial_length_samples;
    const int len = std::uniform_int_distribution<int>(c.iws_length_range[0], c.iws_length_range[1])(rng);
    const int onset = std::uniform_int_distribution<int>(kWindowSamples, n - len - kWindowSamples)(rng);

    Trial t;
    t.subject_id = subject_id;
    t.samples.resize(n, kChannelCount);
    t.onset_sample = onset;
    t.ending_sample = onset + len;

    // White noise plus unit-variance first-order low-passed noise, equally weighted.
    constexpr double kPole = 0.95;
    const double innovation = std::sqrt(1.0 - kPole * kPole);
    for (int ch = 0; ch < kChannelCount; ++ch) {
        double lowpassed = gauss(rng);
        for (int i = 0; i < n; ++i) {
            lowpassed = kPole * lowpassed + innovation * gauss(rng);
            t.samples(i, ch) = c.background_std * (gauss(rng) + lowpassed) / std::numbers::sqrt2;
        }
    }

    // Per-channel random phases keep the oscillation from being a common-mode signal.
    constexpr int kTones = 3;
    const double amplitude = c.snr * c.background_std;
    for (int ch = 0; ch < kChannelCount; ++ch) {
        VectorXd burst = VectorXd::Zero(len);
        for (int k = 0; k < kTones; ++k) {
            const double f = c.carrier_band_hz[0] + unit(rng) * (c.carrier_band_hz[1] - c.carrier_band_hz[0]);
            const double phase = 2.0 * std::numbers::pi * unit(rng);
            for (int i = 0; i < len; ++i)
                burst(i) += std::sin(2.0 * std::numbers::pi * f * i / kSamplingRate + phase);
        }
        const double rms = std::sqrt(burst.squaredNorm() / len);
        if (rms > 0.0) t.samples.col(ch).segment(onset, len) += (amplitude / rms) * burst;
    }
    return t;
}

std::string subject_name(int index) {
    std::ostringstream os;
    os << 'S' << (index + 1 < 10 ? "0" : "") << index + 1;
    return os.str();
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::MalformedFile, path.string() + ": " + e.what());
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace

std::vector<SubjectDataset> generate_synthetic_dataset(const SynthConfig& config) {
    try {
        validate(config);
    } catch (const Error& e) {
        fail(ErrorKind::InvariantViolation, e.what());
    }
    std::vector<SubjectDataset> out;
    out.reserve(config.n_subjects);
    for (int s = 0; s < config.n_subjects; ++s) {
        SubjectDataset ds;
        ds.subject_id = subject_name(s);
        ds.protocol_tag = ProtocolTag::Synthetic;
        for (int k = 0; k < config.trials_per_subject; ++k)
            ds.trials.push_back(synth_trial(config, ds.subject_id, derive_seed(config.seed, s, k)));
        out.push_back(std::move(ds));
    }
    return out;
}

std::string trial_file_name(const std::string& subject_id, int trial_index) {
    std::ostringstream os;
    os << subject_id << '_';
    os.width(3);
    os.fill('0');
    os << trial_index << ".json";
    return os.str();
}

Trial trial_from_json(const json& j) {
    auto field = [&](const char* name) -> const json& {
        if (!j.is_object() || !j.contains(name))
            fail(ErrorKind::MalformedFile, std::string(name) + ": missing");
        return j.at(name);
    };
    auto as_int = [&](const char* name) {
        const json& v = field(name);
        if (!v.is_number_integer()) fail(ErrorKind::MalformedFile, std::string(name) + ": expected integer");
        return v.get<int>();
    };

    Trial t;
    const json& subject = field("subject_id");
    if (!subject.is_string()) fail(ErrorKind::MalformedFile, "subject_id: expected string");
    t.subject_id = subject.get<std::string>();
    t.sampling_rate = as_int("sampling_rate");
    if (t.sampling_rate != kSamplingRate)
        fail(ErrorKind::MalformedFile, "sampling_rate: expected " + std::to_string(kSamplingRate));

    const json& channels = field("channels");
    if (!channels.is_array() || channels.size() != kChannelCount)
        fail(ErrorKind::MalformedFile, "channels: expected array of " + std::to_string(kChannelCount) + " strings");
    t.channel_names.clear();
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (!channels[c].is_string())
            fail(ErrorKind::MalformedFile, "channels[" + std::to_string(c) + "]: expected string");
        t.channel_names.push_back(channels[c].get<std::string>());
    }
    t.onset_sample = as_int("onset_sample");
    t.ending_sample = as_int("ending_sample");

    const json& rows = field("samples");
    if (!rows.is_array()) fail(ErrorKind::MalformedFile, "samples: expected array");
    t.samples.resize(static_cast<Eigen::Index>(rows.size()), kChannelCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json& row = rows[i];
        const std::string where = "samples[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != kChannelCount)
            fail(ErrorKind::MalformedFile, where + ": expected " + std::to_string(kChannelCount) + " numbers");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c].is_number())
                fail(ErrorKind::MalformedFile, where + "[" + std::to_string(c) + "]: expected number");
            t.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
        }
    }
    validate(t);
    return t;
}

json to_json(const Trial& t) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < t.samples.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < t.samples.cols(); ++c) row.push_back(t.samples(i, c));
        rows.push_back(std::move(row));
    }
    return json{{"subject_id", t.subject_id},     {"sampling_rate", t.sampling_rate},
                {"channels", t.channel_names},    {"onset_sample", t.onset_sample},
                {"ending_sample", t.ending_sample}, {"samples", std::move(rows)}};
}

Trial read_trial_file(const fs::path& path) {
    const json j = read_json_file(path);
    try {
        return trial_from_json(j);
    } catch (const Error& e) {
        fail(e.kind(), path.filename().string() + ": " + e.what());
    }
}

void write_trial_file(const Trial& trial, const fs::path& path) {
    validate(trial);
    write_text_file(path, to_json(trial).dump());
}

void write_dataset(const std::vector<SubjectDataset>& subjects, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

    json manifest_subjects = json::array();
    std::string tag = subjects.empty() ? "synthetic" : to_string(subjects.front().protocol_tag);
    for (const auto& ds : subjects) {
        json files = json::array();
        for (std::size_t k = 0; k < ds.trials.size(); ++k) {
            const std::string name = trial_file_name(ds.subject_id, static_cast<int>(k));
            write_trial_file(ds.trials[k], dir / name);
            files.push_back(name);
        }
        manifest_subjects.push_back(json{{"subject_id", ds.subject_id}, {"trials", std::move(files)}});
    }
    const json manifest{{"format", "iws-dataset"},
                        {"schema_version", 1},
                        {"protocol_tag", tag},
                        {"subjects", std::move(manifest_subjects)}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<SubjectDataset> read_dataset(const fs::path& dir) {
    const json manifest = read_json_file(dir / "manifest.json");
    if (!manifest.is_object() || !manifest.contains("subjects") || !manifest["subjects"].is_array())
        fail(ErrorKind::MalformedFile, "manifest.json: subjects: expected array");
    ProtocolTag tag = ProtocolTag::Synthetic;
    if (manifest.contains("protocol_tag")) {
        if (!manifest["protocol_tag"].is_string())
            fail(ErrorKind::MalformedFile, "manifest.json: protocol_tag: expected string");
        tag = protocol_tag_from_string(manifest["protocol_tag"].get<std::string>());
    }

    std::vector<SubjectDataset> out;
    for (std::size_t s = 0; s < manifest["subjects"].size(); ++s) {
        const json& entry = manifest["subjects"][s];
        const std::string where = "manifest.json: subjects[" + std::to_string(s) + "]";
        if (!entry.is_object() || !entry.contains("subject_id") || !entry["subject_id"].is_string() ||
            !entry.contains("trials") || !entry["trials"].is_array())
            fail(ErrorKind::MalformedFile, where + ": expected {subject_id, trials}");
        SubjectDataset ds;
        ds.subject_id = entry["subject_id"].get<std::string>();
        ds.protocol_tag = tag;
        for (const json& name : entry["trials"]) {
            if (!name.is_string()) fail(ErrorKind::MalformedFile, where + ".trials: expected file names");
            ds.trials.push_back(read_trial_file(dir / name.get<std::string>()));
        }
        validate(ds);
        out.push_back(std::move(ds));
    }
    require(!out.empty(), ErrorKind::MalformedFile, "manifest.json: no subjects");
    return out;
}

}  // namespace iws

#pragma once

#include "iws/data.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace iws::testing {

inline VectorXd gaussian(int n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sd);
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

inline VectorXd random_walk(int n, std::uint64_t seed) {
    VectorXd steps = gaussian(n, seed);
    VectorXd v(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) v(i) = acc += steps(i);
    return v;
}

inline VectorXd ramp(int n, double slope, double offset = 0.0) {
    return VectorXd::LinSpaced(n, offset, offset + slope * (n - 1));
}

inline Trial noise_trial(int n, int onset, int ending, std::uint64_t seed, std::string subject = "S01") {
    Trial t;
    t.subject_id = std::move(subject);
    t.samples = MatrixXd(n, kChannelCount);
    for (int c = 0; c < kChannelCount; ++c) t.samples.col(c) = gaussian(n, seed * 31 + static_cast<std::uint64_t>(c));
    t.onset_sample = onset;
    t.ending_sample = ending;
    return t;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("iws-" + tag + "-" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace iws::testing

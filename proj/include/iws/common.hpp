#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iws {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

inline constexpr int kSamplingRate = 128;
inline constexpr int kChannelCount = 14;
inline constexpr int kWindowSamples = 64;
inline constexpr int kStepSamples = 13;

/// Failure categories surfaced by the library. The CLI maps them to exit codes.
enum class ErrorKind {
    MalformedFile,
    InvariantViolation,
    IoError,
    SegmentTooShort,
    DecompositionFailure,
    EmptyInput,
    InputTooShort,
    DegenerateScaling,
    LayoutMismatch,
    NumericalFailure,
    TooFewTrials,
    SingleClassTraining,
    WidthMismatch,
    LengthMismatch,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

/// Deterministic child seed from a root seed and up to two stream indices.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

}  // namespace iws

#include "iws/common.hpp"

#include <array>
#include <random>

namespace iws {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MalformedFile: return "MalformedFile";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::SegmentTooShort: return "SegmentTooShort";
        case ErrorKind::DecompositionFailure: return "DecompositionFailure";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::InputTooShort: return "InputTooShort";
        case ErrorKind::DegenerateScaling: return "DegenerateScaling";
        case ErrorKind::LayoutMismatch: return "LayoutMismatch";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::TooFewTrials: return "TooFewTrials";
        case ErrorKind::SingleClassTraining: return "SingleClassTraining";
        case ErrorKind::WidthMismatch: return "WidthMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
    // seed_seq::generate is fully specified by the standard, so derived seeds
    // are identical across library implementations.
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace iws

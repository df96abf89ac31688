#pragma once

#include "iws/common.hpp"

#include <numbers>
#include <vector>

namespace iws {

enum class BandKind { Detail, Approximation, Imf };

/// One decomposition band: a detail/approximation coefficient sequence or one IMF.
///
/// `index` is the decomposition level for wavelet bands (details 1..L,
/// approximation L+1) and the 1-based extraction order for IMFs.
template <typename Scalar>
struct CoefficientSet {
    Vector<Scalar> values;
    BandKind kind = BandKind::Detail;
    int index = 1;
    int source_channel = 0;
};

/// Biorthogonal 2.2 (CDF 5/3) analysis/synthesis in lifting form.
///
/// Interior coefficients equal the filter-bank outputs of the standard bior2.2
/// taps:
///   approximation a[n] = sqrt2 * (-1/8, 1/4, 3/4, 1/4, -1/8) . x[2n-2 .. 2n+2]
///   detail        w[n] = sqrt2 * ( 1/4, -1/2, 1/4)           . x[2n   .. 2n+2]
/// At the boundaries the missing even sample of the predict step is linearly
/// extrapolated from the two nearest even samples, so constants and ramps leave
/// every detail coefficient at zero, and the update step mirrors the nearest
/// detail. The transform is non-expansive: ceil(N/2) + floor(N/2) coefficients.
namespace bior22 {

template <typename Scalar>
struct Split {
    Vector<Scalar> approximation;
    Vector<Scalar> detail;
};

template <typename Scalar>
Split<Scalar> analyze(const Vector<Scalar>& x) {
    const Eigen::Index n = x.size();
    require(n >= 4, ErrorKind::InputTooShort, "bior2.2 level needs at least 4 samples");
    const Eigen::Index n_even = (n + 1) / 2;
    const Eigen::Index n_odd = n / 2;

    auto even = [&](Eigen::Index k) -> Scalar {
        if (k < n_even) return x(2 * k);
        // k == n_even: linear extrapolation from the last two even samples
        return Scalar(2) * x(2 * (n_even - 1)) - x(2 * (n_even - 2));
    };

    Vector<Scalar> d(n_odd);
    for (Eigen::Index k = 0; k < n_odd; ++k) d(k) = x(2 * k + 1) - (even(k) + even(k + 1)) / Scalar(2);

    auto detail = [&](Eigen::Index k) -> Scalar {
        if (k < 0) return d(0);
        if (k >= n_odd) return d(n_odd - 1);
        return d(k);
    };
    Vector<Scalar> s(n_even);
    for (Eigen::Index k = 0; k < n_even; ++k) s(k) = x(2 * k) + (detail(k - 1) + detail(k)) / Scalar(4);

    const Scalar root2 = Scalar(std::numbers::sqrt2);
    return {root2 * s, -d / root2};
}

template <typename Scalar>
Vector<Scalar> synthesize(const Vector<Scalar>& approximation, const Vector<Scalar>& detail) {
    const Eigen::Index n_even = approximation.size();
    const Eigen::Index n_odd = detail.size();
    require(n_even == n_odd || n_even == n_odd + 1, ErrorKind::LayoutMismatch,
            "bior2.2 synthesis: incompatible band lengths");
    require(n_even >= 2 && n_odd >= 1, ErrorKind::InputTooShort, "bior2.2 synthesis: bands too short");
    const Scalar root2 = Scalar(std::numbers::sqrt2);
    const Vector<Scalar> s = approximation / root2;
    const Vector<Scalar> d = -detail * root2;

    auto det = [&](Eigen::Index k) -> Scalar {
        if (k < 0) return d(0);
        if (k >= n_odd) return d(n_odd - 1);
        return d(k);
    };
    Vector<Scalar> x(n_even + n_odd);
    for (Eigen::Index k = 0; k < n_even; ++k) x(2 * k) = s(k) - (det(k - 1) + det(k)) / Scalar(4);
    auto even = [&](Eigen::Index k) -> Scalar {
        if (k < n_even) return x(2 * k);
        return Scalar(2) * x(2 * (n_even - 1)) - x(2 * (n_even - 2));
    };
    for (Eigen::Index k = 0; k < n_odd; ++k) x(2 * k + 1) = d(k) + (even(k) + even(k + 1)) / Scalar(2);
    return x;
}

}  // namespace bior22

/// Multi-level decomposition result: details[0] is level 1 (finest).
template <typename Scalar>
struct WaveletDecomposition {
    std::vector<Vector<Scalar>> details;
    Vector<Scalar> approximation;
};

template <typename Derived>
WaveletDecomposition<typename Derived::Scalar> wavelet_decompose(const Eigen::MatrixBase<Derived>& signal,
                                                                 int levels) {
    using Scalar = typename Derived::Scalar;
    require(levels >= 1, ErrorKind::InvariantViolation, "wavelet_decompose: levels must be >= 1");
    require(signal.allFinite(), ErrorKind::InvariantViolation, "wavelet_decompose: non-finite input");
    WaveletDecomposition<Scalar> out;
    Vector<Scalar> current = signal;
    for (int level = 0; level < levels; ++level) {
        auto split = bior22::analyze(current);
        out.details.push_back(std::move(split.detail));
        current = std::move(split.approximation);
    }
    out.approximation = std::move(current);
    return out;
}

template <typename Scalar>
Vector<Scalar> wavelet_reconstruct(const WaveletDecomposition<Scalar>& dec) {
    Vector<Scalar> current = dec.approximation;
    for (auto it = dec.details.rbegin(); it != dec.details.rend(); ++it)
        current = bior22::synthesize(current, *it);
    return current;
}

inline constexpr int kDwtLevels = 4;

/// Four-level bior2.2 DWT of one 64-sample channel window.
/// Returns {w1, w2, w3, w4, a5}; band lengths are (32, 16, 8, 4, 4).
template <typename Derived>
std::vector<CoefficientSet<typename Derived::Scalar>> dwt_bior22(const Eigen::MatrixBase<Derived>& signal,
                                                                 int source_channel = 0) {
    using Scalar = typename Derived::Scalar;
    require(signal.size() == kWindowSamples, ErrorKind::InvariantViolation,
            "dwt_bior22: expected " + std::to_string(kWindowSamples) + " samples, got " +
                std::to_string(signal.size()));
    auto dec = wavelet_decompose(signal, kDwtLevels);
    std::vector<CoefficientSet<Scalar>> bands;
    for (int j = 0; j < kDwtLevels; ++j)
        bands.push_back({std::move(dec.details[j]), BandKind::Detail, j + 1, source_channel});
    bands.push_back({std::move(dec.approximation), BandKind::Approximation, kDwtLevels + 1, source_channel});
    return bands;
}

}  // namespace iws

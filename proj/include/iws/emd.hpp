#pragma once

#include "iws/common.hpp"
#include "iws/spline.hpp"
#include "iws/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

namespace iws {

struct EmdParams {
    int max_imfs = 8;
    int max_sift_iterations = 50;
    // Normalized squared difference between consecutive sifts.
    double sift_tolerance = 0.05;
};

template <typename Scalar>
struct EmdResult {
    std::vector<CoefficientSet<Scalar>> imfs;
    Vector<Scalar> residual;
};

namespace emd_detail {

struct Extrema {
    std::vector<Eigen::Index> maxima;
    std::vector<Eigen::Index> minima;
    std::size_t count() const { return maxima.size() + minima.size(); }
};

/// Interior local extrema; a flat top counts once, at its first sample.
template <typename Scalar>
Extrema find_extrema(const Vector<Scalar>& h) {
    Extrema e;
    for (Eigen::Index i = 1; i + 1 < h.size(); ++i) {
        if (h(i) > h(i - 1) && h(i) >= h(i + 1)) e.maxima.push_back(i);
        else if (h(i) < h(i - 1) && h(i) <= h(i + 1)) e.minima.push_back(i);
    }
    return e;
}

template <typename Scalar>
std::size_t zero_crossings(const Vector<Scalar>& h) {
    std::size_t count = 0;
    int previous = 0;
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        const int sign = (h(i) > Scalar(0)) - (h(i) < Scalar(0));
        if (sign == 0) continue;
        if (previous != 0 && sign != previous) ++count;
        previous = sign;
    }
    return count;
}

template <typename Scalar>
bool satisfies_count_condition(const Vector<Scalar>& h) {
    const auto extrema = static_cast<long>(find_extrema(h).count());
    const auto crossings = static_cast<long>(zero_crossings(h));
    return std::labs(extrema - crossings) <= 1;
}

/// Envelope through the given extrema, with the first and last extremum
/// mirrored across the signal boundaries.
template <typename Scalar>
Vector<Scalar> envelope(const Vector<Scalar>& h, const std::vector<Eigen::Index>& points) {
    const Eigen::Index n = h.size();
    std::vector<Scalar> knots, values;
    knots.reserve(points.size() + 2);
    values.reserve(points.size() + 2);
    knots.push_back(-Scalar(points.front()));
    values.push_back(h(points.front()));
    for (Eigen::Index p : points) {
        knots.push_back(Scalar(p));
        values.push_back(h(p));
    }
    knots.push_back(Scalar(2 * (n - 1) - points.back()));
    values.push_back(h(points.back()));
    return natural_cubic_spline(knots, values, n);
}

/// Mean of the upper and lower envelopes, or empty if either envelope is undefined.
template <typename Scalar>
bool mean_envelope(const Vector<Scalar>& h, Vector<Scalar>& mean) {
    const Extrema e = find_extrema(h);
    if (e.maxima.empty() || e.minima.empty()) return false;
    mean = (envelope(h, e.maxima) + envelope(h, e.minima)) / Scalar(2);
    return true;
}

}  // namespace emd_detail

/// Empirical mode decomposition by cubic-spline sifting.
///
/// Each IMF is sifted until the extrema/zero-crossing counts differ by at most
/// one and the normalized squared difference between consecutive sifts falls
/// below `sift_tolerance` (or the iteration cap is hit with the count condition
/// met). A candidate that never meets the count condition is not emitted; it
/// stays in the residual. Decomposition stops when the residual has no maximum
/// or no minimum, or after `max_imfs`. IMFs plus residual reproduce the input.
///
/// Throws DecompositionFailure when no IMF can be extracted.
template <typename Derived>
EmdResult<typename Derived::Scalar> emd(const Eigen::MatrixBase<Derived>& signal, const EmdParams& params = {},
                                        int source_channel = 0) {
    using Scalar = typename Derived::Scalar;
    using namespace emd_detail;
    require(params.max_imfs > 0 && params.max_sift_iterations > 0 && params.sift_tolerance > 0,
            ErrorKind::InvariantViolation, "emd: parameters must be positive");
    require(signal.size() >= 4, ErrorKind::InputTooShort, "emd: need at least 4 samples");
    require(signal.allFinite(), ErrorKind::InvariantViolation, "emd: non-finite input");

    const Vector<Scalar> input = signal;
    EmdResult<Scalar> out;
    Vector<Scalar> residual = input;
    const Scalar floor = Scalar(1e-20) * std::max(input.squaredNorm(), Scalar(1e-300));

    while (static_cast<int>(out.imfs.size()) < params.max_imfs) {
        const Extrema e = find_extrema(residual);
        if (e.maxima.empty() || e.minima.empty()) break;
        if (residual.squaredNorm() <= floor) break;

        Vector<Scalar> h = residual;
        Vector<Scalar> mean;
        bool accepted = false;
        // Past the regular cap, keep sifting only until the count condition holds.
        const int hard_cap = 2 * params.max_sift_iterations;
        for (int it = 0; it < hard_cap; ++it) {
            if (!mean_envelope(h, mean)) break;
            const Scalar energy = h.squaredNorm();
            h -= mean;
            const Scalar sd = energy > Scalar(0) ? mean.squaredNorm() / energy : Scalar(0);
            const bool counts_ok = satisfies_count_condition(h);
            if (counts_ok && (sd < Scalar(params.sift_tolerance) || it + 1 >= params.max_sift_iterations)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            accepted = satisfies_count_condition(h) && !find_extrema(h).maxima.empty() &&
                       !find_extrema(h).minima.empty();
        }
        if (!accepted) break;

        const int index = static_cast<int>(out.imfs.size()) + 1;
        residual -= h;
        out.imfs.push_back({std::move(h), BandKind::Imf, index, source_channel});
    }
    if (out.imfs.empty())
        fail(ErrorKind::DecompositionFailure, "emd: no IMF could be extracted (channel " +
                                                  std::to_string(source_channel) + ")");
    // Recompute so the completeness identity is exact up to one subtraction chain.
    out.residual = input;
    for (const auto& imf : out.imfs) out.residual -= imf.values;
    return out;
}

/// Picks the two IMFs closest to `signal` in Euclidean (Minkowski p = 2) distance,
/// returned in extraction order. A single IMF is duplicated.
template <typename Derived>
std::vector<CoefficientSet<typename Derived::Scalar>> select_imfs_minkowski(
    const Eigen::MatrixBase<Derived>& signal, const std::vector<CoefficientSet<typename Derived::Scalar>>& imfs) {
    using Scalar = typename Derived::Scalar;
    require(!imfs.empty(), ErrorKind::EmptyInput, "select_imfs_minkowski: no IMFs");
    if (imfs.size() == 1) return {imfs.front(), imfs.front()};

    std::vector<std::pair<Scalar, std::size_t>> ranked;
    for (std::size_t i = 0; i < imfs.size(); ++i) {
        require(imfs[i].values.size() == signal.size(), ErrorKind::LengthMismatch,
                "select_imfs_minkowski: IMF length differs from signal");
        ranked.emplace_back((signal - imfs[i].values).norm(), i);
    }
    auto closer = [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return imfs[a.second].index < imfs[b.second].index;
    };
    std::partial_sort(ranked.begin(), ranked.begin() + 2, ranked.end(), closer);
    std::size_t first = ranked[0].second;
    std::size_t second = ranked[1].second;
    if (imfs[second].index < imfs[first].index) std::swap(first, second);
    return {imfs[first], imfs[second]};
}

}  // namespace iws

#pragma once

#include "iws/common.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace iws {

/// Lower bound applied to the arguments of log10/log in the energy and Katz features.
inline constexpr double kLogClamp = 1e-12;

namespace feature_detail {

/// Least-squares slope of y against x.
template <typename Scalar>
Scalar ls_slope(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
    const auto n = static_cast<Scalar>(x.size());
    Scalar mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    Scalar sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace feature_detail

/// IE = log10(mean of squared coefficients).
template <typename Derived>
typename Derived::Scalar instantaneous_energy(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    require(w.size() > 0, ErrorKind::EmptyInput, "instantaneous_energy: empty band");
    const Scalar mean_square = w.squaredNorm() / Scalar(w.size());
    return std::log10(std::max(mean_square, Scalar(kLogClamp)));
}

/// TE = log10((1/m) * sum over interior r of |w(r)^2 - w(r-1) w(r+1)|).
template <typename Derived>
typename Derived::Scalar teager_energy(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index m = w.size();
    require(m >= 3, ErrorKind::InputTooShort, "teager_energy: need at least 3 coefficients");
    Scalar sum = 0;
    for (Eigen::Index r = 1; r + 1 < m; ++r) sum += std::abs(w(r) * w(r) - w(r - 1) * w(r + 1));
    return std::log10(std::max(sum / Scalar(m), Scalar(kLogClamp)));
}

/// Higuchi fractal dimension with curve-length normalization (N-1)/(floor((N-m)/k) k).
/// Scales with zero curve length are skipped; a constant signal returns 0.
template <typename Derived>
typename Derived::Scalar higuchi_fd(const Eigen::MatrixBase<Derived>& x, int k_max = 10) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.size();
    require(k_max >= 2, ErrorKind::InvariantViolation, "higuchi_fd: k_max must be >= 2");
    require(n >= k_max + 1, ErrorKind::InputTooShort,
            "higuchi_fd: need at least k_max + 1 samples");

    std::vector<Scalar> log_inv_k, log_length;
    for (int k = 1; k <= k_max; ++k) {
        Scalar total = 0;
        for (int m = 0; m < k; ++m) {
            const Eigen::Index steps = (n - 1 - m) / k;
            if (steps < 1) continue;
            Scalar path = 0;
            for (Eigen::Index i = 1; i <= steps; ++i) path += std::abs(x(m + i * k) - x(m + (i - 1) * k));
            total += path * Scalar(n - 1) / (Scalar(steps) * Scalar(k)) / Scalar(k);
        }
        const Scalar mean_length = total / Scalar(k);
        if (!(mean_length > Scalar(0))) continue;
        log_inv_k.push_back(-std::log(Scalar(k)));
        log_length.push_back(std::log(mean_length));
    }
    if (log_inv_k.size() < 2) return Scalar(0);
    return feature_detail::ls_slope(log_inv_k, log_length);
}

/// Katz fractal dimension: log(m) / (log(m) + log(d/L)), natural logs.
/// L sums unit-step Euclidean segment lengths, d is the largest distance from the first point.
template <typename Derived>
typename Derived::Scalar katz_fd(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index m = x.size();
    require(m >= 2, ErrorKind::InputTooShort, "katz_fd: need at least 2 samples");
    require(x.allFinite(), ErrorKind::InvariantViolation, "katz_fd: non-finite input");
    Scalar length = 0, extent = 0;
    for (Eigen::Index t = 1; t < m; ++t) {
        const Scalar step = x(t) - x(t - 1);
        length += std::sqrt(Scalar(1) + step * step);
        const Scalar rise = x(t) - x(0);
        extent = std::max(extent, std::sqrt(Scalar(t) * Scalar(t) + rise * rise));
    }
    if (!(length > Scalar(0))) return Scalar(1);
    const Scalar log_m = std::log(Scalar(m));
    return log_m / (log_m + std::log(std::max(extent / length, Scalar(kLogClamp))));
}

struct GheParams {
    int tau_min = 1;
    int tau_max = 19;
};

/// Generalized Hurst exponent H(q): slope of ln K_q(tau) against ln tau, divided by q,
/// with K_q(tau) = <|X(t+tau) - X(t)|^q> / <|X(t)|^q> at unit time resolution.
/// Lags whose K_q is zero or non-finite are left out of the fit.
template <typename Derived>
typename Derived::Scalar ghe(const Eigen::MatrixBase<Derived>& x, int q, const GheParams& params = {}) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.size();
    require(q > 0, ErrorKind::InvariantViolation, "ghe: q must be positive");
    require(params.tau_min >= 1 && params.tau_min < params.tau_max, ErrorKind::InvariantViolation,
            "ghe: need 1 <= tau_min < tau_max");
    require(n >= 2 * params.tau_max, ErrorKind::InputTooShort,
            "ghe: need at least 2 * tau_max samples");

    const auto qth = [q](Scalar v) { return q == 1 ? std::abs(v) : std::pow(std::abs(v), Scalar(q)); };
    Scalar denom = 0;
    for (Eigen::Index t = 0; t < n; ++t) denom += qth(x(t));
    denom /= Scalar(n);

    std::vector<Scalar> log_tau, log_k;
    for (int tau = params.tau_min; tau <= params.tau_max; ++tau) {
        Scalar num = 0;
        for (Eigen::Index t = 0; t + tau < n; ++t) num += qth(x(t + tau) - x(t));
        num /= Scalar(n - tau);
        const Scalar k = num / denom;
        if (!(k > Scalar(0)) || !std::isfinite(k)) continue;
        log_tau.push_back(std::log(Scalar(tau)));
        log_k.push_back(std::log(k));
    }
    require(log_tau.size() >= 3, ErrorKind::DegenerateScaling,
            "ghe: fewer than 3 usable lags for q=" + std::to_string(q));
    return feature_detail::ls_slope(log_tau, log_k) / Scalar(q);
}

}  // namespace iws

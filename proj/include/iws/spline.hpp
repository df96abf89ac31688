#pragma once

#include "iws/common.hpp"

#include <vector>

namespace iws {

/// Natural cubic spline through (knots[i], values[i]), evaluated at 0, 1, ..., length-1.
/// Knots must be strictly increasing; two knots degrade to linear interpolation.
template <typename Scalar>
Vector<Scalar> natural_cubic_spline(const std::vector<Scalar>& knots, const std::vector<Scalar>& values,
                                    Eigen::Index length) {
    const std::size_t n = knots.size();
    require(n >= 2 && values.size() == n, ErrorKind::InputTooShort, "spline needs >= 2 knots");

    // Second derivatives via the tridiagonal system (Thomas algorithm), M_0 = M_{n-1} = 0.
    std::vector<Scalar> second(n, Scalar(0));
    if (n > 2) {
        std::vector<Scalar> diag(n - 2), upper(n - 2), rhs(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const Scalar h0 = knots[i] - knots[i - 1];
            const Scalar h1 = knots[i + 1] - knots[i];
            diag[i - 1] = (h0 + h1) / Scalar(3);
            upper[i - 1] = h1 / Scalar(6);
            rhs[i - 1] = (values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0;
        }
        for (std::size_t i = 1; i < n - 2; ++i) {
            const Scalar lower = (knots[i + 1] - knots[i]) / Scalar(6);
            const Scalar factor = lower / diag[i - 1];
            diag[i] -= factor * upper[i - 1];
            rhs[i] -= factor * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i-- > 0;) {
            Scalar v = rhs[i];
            if (i + 1 < n - 2) v -= upper[i] * second[i + 2];
            second[i + 1] = v / diag[i];
        }
    }

    Vector<Scalar> out(length);
    std::size_t seg = 0;
    for (Eigen::Index t = 0; t < length; ++t) {
        const Scalar x = Scalar(t);
        while (seg + 2 < n && x > knots[seg + 1]) ++seg;
        const Scalar h = knots[seg + 1] - knots[seg];
        const Scalar a = (knots[seg + 1] - x) / h;
        const Scalar b = (x - knots[seg]) / h;
        out(t) = a * values[seg] + b * values[seg + 1] +
                 ((a * a * a - a) * second[seg] + (b * b * b - b) * second[seg + 1]) * h * h / Scalar(6);
    }
    return out;
}

}  // namespace iws

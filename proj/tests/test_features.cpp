#include "support.hpp"

#include "iws/features.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace iws;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
    VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

// Reference Higuchi: builds each subsampled series X_k^m explicitly.
double higuchi_reference(const VectorXd& x, int k_max) {
    const int n = static_cast<int>(x.size());
    std::vector<double> lx, ly;
    for (int k = 1; k <= k_max; ++k) {
        double sum = 0.0;
        for (int m = 1; m <= k; ++m) {
            std::vector<double> series;
            for (int j = 0; m + j * k <= n; ++j) series.push_back(x(m - 1 + j * k));
            const int steps = static_cast<int>(series.size()) - 1;
            double curve = 0.0;
            for (int j = 1; j <= steps; ++j) curve += std::abs(series[j] - series[j - 1]);
            sum += curve * (n - 1) / (static_cast<double>(steps) * k) / k;
        }
        lx.push_back(std::log(1.0 / k));
        ly.push_back(std::log(sum / k));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

}  // namespace

TEST_CASE("instantaneous energy closed forms") {
    CHECK(instantaneous_energy(vec({1, 1, 1, 1})) == doctest::Approx(0.0));
    CHECK(instantaneous_energy(vec({2, 2})) == doctest::Approx(std::log10(4.0)).epsilon(1e-12));
    CHECK(std::abs(instantaneous_energy(vec({1, 2, 3, 4})) - 0.8750612633917001) < 1e-12);
    CHECK(instantaneous_energy(vec({0, 0, 0})) == -12.0);
    CHECK_THROWS_AS(instantaneous_energy(VectorXd()), Error);
}

TEST_CASE("teager energy closed forms") {
    CHECK(std::abs(teager_energy(vec({1, 2, 3, 4})) - (-0.3010299956639812)) < 1e-12);
    CHECK(teager_energy(vec({3, 3, 3, 3})) == -12.0);
    CHECK(teager_energy(vec({1, 2, 4, 8})) == -12.0);
    CHECK(teager_energy(vec({5, -10, 20, -40, 80})) == -12.0);
    CHECK_THROWS_AS(teager_energy(vec({1, 2})), Error);
}

TEST_CASE("Katz closed forms") {
    CHECK(katz_fd(testing::ramp(10, 2.0, -1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(katz_fd(testing::ramp(50, -0.3, 4.0)) == doctest::Approx(1.0).epsilon(1e-12));
    const double expected = std::log(5.0) / (std::log(5.0) - 0.5 * std::log(2.0));
    CHECK(std::abs(katz_fd(vec({0, 1, 0, 1, 0})) - expected) < 1e-12);
    CHECK(std::abs(expected - 1.2743) < 1e-3);
    CHECK(katz_fd(VectorXd::Constant(8, 2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(katz_fd(vec({1})), Error);
}

TEST_CASE("Higuchi matches the reference construction") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const VectorXd x = seed % 2 ? testing::gaussian(64, seed) : testing::random_walk(200, seed);
        CHECK(higuchi_fd(x) == doctest::Approx(higuchi_reference(x, 10)).epsilon(1e-12));
    }
    const VectorXd s = testing::gaussian(40, 3);
    CHECK(higuchi_fd(s, 6) == doctest::Approx(higuchi_reference(s, 6)).epsilon(1e-12));
}

TEST_CASE("Higuchi degenerate and line cases") {
    CHECK(higuchi_fd(VectorXd::Constant(64, 3.0)) == 0.0);
    CHECK(higuchi_fd(testing::ramp(64, 1.0)) == doctest::Approx(1.0).epsilon(0.05));
    CHECK_THROWS_AS(higuchi_fd(testing::gaussian(10, 1)), Error);
}

TEST_CASE("GHE: linear trend scales with exponent one") {
    const VectorXd x = testing::ramp(1024, 1.0, 1.0);
    CHECK(ghe(x, 1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(ghe(x, 2) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("GHE: constant signal has no usable lag") {
    try {
        ghe(VectorXd::Constant(64, 1.0), 1);
        FAIL("expected DegenerateScaling");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateScaling);
    }
    CHECK_THROWS_AS(ghe(testing::gaussian(37, 1), 1), Error);
}

TEST_CASE("GHE: brute force on a short window") {
    const VectorXd x = testing::gaussian(64, 9);
    const GheParams p{1, 19};
    for (int q : {1, 2}) {
        double denom = 0.0;
        for (int t = 0; t < 64; ++t) denom += std::pow(std::abs(x(t)), q);
        denom /= 64.0;
        std::vector<double> lx, ly;
        for (int tau = 1; tau <= 19; ++tau) {
            double num = 0.0;
            for (int t = 0; t + tau < 64; ++t) num += std::pow(std::abs(x(t + tau) - x(t)), q);
            lx.push_back(std::log(tau));
            ly.push_back(std::log(num / (64 - tau) / denom));
        }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / lx.size();
            my += ly[i] / ly.size();
        }
        double a = 0, b = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            a += (lx[i] - mx) * (ly[i] - my);
            b += (lx[i] - mx) * (lx[i] - mx);
        }
        CHECK(ghe(x, q, p) == doctest::Approx(a / b / q).epsilon(1e-10));
    }
}

TEST_CASE("features are finite on typical windows") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const VectorXd x = testing::gaussian(64, seed, 10.0);
        CHECK(std::isfinite(instantaneous_energy(x)));
        CHECK(std::isfinite(teager_energy(x)));
        CHECK(std::isfinite(higuchi_fd(x)));
        CHECK(std::isfinite(katz_fd(x)));
        CHECK(std::isfinite(ghe(x, 1)));
        CHECK(std::isfinite(ghe(x, 2)));
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "citekinetics/errors.hpp"
#include "citekinetics/numerics.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace citek;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("ln_gamma matches libm across the range") {
    // Mixed absolute/relative tolerance: at x = 1e6 the value itself is
    // ~1.28e7, so a pure absolute bound below machine precision of the
    // result would be unsatisfiable in doubles.
    const std::vector<double> xs = {1e-3, 0.1, 0.5, 1.0, 1.5,  2.0,  3.0, 7.5,
                                    13.0, 20,  50,  1e2, 1e3,  1e4,  1e6};
    for (double x : xs) {
        const long double ref = lgammal(static_cast<long double>(x));
        const double got = ln_gamma(x);
        const double tol = 1e-12 * std::max(1.0, std::abs(static_cast<double>(ref)));
        CHECK(std::abs(got - static_cast<double>(ref)) <= tol);
    }
}

TEST_CASE("ln_gamma exact points and recurrence") {
    CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ln_gamma(2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ln_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
    for (double x = 0.25; x < 40.0; x += 0.5) {
        CHECK(ln_gamma(x + 1.0) ==
              doctest::Approx(ln_gamma(x) + std::log(x)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(ln_gamma(0.0), DomainError);
    CHECK_THROWS_AS(ln_gamma(-1.5), DomainError);
}

TEST_CASE("regularized upper incomplete gamma") {
    CHECK(regularized_gamma_q(2.5, 0.0) == 1.0);
    CHECK(regularized_gamma_q(2.5, 2.5) ==
          doctest::Approx(0.41588018699550792).epsilon(1e-13));
    // Integer shape reduces to a Poisson tail sum.
    for (int n = 1; n <= 10; ++n) {
        const double x = 0.7 * n;
        double sum = 0.0;
        double term = std::exp(-x);
        for (int j = 0; j < n; ++j) {
            sum += term;
            term *= x / (j + 1);
        }
        CHECK(regularized_gamma_q(n, x) == doctest::Approx(sum).epsilon(1e-12));
    }
    // Half-integer shape reduces to the normal tail.
    for (double z = 0.5; z < 6.0; z += 0.7) {
        CHECK(regularized_gamma_q(0.5, 0.5 * z * z) ==
              doctest::Approx(std::erfc(z / std::sqrt(2.0))).epsilon(1e-12));
    }
    CHECK(regularized_gamma_q(3.0, 1e4) == doctest::Approx(0.0).epsilon(1e-300));
    CHECK_THROWS_AS(regularized_gamma_q(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(regularized_gamma_q(1.0, -1.0), DomainError);
}

TEST_CASE("modified Bessel I0") {
    CHECK(bessel_i0(0.0) == 1.0);
    CHECK(bessel_i0(2.0) == doctest::Approx(2.2795853023360673).epsilon(1e-14));
    CHECK(bessel_i0(10.0) == doctest::Approx(2815.7166284662545).epsilon(1e-14));
    // Both sides of the series/asymptotic switchover at x = 30 must match
    // high-precision references to full accuracy.
    CHECK(ln_bessel_i0(29.999999) == doctest::Approx(27.384700449982380767).epsilon(1e-14));
    CHECK(ln_bessel_i0(30.000001) == doctest::Approx(27.384702416361491498).epsilon(1e-14));
    for (double x : {0.5, 3.0, 8.0, 14.0, 25.0}) {
        CHECK(ln_bessel_i0(x) == doctest::Approx(std::log(bessel_i0(x))).epsilon(1e-13));
    }
    // Far beyond double overflow for exp(x) itself.
    const double x = 800.0;
    const double expect = x - 0.5 * std::log(2.0 * M_PI * x) +
                          std::log1p(1.0 / (8.0 * x) + 9.0 / (128.0 * x * x));
    CHECK(ln_bessel_i0(x) == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(bessel_i0(-1.0), DomainError);
}

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.96) == doctest::Approx(0.9750021048517796).epsilon(1e-14));
    for (double z = -5.0; z <= 5.0; z += 0.25) {
        CHECK(std_normal_cdf(z) + std_normal_cdf(-z) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std_normal_cdf(z) ==
              doctest::Approx(0.5 * std::erfc(-z / std::sqrt(2.0))).epsilon(1e-13));
    }
    const double deep = std_normal_cdf(-40.0);
    CHECK(deep >= 0.0);
    CHECK(deep < 1e-300);
}

TEST_CASE("log of the standard normal cdf stays finite far into the tail") {
    CHECK(log_std_normal_cdf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    CHECK(log_std_normal_cdf(-10.0) == doctest::Approx(-53.231285150512471).epsilon(1e-13));
    CHECK(log_std_normal_cdf(-30.0) == doctest::Approx(-454.32124395634320).epsilon(1e-13));
    for (double z = -36.0; z <= 3.0; z += 0.5) {
        CHECK(log_std_normal_cdf(z) ==
              doctest::Approx(std::log(std_normal_cdf(z))).epsilon(1e-12));
    }
    // Asymptotic reference ln Phi(-z) ~ -z^2/2 - ln(z sqrt(2 pi)) - 1/z^2 ...
    for (double z : {50.0, 100.0, 500.0}) {
        const double lead = -0.5 * z * z - std::log(z * std::sqrt(2.0 * M_PI));
        const double got = log_std_normal_cdf(-z);
        CHECK(std::abs(got - lead) < 2.0 / (z * z) + 1e-10 * std::abs(lead));
    }
}

TEST_CASE("log-sum-exp and log-diff-exp") {
    CHECK(log_sum_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(log_sum_exp(-kInf, 3.5) == 3.5);
    CHECK(log_sum_exp(3.5, -kInf) == 3.5);
    CHECK(log_sum_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_diff_exp(1000.0, 999.0) == doctest::Approx(999.54132485461292).epsilon(1e-15));
    CHECK(log_diff_exp(0.0, -kInf) == 0.0);
    CHECK(log_diff_exp(5.0, 5.0) == -kInf);
    CHECK_THROWS_AS(log_diff_exp(1.0, 2.0), DomainError);
}

TEST_CASE("quadrature on finite and half-infinite intervals") {
    const double third = integrate([](double x) { return x * x; }, Interval{0.0, 1.0}, 1e-12);
    CHECK(third == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    const double one = integrate([](double x) { return std::exp(-x); }, Interval{0.0, kInf}, 1e-11);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-10));

    const double half = integrate([](double x) { return x * std::exp(-x * x); },
                                  Interval{0.0, kInf}, 1e-11);
    CHECK(half == doctest::Approx(0.5).epsilon(1e-10));

    const double gauss = integrate([](double x) { return std::exp(-0.5 * x * x); },
                                   Interval{0.0, kInf}, 1e-11);
    CHECK(gauss == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-10));

    const double shifted = integrate([](double x) { return 1.0 / (x * x); },
                                     Interval{1.0, kInf}, 1e-11);
    CHECK(shifted == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("breakpoints let the quadrature resolve a narrow spike") {
    const double sigma = 1e-3;
    const auto spike = [&](double x) {
        const double z = (x - 5.0) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
    };
    const std::vector<double> cuts = {4.99, 5.0, 5.01};
    const double mass = integrate(spike, Interval{0.0, 10.0}, 1e-10, cuts);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quadrature input validation") {
    const auto f = [](double x) { return x; };
    CHECK_THROWS_AS(integrate(f, Interval{1.0, 0.0}, 1e-9), DomainError);
    CHECK_THROWS_AS(integrate(f, Interval{kInf, kInf}, 1e-9), DomainError);
    CHECK_THROWS_AS(integrate(f, Interval{0.0, 1.0}, 0.5), DomainError);
    CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, Interval{0.0, 1.0}, 1e-9),
                    DomainError);
}

TEST_CASE("minimize finds smooth optima") {
    const auto quad = [](std::span<const double> v) {
        const double dx = v[0] - 3.0;
        const double dy = v[1] + 1.0;
        return dx * dx + 2.0 * dy * dy;
    };
    const MinimizeResult res = minimize(quad, std::vector<double>{0.0, 0.0});
    CHECK(res.converged);
    // Convergence is declared on the function value; the argmin of a flat
    // quadratic is only accurate to about sqrt(tolerance).
    CHECK(res.argmin[0] == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(res.argmin[1] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(res.min_value < 1e-8);

    const auto rosenbrock = [](std::span<const double> v) {
        const double a = 1.0 - v[0];
        const double b = v[1] - v[0] * v[0];
        return a * a + 100.0 * b * b;
    };
    const MinimizeResult ros = minimize(rosenbrock, std::vector<double>{-1.2, 1.0});
    CHECK(ros.converged);
    CHECK(ros.argmin[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(ros.argmin[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("minimize treats non-finite objective values as rejected moves") {
    const auto partial = [](std::span<const double> v) {
        const double r2 = v[0] * v[0];
        if (r2 > 1.0) {
            return std::nan("");
        }
        const double d = v[0] - 0.2;
        return d * d;
    };
    const MinimizeResult res = minimize(partial, std::vector<double>{0.5});
    CHECK(res.converged);
    CHECK(res.argmin[0] == doctest::Approx(0.2).epsilon(1e-4));

    CHECK_THROWS_AS(minimize(partial, std::vector<double>{2.0}), DomainError);
}

TEST_CASE("minimize is deterministic and honors iteration caps") {
    const auto f = [](std::span<const double> v) {
        return std::cos(v[0]) + 0.01 * v[0] * v[0];
    };
    OptimizerConfig config;
    config.seed = 7;
    const MinimizeResult a = minimize(f, std::vector<double>{1.0}, config);
    const MinimizeResult b = minimize(f, std::vector<double>{1.0}, config);
    CHECK(a.argmin[0] == b.argmin[0]);
    CHECK(a.min_value == b.min_value);

    OptimizerConfig capped;
    capped.max_iterations = 1;
    capped.restarts = 0;
    const MinimizeResult c = minimize(f, std::vector<double>{1.0}, capped);
    CHECK_FALSE(c.converged);
}

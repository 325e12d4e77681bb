#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "hextreme/specfun.hpp"

using namespace hextreme;
using boost::multiprecision::cpp_bin_float_50;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

// L_n^{(a)}(x) = sum_k (-1)^k C(n+a, n-k) x^k / k!, summed in 50-digit arithmetic.
double laguerre_oracle(int n, double a, double x) {
    cpp_bin_float_50 s = 0, xa = x, aa = a;
    for (int k = 0; k <= n; ++k) {
        cpp_bin_float_50 binom = 1;
        for (int j = 1; j <= n - k; ++j) binom *= (aa + k + j) / j;
        cpp_bin_float_50 term = binom * boost::multiprecision::pow(xa, k) / boost::math::factorial<cpp_bin_float_50>(k);
        s += (k % 2) ? -term : term;
    }
    return static_cast<double>(s);
}

}  // namespace

TEST(LnGamma, KnownValues) {
    EXPECT_NEAR(ln_gamma(1.0), 0.0, 1e-16);
    EXPECT_NEAR(ln_gamma(2.0), 0.0, 1e-16);
    EXPECT_NEAR(ln_gamma(0.5), 0.5723649429247001, 1e-14);
    EXPECT_NEAR(ln_gamma(6.0), std::log(120.0), 1e-13);
    EXPECT_THROW(ln_gamma(0.0), DomainError);
    EXPECT_THROW(ln_gamma(-1.5), DomainError);
}

TEST(LnGamma, AgreesWithBoostAcrossRange) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-8.0, 6.0);
    for (int i = 0; i < 400; ++i) {
        const double x = std::pow(10.0, u(rng));
        EXPECT_LE(rel(ln_gamma(x), boost::math::lgamma(x)), 1e-13) << x;
    }
}

TEST(Digamma, KnownValuesAndRecurrence) {
    EXPECT_NEAR(digamma(1.0), -kEulerGamma, 1e-13);
    EXPECT_NEAR(digamma(2.0), 1.0 - kEulerGamma, 1e-13);
    EXPECT_NEAR(digamma(10.3), boost::math::digamma(10.3), 1e-12);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-3, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(digamma(x + 1.0) - digamma(x), 1.0 / x, 1e-11 * std::max(1.0, 1.0 / x));
        EXPECT_NEAR(digamma(x), boost::math::digamma(x), 1e-12 * std::max(1.0, std::fabs(digamma(x))));
    }
    EXPECT_THROW(digamma(0.0), DomainError);
}

TEST(IncompleteGamma, KnownValues) {
    EXPECT_NEAR(incomplete_gamma_lower(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_EQ(incomplete_gamma_lower(3.3, 0.0), 0.0);
    EXPECT_LE(rel(incomplete_gamma_lower(2.5, 3.7), boost::math::tgamma_lower(2.5, 3.7)), 1e-12);
    EXPECT_THROW(incomplete_gamma_lower(0.0, 1.0), DomainError);
    EXPECT_THROW(incomplete_gamma_lower(1.0, -1.0), DomainError);
}

TEST(IncompleteGamma, RegularizedPairMatchesBoost) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lp(-2.0, 2.5), lx(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double p = std::pow(10.0, lp(rng)), x = std::pow(10.0, lx(rng));
        const double P = gamma_p(p, x), Q = gamma_q(p, x);
        EXPECT_NEAR(P + Q, 1.0, 1e-14);
        const double bp = boost::math::gamma_p(p, x), bq = boost::math::gamma_q(p, x);
        if (bp > 1e-250) EXPECT_LE(rel(P, bp), 1e-12) << p << ' ' << x;
        if (bq > 1e-250) EXPECT_LE(rel(Q, bq), 1e-12) << p << ' ' << x;
        if (bp > 1e-250) {
            const double ref = std::log(bp) + boost::math::lgamma(p);
            EXPECT_NEAR(ln_incomplete_gamma_lower(p, x), ref, 1e-12 * std::max(1.0, std::fabs(ref)));
        }
    }
}

TEST(Laguerre, SmallDegreesAndOracle) {
    EXPECT_EQ(laguerre_eval(0, 1.7, 3.0), 1.0);
    EXPECT_NEAR(laguerre_eval(1, 0.0, 1.0), 0.0, 1e-16);
    EXPECT_LE(rel(laguerre_eval(5, 2.0, 0.7), laguerre_oracle(5, 2.0, 0.7)), 1e-13);
    for (int n : {3, 10, 25}) {
        for (double a : {-0.5, 0.0, 1.5}) {
            for (double x : {0.1, 2.0, 9.0}) {
                EXPECT_LE(rel(laguerre_eval(n, a, x), laguerre_oracle(n, a, x)), 1e-10) << n << ' ' << a << ' ' << x;
            }
        }
    }
}

TEST(GaussLaguerre, ClassicalOrdersOneAndTwo) {
    const auto r1 = gauss_laguerre_rule(1, 0.0);
    ASSERT_EQ(r1.nodes().size(), 1u);
    EXPECT_NEAR(r1.nodes()[0], 1.0, 1e-14);
    EXPECT_NEAR(r1.weights()[0], 1.0, 1e-14);
    const auto r2 = gauss_laguerre_rule(2, 0.0);
    const double s = std::numbers::sqrt2;
    EXPECT_NEAR(r2.nodes()[0], 2.0 - s, 1e-14);
    EXPECT_NEAR(r2.nodes()[1], 2.0 + s, 1e-14);
    EXPECT_NEAR(r2.weights()[0], (2.0 + s) / 4.0, 1e-14);
    EXPECT_NEAR(r2.weights()[1], (2.0 - s) / 4.0, 1e-14);
}

TEST(GaussLaguerre, ZerothMomentAndOrdering) {
    const auto r = gauss_laguerre_rule(32, 1.5);
    double sum = 0.0;
    for (double w : r.weights()) sum += w;
    EXPECT_LE(rel(sum, std::tgamma(2.5)), 1e-12);
    for (std::size_t j = 0; j < r.nodes().size(); ++j) {
        EXPECT_GT(r.nodes()[j], 0.0);
        if (j > 0) EXPECT_GT(r.nodes()[j], r.nodes()[j - 1]);
    }
}

TEST(GaussLaguerre, ExactForPolynomialsUpToDegree2NMinus1) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ua(-0.9, 5.0), uc(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 9;
        const double a = ua(rng);
        const auto r = gauss_laguerre_rule(n, a);
        std::vector<double> c(static_cast<std::size_t>(2 * n));
        // Nonnegative coefficients keep the exact moment sum free of cancellation.
        for (auto& v : c) v = uc(rng);
        double exact = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) exact += c[k] * std::tgamma(a + k + 1.0);
        const double quad = r.apply([&](double x) {
            double p = 0.0;
            for (std::size_t k = c.size(); k-- > 0;) p = p * x + c[k];
            return p;
        });
        EXPECT_LE(rel(quad, exact), 1e-10) << "n=" << n << " alpha=" << a;
    }
}

TEST(GaussLaguerre, DomainChecks) {
    EXPECT_THROW(gauss_laguerre_rule(0, 0.0), DomainError);
    EXPECT_THROW(gauss_laguerre_rule(513, 0.0), DomainError);
    EXPECT_THROW(gauss_laguerre_rule(4, -1.0), DomainError);
    EXPECT_NO_THROW(gauss_laguerre_rule(512, 0.5));
}

TEST(Normal, QuantileAndCdfMatchBoost) {
    boost::math::normal_distribution<> nd;
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.975, 0.999999}) {
        EXPECT_NEAR(normal_quantile(p), boost::math::quantile(nd, p), 1e-12 * std::max(1.0, std::fabs(boost::math::quantile(nd, p))));
    }
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    for (double x : {-7.0, -1.0, 0.0, 2.5}) EXPECT_NEAR(normal_cdf(x), boost::math::cdf(nd, x), 1e-15);
}

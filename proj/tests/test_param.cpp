#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "hextreme/dist.hpp"
#include "hextreme/param.hpp"
#include "hextreme/random.hpp"
#include "hextreme/submodel.hpp"

using namespace hextreme;

TEST(ParamVector, IndexingAndShift) {
    ParamVector p(1, 2, 3, 4, 5, 6);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(p[i], static_cast<double>(i + 1));
    EXPECT_EQ(p.with_poly_shift(0.5).poly_exponent, 6.5);
    EXPECT_EQ(p.with(2, -1.0).inner_power, -1.0);
    EXPECT_THROW(p[6], DomainError);
    EXPECT_EQ(ParamVector(p.to_array()), p);
}

TEST(Integrability, BasicRegimes) {
    EXPECT_TRUE(is_integrable({1, 0, 1, 0, 1, 0}));
    EXPECT_TRUE(is_integrable({0, 1, 1, 0, 2, 1}));        // Weibull
    EXPECT_TRUE(is_integrable({0, 1, 1, 0, -1, -2}));      // Frechet
    EXPECT_FALSE(is_integrable({0, 0, 1, 0, 1, 0}));       // no decay at all
    EXPECT_FALSE(is_integrable({1, 0, 1, 0, 1, -1}));      // y^-1 at zero
    EXPECT_FALSE(is_integrable({0, 1, 1, 0, -1, 0.5}));    // Frechet-like with poly > -1
    EXPECT_TRUE(is_integrable({0, 1, 1, 0, 0.5, 0}));      // exp(-sqrt(y)) still decays
    EXPECT_FALSE(is_integrable({0, 1, 1, 0, 0.5, -2}));    // but y^-2 blows up at zero
    EXPECT_FALSE(is_integrable({1, 0, 1, 0, 1, std::nan("")}));
}

TEST(Integrability, NaturalPowerRelaxations) {
    // Even m: negative scale allowed since u >= 0.
    EXPECT_TRUE(is_integrable({1, -0.5, 1, 0.2, 2, 0}));
    // Odd m with inner*m > 1 and a negative scale drives u to -inf.
    EXPECT_FALSE(is_integrable({1, -1, 1, 0, 3, 0}));
    // Odd m, inner*m = 1: rate + scale must be positive.
    EXPECT_TRUE(is_integrable({2, -1, 1, 0, 1, 0}));
    EXPECT_FALSE(is_integrable({1, -1, 1, 0, 1, 0}));
    EXPECT_FALSE(is_integrable({0.5, -1, 1, 0, 1, 0}));
    // Non-natural outer power with a negative base is undefined.
    EXPECT_FALSE(is_integrable({1, -1, 1, 0, 1.5, 0}));
}

TEST(Validity, ClassificationIsConsistent) {
    EXPECT_EQ(classify({1, 0, 1, 0, 1, 0}), Validity::in_space);
    EXPECT_EQ(classify({0, 0, 1, 0, 1, 0}), Validity::invalid);
    EXPECT_EQ(to_string(classify({1, 0, 1, 0, 1, 0})), "in_space");
    EXPECT_THROW(require_integrable({0, 0, 1, 0, 1, 0}, "t"), DomainError);
    EXPECT_NO_THROW(require_integrable({1, 0, 1, 0, 1, 0}, "t"));
}

TEST(Integrability, AgreesWithBruteForceOnRandomVectors) {
    // Oracle: on the log axis the integrand is y k(y); it must be decreasing
    // far out on both ends, probed at |t| = 300 and 600.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.0, 3.0);
    const double ninf = -std::numeric_limits<double>::infinity();
    auto below = [&](double a, double b) { return a < b || (a == ninf && b == ninf); };
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        ParamVector p(pos(rng) < 1.0 ? 0.0 : pos(rng), pos(rng), u(rng), pos(rng) < 1.5 ? 0.0 : pos(rng), u(rng), u(rng));
        if (std::fabs(p.inner_power) < 0.2 || std::fabs(p.outer_power) < 0.2) continue;
        auto tail = [&](double t) { return log_kernel_t(p, t); };
        const bool decays = below(tail(-600.0), tail(-300.0)) && below(tail(600.0), tail(300.0));
        EXPECT_EQ(is_integrable(p), decays) << p;
        ++checked;
    }
    EXPECT_GT(checked, 200);
}

TEST(SubModel, TabulatedVectors) {
    const ParamVector w = from_submodel(SubModel::make_weibull(5.505, 2.651));
    EXPECT_NEAR(w.scale, 0.377, 5e-4);
    EXPECT_NEAR(w.outer_power, 5.505, 1e-12);
    EXPECT_NEAR(w.poly_exponent, 4.505, 1e-12);
    EXPECT_EQ(w.rate, 0.0);
    const ParamVector f = from_submodel(SubModel::make_frechet(1.564, 13.76));
    EXPECT_NEAR(f.scale, 0.0727, 5e-5);
    EXPECT_EQ(f.outer_power, -1.564);
    EXPECT_NEAR(f.poly_exponent, -2.564, 1e-12);
    EXPECT_EQ(from_submodel(SubModel::make_gamma(1, 1)), ParamVector(1, 0, 1, 0, 1, 0));
    EXPECT_THROW(from_submodel(SubModel::make_gamma(-1, 1)), DomainError);
    EXPECT_THROW(from_submodel(SubModel::make_erlang(0, 1)), DomainError);
    EXPECT_THROW(from_submodel(SubModel::make_modified_half_normal(1, 1, 0.5)), DomainError);
    EXPECT_EQ(submodel_from_string("weibull"), SubModelKind::weibull);
    EXPECT_FALSE(submodel_from_string("lognormal").has_value());
}

TEST(SubModel, PointwiseDensityAgreement) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> a(0.5, 4.0), y(0.05, 6.0);
    for (int i = 0; i < 30; ++i) {
        const double p1 = a(rng), p2 = a(rng), p3 = a(rng);
        const std::vector<SubModel> rows = {
            SubModel::make_gamma(p1, p2),
            SubModel::make_generalized_gamma(p1, p2, p3),
            SubModel::make_inverse_gamma(p1, p2),
            SubModel::make_weibull(p1, p2),
            SubModel::make_frechet(p1, p2),
            SubModel::make_half_normal(p1),
            SubModel::make_modified_half_normal(p1, p2, -p3),
            SubModel::make_rayleigh(p1),
            SubModel::make_erlang(1 + i % 5, p2),
            SubModel::make_exponential(p1),
        };
        for (const auto& s : rows) {
            const double yy = y(rng);
            const double ref = submodel_pdf(s, yy);
            EXPECT_LE(std::fabs(pdf(yy, from_submodel(s)) - ref), 1e-9 * ref) << to_string(s.kind) << " y=" << yy;
        }
    }
}

TEST(SubModel, FoxWrightMatchesDirectSum) {
    // Direct term-by-term sum with Boost's tgamma as the oracle.
    for (double a : {0.5, 1.3}) {
        for (double z : {-1.5, 0.0, 2.0}) {
            double s = 0.0;
            for (int k = 0; k < 150; ++k) s += boost::math::tgamma(a + 0.5 * k) * std::pow(z, k) / boost::math::factorial<double>(k);
            EXPECT_NEAR(fox_wright_psi(a, z), s, 1e-12 * std::fabs(s));
        }
    }
}

TEST(CounterRng, DeterministicAndStreamIndependent) {
    CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        seen.insert(x);
        seen.insert(c.next());
        seen.insert(d.next());
    }
    EXPECT_EQ(seen.size(), 3000u);
}

TEST(CounterRng, UniformMoments) {
    CounterRng r(7);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 2e-3);
}

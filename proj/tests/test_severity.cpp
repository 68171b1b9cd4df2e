#include "treeloss/severity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "treeloss/rng.hpp"

namespace {

using testsupport::gamma51;
using testsupport::normal54;
using treeloss::RngStream;
using treeloss::SeverityModel;

TEST(Severity, GammaMomentsAndParams) {
    const auto g = SeverityModel::make_gamma(5, 2);
    EXPECT_DOUBLE_EQ(g.mean(), 2.5);
    EXPECT_DOUBLE_EQ(g.variance(), 1.25);
    const auto g2 = SeverityModel::make_gamma(1, 0.5);
    EXPECT_DOUBLE_EQ(g2.mean(), 2.0);
    EXPECT_DOUBLE_EQ(g2.variance(), 4.0);
    EXPECT_EQ(g.canonical(), "gamma(5,2)");
}

TEST(Severity, NormalMomentsAndParams) {
    const auto n = normal54();
    EXPECT_DOUBLE_EQ(n.mean(), 5.0);
    EXPECT_DOUBLE_EQ(n.variance(), 4.0);
    EXPECT_EQ(n.canonical(), "normal(5,4)");
}

TEST(Severity, GammaSurvivalReferencePoints) {
    const auto g = gamma51();
    EXPECT_DOUBLE_EQ(g.survival(0.0), 1.0);
    EXPECT_DOUBLE_EQ(g.survival(-1.0), 1.0);  // support is the positive axis
    EXPECT_NEAR(g.survival(5.0), testsupport::oracle::kGammaSurv5, 1e-14);
    // Closed form for integer shape: S(x) = e^-x sum_{j<5} x^j / j!.
    for (double x : {0.5, 2.0, 5.0, 11.0, 25.0}) {
        long double sum = 0.0L, term = 1.0L;
        for (int j = 0; j < 5; ++j) {
            sum += term;
            term *= static_cast<long double>(x) / (j + 1);
        }
        const double closed = static_cast<double>(std::exp(-static_cast<long double>(x)) * sum);
        EXPECT_NEAR(g.survival(x), closed, 1e-13) << "x=" << x;
    }
    // Rate scaling: a gamma(5,2) severity at x equals gamma(5,1) at 2x.
    const auto g2 = SeverityModel::make_gamma(5, 2);
    EXPECT_NEAR(g2.survival(2.5), g.survival(5.0), 1e-15);
}

TEST(Severity, NormalSurvivalReferencePoints) {
    const auto n = normal54();
    EXPECT_DOUBLE_EQ(n.survival(5.0), 0.5);  // at the mean by symmetry
    // One standard deviation above the mean.
    EXPECT_NEAR(n.survival(7.0), 0.158655253931457051415, 1e-14);
    EXPECT_NEAR(n.survival(5.0 / 0.95), testsupport::oracle::kNormalHops[1], 1e-14);
    EXPECT_NEAR(n.survival(-1e5), 1.0, 1e-15);
    EXPECT_EQ(n.survival(1e5), 0.0);
}

TEST(Severity, DegenerateNormalIsAPointMass) {
    const auto point = SeverityModel::make_normal(3.0, 0.0);
    EXPECT_EQ(point.survival(2.999), 1.0);
    EXPECT_EQ(point.survival(3.0), 0.0);
    EXPECT_DOUBLE_EQ(point.variance(), 0.0);
    RngStream rng(1, 0);
    EXPECT_EQ(point.sample(rng), 3.0);
}

TEST(Severity, SurvivalIsMonotoneNonIncreasing) {
    RngStream rng(2, 0);
    for (const auto& model : {gamma51(), normal54()}) {
        for (int i = 0; i < 200; ++i) {
            double a = 20.0 * rng.uniform01();
            double b = 20.0 * rng.uniform01();
            if (a > b) std::swap(a, b);
            EXPECT_GE(model.survival(a), model.survival(b));
        }
    }
}

TEST(Severity, SamplerMatchesSurvival) {
    // Empirical exceedance frequencies against the analytic survival, at a
    // few probe points, within 4.5 binomial standard errors.
    const int n = 400000;
    for (const auto& model : {gamma51(), normal54()}) {
        RngStream rng(3, 0);
        std::vector<double> probes = {2.0, 5.0, 8.0};
        std::vector<int> hits(probes.size(), 0);
        for (int i = 0; i < n; ++i) {
            const double x = model.sample(rng);
            for (std::size_t j = 0; j < probes.size(); ++j) hits[j] += x > probes[j];
        }
        for (std::size_t j = 0; j < probes.size(); ++j) {
            const double p = model.survival(probes[j]);
            const double se = std::sqrt(p * (1 - p) / n);
            EXPECT_NEAR(static_cast<double>(hits[j]) / n, p, 4.5 * se)
                << model.canonical() << " at " << probes[j];
        }
    }
}

TEST(Severity, SamplerMatchesMoments) {
    const int n = 400000;
    for (const auto& model : {gamma51(), normal54()}) {
        RngStream rng(4, 0);
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = model.sample(rng);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        EXPECT_NEAR(mean, model.mean(), 4.5 * std::sqrt(model.variance() / n))
            << model.canonical();
        EXPECT_NEAR(sumsq / n - mean * mean, model.variance(), 0.05 * model.variance())
            << model.canonical();
    }
}

TEST(Severity, SamplingIsDeterministicPerStream) {
    const auto g = gamma51();
    RngStream a(11, 3), b(11, 3);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(g.sample(a), g.sample(b));
}

TEST(Severity, ParameterValidation) {
    EXPECT_THROW(SeverityModel::make_gamma(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(SeverityModel::make_gamma(5.0, 0.0), std::invalid_argument);
    EXPECT_THROW(SeverityModel::make_gamma(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(SeverityModel::make_normal(5.0, -1.0), std::invalid_argument);
    // Sub-1 gamma shapes have a valid survival but no sampler support.
    const auto g = SeverityModel::make_gamma(0.5, 1.0);
    EXPECT_GT(g.survival(1.0), 0.0);
    RngStream rng(5, 0);
    EXPECT_THROW(g.sample(rng), std::invalid_argument);
}

}  // namespace

#include "treeloss/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

namespace {

using treeloss::RngStream;

TEST(RngStream, SameKeySameSequence) {
    RngStream a(12345, 7);
    RngStream b(12345, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DifferentStreamsDiverge) {
    RngStream a(12345, 0);
    RngStream b(12345, 1);
    RngStream c(12346, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        equal_ab += va == b.next_u64();
        equal_ac += va == c.next_u64();
    }
    EXPECT_LE(equal_ab, 1);
    EXPECT_LE(equal_ac, 1);
}

TEST(RngStream, UniformRanges) {
    RngStream rng(99, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = rng.uniform_open01();
        ASSERT_GT(v, 0.0);
        ASSERT_LT(v, 1.0);
    }
}

TEST(RngStream, UniformMoments) {
    RngStream rng(4, 0);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    // SE of the mean is sqrt(1/12n); allow 4.5 sigma.
    EXPECT_NEAR(mean, 0.5, 4.5 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(var, 1.0 / 12.0, 5e-4);
}

TEST(RngStream, BernoulliEdgesAndRate) {
    RngStream rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_FALSE(rng.bernoulli(0.0));
        ASSERT_TRUE(rng.bernoulli(1.0));
    }
    int hits = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3);
    const double se = std::sqrt(0.3 * 0.7 / n);
    EXPECT_NEAR(static_cast<double>(hits) / n, 0.3, 4.5 * se);
}

TEST(RngStream, NormalMoments) {
    RngStream rng(6, 0);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sumsq += x * x;
        sum4 += x * x * x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 4.5 / std::sqrt(static_cast<double>(n)));
    // Var(x^2) = 2, so the SE of the second-moment estimate is sqrt(2/n).
    EXPECT_NEAR(sumsq / n, 1.0, 4.5 * std::sqrt(2.0 / n));
    EXPECT_NEAR(sum4 / n, 3.0, 0.1);  // kurtosis of the standard normal
}

TEST(RngStream, GammaMomentsAndDomain) {
    RngStream rng(7, 0);
    const int n = 500000;
    for (double shape : {1.0, 2.5, 5.0}) {
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = rng.gamma(shape);
            ASSERT_GT(x, 0.0);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        // SE of the mean is sqrt(shape/n).
        EXPECT_NEAR(mean, shape, 4.5 * std::sqrt(shape / n)) << "shape=" << shape;
        EXPECT_NEAR(var, shape, 0.05 * shape) << "shape=" << shape;
    }
    EXPECT_THROW(rng.gamma(0.5), std::invalid_argument);
    EXPECT_THROW(rng.gamma(0.0), std::invalid_argument);
}

TEST(RngStream, PoissonSmallMean) {
    RngStream rng(8, 0);
    const int n = 400000;
    const double lambda = 1.5;
    double sum = 0.0, sumsq = 0.0;
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(rng.poisson(lambda));
        sum += x;
        sumsq += x * x;
        zeros += x == 0.0;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, lambda, 4.5 * std::sqrt(lambda / n));
    EXPECT_NEAR(sumsq / n - mean * mean, lambda, 0.05 * lambda);
    const double p0 = std::exp(-lambda);
    EXPECT_NEAR(static_cast<double>(zeros) / n, p0, 4.5 * std::sqrt(p0 * (1 - p0) / n));
}

TEST(RngStream, PoissonLargeMean) {
    RngStream rng(9, 0);
    const int n = 200000;
    const double lambda = 80.0;  // exercises the rejection branch
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(rng.poisson(lambda));
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, lambda, 4.5 * std::sqrt(lambda / n));
    EXPECT_NEAR(sumsq / n - mean * mean, lambda, 0.05 * lambda);
}

TEST(RngStream, PoissonEdges) {
    RngStream rng(10, 0);
    EXPECT_EQ(rng.poisson(0.0), 0u);
    EXPECT_THROW(rng.poisson(-1.0), std::invalid_argument);
    EXPECT_THROW(rng.poisson(std::numeric_limits<double>::quiet_NaN()),
                 std::invalid_argument);
}

}  // namespace

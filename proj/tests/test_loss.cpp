#include "treeloss/loss.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "treeloss/network.hpp"

namespace {

namespace oracle = testsupport::oracle;
using testsupport::constant_tree;
using testsupport::gamma51;
using testsupport::normal54;
using treeloss::ArrivalProcess;
using treeloss::DecayProfile;
using treeloss::MomentPair;
using treeloss::PremiumPrinciple;
using treeloss::ProfileSpec;
using treeloss::Scenario;
using treeloss::SecurityProfile;
using treeloss::SeverityModel;
using treeloss::TreeSpec;

const DecayProfile kDecay = DecayProfile::geometric(0.95);

TEST(PathLoss, ScalesSeverityMoments) {
    // Terminal damage is beta_k c_{r+k} X: with k=3, c=3, b=0.95 the scale is
    // 0.95^3 * 3 = 2.572125, against a unit-mean severity.
    const auto tree = constant_tree(2, 30, 3.0);
    const auto unit = SeverityModel::make_gamma(5, 5);  // mean 1, variance 0.2
    const MomentPair z = path_loss_moments(Scenario(0, 3), tree, kDecay, unit);
    const double scale = 0.857375 * 3.0;
    EXPECT_NEAR(z.mean, scale, 1e-12);
    EXPECT_NEAR(z.variance, scale * scale * 0.2, 1e-12);
}

TEST(PathLoss, DegenerateSeverityHasZeroVariance) {
    const auto tree = constant_tree(2, 30, 5.0);
    const auto point = SeverityModel::make_normal(4.0, 0.0);
    const MomentPair z = path_loss_moments(Scenario(2, 3), tree, kDecay, point);
    EXPECT_EQ(z.variance, 0.0);
    EXPECT_NEAR(z.mean, std::pow(0.95, 3) * 5.0 * 4.0, 1e-12);
}

TEST(PathLoss, RejectsScenariosBeyondRadius) {
    const auto tree = constant_tree(2, 10, 5.0);
    EXPECT_THROW(path_loss_moments(Scenario(5, 6), tree, kDecay, gamma51()),
                 std::out_of_range);
}

TEST(LocalLoss, MatchesFrozenDepthOneValue) {
    // r=0, k=1, rho=2, c=5: E[S] = 2 P (0.95 * 5) * 5 with P the two-hop product.
    const auto tree = constant_tree(2, 30, 5.0);
    const MomentPair s = local_loss_moments(Scenario(0, 1), tree, kDecay, gamma51());
    EXPECT_NEAR(s.mean, oracle::kLocalLossMeanDepth1, 1e-12);
}

TEST(LocalLoss, CompoundBinomialIdentity) {
    // Var[S] = rho^k P (sigma_Z^2 + (1-P) mu_Z^2), reassembled here from the
    // path-level pieces the module also exposes.
    const auto tree = constant_tree(3, 30, 4.0);
    for (const auto& severity : {gamma51(), normal54()}) {
        for (int k : {0, 1, 4}) {
            const Scenario scenario(2, k);
            const auto law = path_count_law(scenario, tree, kDecay, severity);
            const MomentPair z = path_loss_moments(scenario, tree, kDecay, severity);
            const MomentPair s = local_loss_moments(scenario, tree, kDecay, severity);
            const double np = static_cast<double>(law.trials) * law.success;
            EXPECT_NEAR(s.mean, np * z.mean, 1e-12 * std::fabs(s.mean));
            EXPECT_NEAR(s.variance,
                        np * (z.variance + (1.0 - law.success) * z.mean * z.mean),
                        1e-12 * s.variance);
        }
    }
}

TEST(LocalLoss, ImpossibleContagionMeansZeroLoss) {
    const SecurityProfile huge(ProfileSpec::constant(1e300), 30);
    const TreeSpec tree(2, huge);
    const MomentPair s = local_loss_moments(Scenario(0, 2), tree, kDecay, gamma51());
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.variance, 0.0);
}

TEST(LocalLoss, CertainSingleHopReducesToPathLoss) {
    // Tiny costs make every gamma hop certain; with rho = 1 there is exactly
    // one path, so S collapses to the path loss itself.
    const SecurityProfile tiny(ProfileSpec::constant(1e-300), 30);
    const TreeSpec tree(1, tiny);
    const Scenario scenario(0, 4);
    const auto law = path_count_law(scenario, tree, kDecay, gamma51());
    EXPECT_EQ(law.success, 1.0);
    const MomentPair z = path_loss_moments(scenario, tree, kDecay, gamma51());
    const MomentPair s = local_loss_moments(scenario, tree, kDecay, gamma51());
    EXPECT_DOUBLE_EQ(s.mean, z.mean);
    EXPECT_DOUBLE_EQ(s.variance, z.variance);
}

TEST(AggregateLoss, MatchesFrozenDepthOneValue) {
    const auto tree = constant_tree(2, 30, 5.0);
    const MomentPair l = aggregate_loss_moments(Scenario(0, 1), tree, kDecay, gamma51(),
                                                ArrivalProcess(1.5, 1.0));
    EXPECT_NEAR(l.mean, oracle::kAggregateMeanDepth1, 1e-12);
}

TEST(AggregateLoss, CompoundPoissonIdentity) {
    const auto tree = constant_tree(2, 30, 5.0);
    const ArrivalProcess arrivals(1.5, 2.0);
    for (const auto& severity : {gamma51(), normal54()}) {
        for (int k : {0, 1, 5}) {
            const Scenario scenario(1, k);
            const MomentPair s = local_loss_moments(scenario, tree, kDecay, severity);
            const MomentPair l =
                aggregate_loss_moments(scenario, tree, kDecay, severity, arrivals);
            EXPECT_NEAR(l.mean, 3.0 * s.mean, 1e-12 * l.mean);
            EXPECT_NEAR(l.variance, 3.0 * (s.variance + s.mean * s.mean),
                        1e-12 * l.variance);
        }
    }
}

TEST(AggregateLoss, ZeroHorizonMeansZeroLoss) {
    const auto tree = constant_tree(2, 30, 5.0);
    const MomentPair l = aggregate_loss_moments(Scenario(0, 1), tree, kDecay, gamma51(),
                                                ArrivalProcess(1.5, 0.0));
    EXPECT_EQ(l.mean, 0.0);
    EXPECT_EQ(l.variance, 0.0);
}

TEST(AggregateLoss, LinearInHorizon) {
    const auto tree = constant_tree(2, 30, 5.0);
    const Scenario scenario(0, 2);
    const MomentPair full = aggregate_loss_moments(scenario, tree, kDecay, gamma51(),
                                                   ArrivalProcess(1.5, 1.0));
    const MomentPair half = aggregate_loss_moments(scenario, tree, kDecay, gamma51(),
                                                   ArrivalProcess(1.5, 0.5));
    EXPECT_DOUBLE_EQ(half.mean, 0.5 * full.mean);
    EXPECT_DOUBLE_EQ(half.variance, 0.5 * full.variance);
}

TEST(ArrivalProcessValidation, RejectsBadParameters) {
    EXPECT_THROW(ArrivalProcess(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ArrivalProcess(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ArrivalProcess(1.5, -0.1), std::invalid_argument);
}

TEST(Premium, HandPickedValues) {
    // mean 100, variance 400, delta 0.1: the loading adds 0.1 * 20 = 2.
    const MomentPair aggregate{100.0, 400.0};
    EXPECT_DOUBLE_EQ(
        premium(aggregate, PremiumPrinciple::expected_value, 0.1).amount, 100.0);
    EXPECT_DOUBLE_EQ(
        premium(aggregate, PremiumPrinciple::standard_deviation, 0.1).amount, 102.0);
}

TEST(Premium, PrinciplesCoincideAtZeroLoading) {
    const MomentPair aggregate{37.5, 12.25};
    EXPECT_DOUBLE_EQ(premium(aggregate, PremiumPrinciple::expected_value, 0.0).amount,
                     premium(aggregate, PremiumPrinciple::standard_deviation, 0.0).amount);
}

TEST(Premium, LoadingIsMonotone) {
    const MomentPair aggregate{10.0, 9.0};
    double prev = premium(aggregate, PremiumPrinciple::standard_deviation, 0.0).amount;
    for (double delta : {0.05, 0.1, 0.5, 1.0}) {
        const double quote =
            premium(aggregate, PremiumPrinciple::standard_deviation, delta).amount;
        EXPECT_GT(quote, prev);
        prev = quote;
    }
}

TEST(Premium, SafetyLoadingNeverCheapensTheQuote) {
    const auto tree = constant_tree(2, 30, 5.0);
    const ArrivalProcess arrivals(1.5, 1.0);
    for (int k : {0, 1, 3, 7}) {
        const MomentPair l =
            aggregate_loss_moments(Scenario(0, k), tree, kDecay, gamma51(), arrivals);
        EXPECT_GE(premium(l, PremiumPrinciple::standard_deviation, 0.1).amount,
                  premium(l, PremiumPrinciple::expected_value, 0.1).amount);
    }
}

TEST(Premium, Validation) {
    EXPECT_THROW(premium({10.0, 1.0}, PremiumPrinciple::expected_value, -0.1),
                 std::invalid_argument);
    EXPECT_THROW(premium({10.0, -1.0}, PremiumPrinciple::standard_deviation, 0.1),
                 std::logic_error);
}

}  // namespace

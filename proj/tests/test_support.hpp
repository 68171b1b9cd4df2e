#pragma once

#include <string>
#include <vector>

#include "treeloss/network.hpp"
#include "treeloss/severity.hpp"

namespace testsupport {

inline treeloss::SeverityModel gamma51() { return treeloss::SeverityModel::make_gamma(5, 1); }
inline treeloss::SeverityModel normal54() { return treeloss::SeverityModel::make_normal(5, 4); }

inline treeloss::TreeSpec constant_tree(int rho, int radius, double cost) {
    return treeloss::TreeSpec(
        rho, treeloss::SecurityProfile(treeloss::ProfileSpec::constant(cost), radius));
}

// Values computed offline with 40-digit arithmetic and frozen here; the code
// under test must reproduce them, not the other way round.
namespace oracle {

// Gamma(5, rate 1) survival at x = 5 and x = 5 / 0.95.
inline constexpr double kGammaSurv5 = 0.440493285065212411443;
inline constexpr double kGammaSurv5Over095 = 0.395591531950640886642;
// Product of the two hop masses above: P_0^(1) for the constant cost-5 profile.
inline constexpr double kProbDepth1Cost5 = 0.174255413452917739757;
// P_0^(5) for the same profile, decay 0.95^l.
inline constexpr double kProbDepth5Cost5 = 1.14808932166013253461e-3;

// Gamma(5,1) hop masses S(5 / 0.95^l), l = 0..5.
inline constexpr double kGammaHops[6] = {
    0.440493285065212411443, 0.395591531950640886642, 0.351293727424829025446,
    0.308207659427413480887, 0.266921579128609714062, 0.227977449457471465231};

// Normal(5, 4) hop masses at the same thresholds.
inline constexpr double kNormalHops[6] = {
    0.5, 0.447658669145890834117, 0.393548160734473996595,
    0.338750023546422019725, 0.28456130261381676173, 0.23242360377953919302};

// Local-loss mean for r=0, k=1, rho=2, cost 5, decay 0.95, gamma(5,1):
// 2 * P_0^(1) * 0.95 * 5 * 5.
inline constexpr double kLocalLossMeanDepth1 = 8.27713213901359263846;
// Aggregate mean at mu t = 1.5: the local mean times 1.5.
inline constexpr double kAggregateMeanDepth1 = 12.4156982085203889577;

// One-dimensional profile integrals int_0^1 S(C u / 0.95^l) du for the
// gamma(5,1) severity, and the resulting E[U_0^(1)] = 2 * I_0 * I_1.
inline constexpr double kProfileIntegralC2[2] = {0.988756003857824940517,
                                                 0.986439796161001250632};
inline constexpr double kProfileIntegralC3[2] = {0.955126481242611148254,
                                                 0.94745886493055250297};
inline constexpr double kProfileIntegralC4[2] = {0.897423951391867029346,
                                                 0.882967283152104081915};
inline constexpr double kMeanCountC2 = 1.95069654179695800104;
inline constexpr double kMeanCountC3 = 1.80988610356647400938;
inline constexpr double kMeanCountC4 = 1.58479197639220549083;

}  // namespace oracle

}  // namespace testsupport

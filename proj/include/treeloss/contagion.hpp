#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "treeloss/moments.hpp"
#include "treeloss/network.hpp"
#include "treeloss/severity.hpp"

namespace treeloss {

/// Probability that one fixed root-to-leaf path of k generations is fully
/// compromised. Hops are independent given the severity thresholds, so the
/// probability is the product of per-hop survival masses
///   P = prod_{l=0..k} S_X(d_l),  d_l = c_{r+l} / beta_l,
/// where l = 0 is the origin's own compromise.
struct PathProbability {
    double value = 1.0;
    double log_value = 0.0;       // -inf when any hop is impossible
    std::vector<double> per_hop;  // S_X(d_0) .. S_X(d_k)
};

inline PathProbability path_contagion_prob(const Scenario& scenario,
                                           const TreeSpec& tree,
                                           const DecayProfile& decay,
                                           const SeverityModel& severity) {
    PathProbability p;
    p.per_hop.reserve(static_cast<std::size_t>(scenario.depth) + 1);
    for (double d : thresholds(scenario, tree.profile(), decay)) {
        const double hop = severity.survival(d);
        p.per_hop.push_back(hop);
        p.value *= hop;
        p.log_value += std::log(hop);
    }
    return p;
}

/// Law of the reached-path count U_r^(k): Binomial(trials, success) with
/// trials = branching^k equally deep paths, each independently fully
/// compromised with the path contagion probability.
struct PathCountLaw {
    std::uint64_t trials = 1;
    double success = 0.0;
};

inline PathCountLaw path_count_law(const Scenario& scenario, const TreeSpec& tree,
                                   const DecayProfile& decay,
                                   const SeverityModel& severity) {
    return PathCountLaw{tree.path_count(scenario.depth),
                        path_contagion_prob(scenario, tree, decay, severity).value};
}

/// Binomial pmf evaluated in log space so large trial counts stay finite.
inline double path_count_pmf(const PathCountLaw& law, std::uint64_t n) {
    if (n > law.trials)
        throw std::invalid_argument("path count pmf: n exceeds the number of paths");
    const double p = law.success;
    if (p <= 0.0) return n == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return n == law.trials ? 1.0 : 0.0;
    const double log_pmf = log_choose(law.trials, n) +
                           static_cast<double>(n) * std::log(p) +
                           static_cast<double>(law.trials - n) * std::log1p(-p);
    return std::exp(log_pmf);
}

inline MomentPair path_count_moments(const PathCountLaw& law) {
    const double np = static_cast<double>(law.trials) * law.success;
    return MomentPair{np, np * (1.0 - law.success)};
}

}  // namespace treeloss

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "treeloss/contagion.hpp"
#include "treeloss/moments.hpp"
#include "treeloss/network.hpp"
#include "treeloss/severity.hpp"

namespace treeloss {

/// Poisson arrival of attack events: `intensity` per unit time over `horizon`.
struct ArrivalProcess {
    double intensity = 1.5;
    double horizon = 1.0;

    ArrivalProcess(double intensity_, double horizon_)
        : intensity(intensity_), horizon(horizon_) {
        if (!(intensity > 0.0) || !std::isfinite(intensity))
            throw std::invalid_argument("arrivals: intensity must be positive");
        if (!(horizon >= 0.0) || !std::isfinite(horizon))
            throw std::invalid_argument("arrivals: horizon must be >= 0");
    }

    double mean_count() const { return intensity * horizon; }

    bool operator==(const ArrivalProcess&) const = default;
};

/// Loss on one fully compromised path: the terminal node at ring r + k takes
/// damage beta_k * c_{r+k} * X, a deterministic rescaling of the severity.
inline MomentPair path_loss_moments(const Scenario& scenario, const TreeSpec& tree,
                                    const DecayProfile& decay,
                                    const SeverityModel& severity) {
    if (scenario.origin_distance + scenario.depth > tree.radius())
        throw std::out_of_range("path loss: scenario reaches beyond the tree radius");
    const double scale = decay.beta(scenario.depth) *
                         tree.profile().level(scenario.origin_distance + scenario.depth);
    return MomentPair{scale * severity.mean(), scale * scale * severity.variance()};
}

/// Moments of the one-event local loss S_r^(k) = sum over reached paths of an
/// independent terminal-node loss. With U ~ Binomial(rho^k, P) and per-path
/// loss Z (mean m, variance v), the compound law gives
///   E[S]   = rho^k P m
///   Var[S] = rho^k P (v + (1 - P) m^2)
inline MomentPair local_loss_moments(const Scenario& scenario, const TreeSpec& tree,
                                     const DecayProfile& decay,
                                     const SeverityModel& severity) {
    const PathCountLaw law = path_count_law(scenario, tree, decay, severity);
    // Impossible contagion is a point mass at zero loss; bail out before the
    // per-path moments (which may be astronomically scaled) enter a product.
    if (law.success == 0.0) return MomentPair{0.0, 0.0};
    const MomentPair z = path_loss_moments(scenario, tree, decay, severity);
    const double np = static_cast<double>(law.trials) * law.success;
    return MomentPair{np * z.mean,
                      np * (z.variance + (1.0 - law.success) * z.mean * z.mean)};
}

/// Moments of the horizon loss L_t, a compound Poisson sum of i.i.d. local
/// losses over N_t ~ Poisson(mu t) events:
///   E[L]   = mu t E[S]
///   Var[L] = mu t (Var[S] + E[S]^2)
inline MomentPair aggregate_loss_moments(const Scenario& scenario, const TreeSpec& tree,
                                         const DecayProfile& decay,
                                         const SeverityModel& severity,
                                         const ArrivalProcess& arrivals) {
    const MomentPair s = local_loss_moments(scenario, tree, decay, severity);
    const double rate = arrivals.mean_count();
    return MomentPair{rate * s.mean, rate * s.second_moment()};
}

enum class PremiumPrinciple { expected_value, standard_deviation };

inline const char* principle_name(PremiumPrinciple p) {
    return p == PremiumPrinciple::expected_value ? "expected" : "stddev";
}

struct PremiumQuote {
    PremiumPrinciple principle = PremiumPrinciple::expected_value;
    double delta = 0.0;
    double amount = 0.0;
};

/// Premium for a risk with the given aggregate moments. The expected-value
/// principle quotes the mean; the standard-deviation principle adds a safety
/// loading of delta standard deviations.
inline PremiumQuote premium(const MomentPair& aggregate, PremiumPrinciple principle,
                            double delta = 0.1) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("premium: delta must be >= 0");
    if (aggregate.variance < 0.0)
        throw std::logic_error("premium: negative variance");
    double amount = aggregate.mean;
    if (principle == PremiumPrinciple::standard_deviation)
        amount += delta * std::sqrt(aggregate.variance);
    return PremiumQuote{principle, delta, amount};
}

}  // namespace treeloss

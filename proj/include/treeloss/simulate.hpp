#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "treeloss/contagion.hpp"
#include "treeloss/errors.hpp"
#include "treeloss/format.hpp"
#include "treeloss/loss.hpp"
#include "treeloss/network.hpp"
#include "treeloss/rng.hpp"
#include "treeloss/severity.hpp"

namespace treeloss {

/// How paths share randomness within one replication.
///   independent_paths: every root-to-leaf path draws its own hop outcomes,
///                      so the path count is exactly Binomial(rho^k, P).
///   shared_edges:      one outcome per tree edge, shared by all paths
///                      through it. Same per-path marginal, overlapping
///                      paths positively correlated.
enum class SimMode { independent_paths, shared_edges };

/// How a single hop outcome is drawn.
///   bernoulli: coin flip with the precomputed survival mass S_X(d_l).
///   threshold: draw a severity X and test X > d_l; distributionally
///              identical, exercises the severity sampler instead.
enum class HopDraw { bernoulli, threshold };

struct SimConfig {
    std::uint64_t replications = 100000;
    std::uint64_t seed = 0;
    SimMode mode = SimMode::independent_paths;
    HopDraw hop_draw = HopDraw::bernoulli;
    unsigned threads = 1;
};

struct SimResult {
    double mean = 0.0;
    double variance = 0.0;     // unbiased sample variance
    double se = 0.0;           // standard error of the mean
    double variance_se = 0.0;  // standard error of the sample variance
    std::uint64_t replications = 0;
};

/// Everything one replication needs: per-hop success masses and thresholds
/// for a chain of depth k, the branching factor, and the terminal loss scale
/// beta_k * c_{r+k}.
struct HopChain {
    std::uint64_t branch = 1;
    std::vector<double> hop_prob;       // S_X(d_l), l = 0..k
    std::vector<double> hop_threshold;  // d_l
    double loss_scale = 0.0;

    int depth() const { return static_cast<int>(hop_prob.size()) - 1; }
};

inline HopChain make_hop_chain(const Scenario& scenario, const TreeSpec& tree,
                               const DecayProfile& decay,
                               const SeverityModel& severity) {
    HopChain chain;
    chain.branch = static_cast<std::uint64_t>(tree.branching());
    chain.hop_threshold = thresholds(scenario, tree.profile(), decay);
    chain.hop_prob.reserve(chain.hop_threshold.size());
    for (double d : chain.hop_threshold) chain.hop_prob.push_back(severity.survival(d));
    chain.loss_scale = decay.beta(scenario.depth) *
                       tree.profile().level(scenario.origin_distance + scenario.depth);
    return chain;
}

namespace detail {

inline bool hop_success(const HopChain& chain, std::size_t level, HopDraw draw,
                        const SeverityModel& severity, RngStream& rng) {
    if (draw == HopDraw::bernoulli) return rng.bernoulli(chain.hop_prob[level]);
    return severity.sample(rng) > chain.hop_threshold[level];
}

inline std::uint64_t count_paths_independent(const HopChain& chain, HopDraw draw,
                                             const SeverityModel& severity,
                                             RngStream& rng) {
    const std::uint64_t paths = checked_path_count(chain.branch, chain.depth());
    const std::size_t hops = chain.hop_prob.size();
    std::uint64_t count = 0;
    for (std::uint64_t p = 0; p < paths; ++p) {
        bool open = true;
        for (std::size_t l = 0; l < hops; ++l) {
            if (!hop_success(chain, l, draw, severity, rng)) {
                open = false;
                break;
            }
        }
        count += open ? 1 : 0;
    }
    return count;
}

/// Counts open leaf paths below a node already reached at `level`, drawing
/// one shared outcome per child edge. Only reached subtrees consume draws.
inline std::uint64_t count_paths_shared_below(const HopChain& chain, std::size_t level,
                                              HopDraw draw, const SeverityModel& severity,
                                              RngStream& rng) {
    if (level == chain.hop_prob.size() - 1) return 1;
    std::uint64_t total = 0;
    for (std::uint64_t child = 0; child < chain.branch; ++child)
        if (hop_success(chain, level + 1, draw, severity, rng))
            total += count_paths_shared_below(chain, level + 1, draw, severity, rng);
    return total;
}

}  // namespace detail

/// One replication of the path count U_r^(k).
inline std::uint64_t sample_path_count(const HopChain& chain, SimMode mode, HopDraw draw,
                                       const SeverityModel& severity, RngStream& rng) {
    if (mode == SimMode::independent_paths)
        return detail::count_paths_independent(chain, draw, severity, rng);
    if (!detail::hop_success(chain, 0, draw, severity, rng)) return 0;
    return detail::count_paths_shared_below(chain, 0, draw, severity, rng);
}

/// One replication of the local loss S_r^(k): each reached path contributes
/// an independent rescaled severity draw at its terminal node.
inline double sample_local_loss(const HopChain& chain, SimMode mode, HopDraw draw,
                                const SeverityModel& severity, RngStream& rng) {
    const std::uint64_t reached = sample_path_count(chain, mode, draw, severity, rng);
    double loss = 0.0;
    for (std::uint64_t j = 0; j < reached; ++j)
        loss += chain.loss_scale * severity.sample(rng);
    return loss;
}

/// One replication of the horizon loss L_t: Poisson(mu t) independent events.
inline double sample_aggregate_loss(const HopChain& chain, const ArrivalProcess& arrivals,
                                    SimMode mode, HopDraw draw,
                                    const SeverityModel& severity, RngStream& rng) {
    const std::uint64_t events = rng.poisson(arrivals.mean_count());
    double total = 0.0;
    for (std::uint64_t e = 0; e < events; ++e)
        total += sample_local_loss(chain, mode, draw, severity, rng);
    return total;
}

namespace detail {

/// Pairwise (cascade) summation: the result depends only on the data, never
/// on how replications were split across threads.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 64) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct CentralSums {
    double m2 = 0.0;
    double m4 = 0.0;
};

inline CentralSums pairwise_central_sums(std::span<const double> v, double mean) {
    if (v.size() <= 64) {
        CentralSums c;
        for (double x : v) {
            const double d = x - mean;
            const double d2 = d * d;
            c.m2 += d2;
            c.m4 += d2 * d2;
        }
        return c;
    }
    const std::size_t half = v.size() / 2;
    const CentralSums a = pairwise_central_sums(v.first(half), mean);
    const CentralSums b = pairwise_central_sums(v.subspan(half), mean);
    return CentralSums{a.m2 + b.m2, a.m4 + b.m4};
}

inline SimResult summarize(std::span<const double> values) {
    const auto n = values.size();
    const double nd = static_cast<double>(n);
    SimResult r;
    r.replications = n;
    r.mean = pairwise_sum(values) / nd;
    if (n < 2) return r;
    const CentralSums c = pairwise_central_sums(values, r.mean);
    r.variance = c.m2 / (nd - 1.0);
    r.se = std::sqrt(r.variance / nd);
    // Var(s^2) = (m4 - s^4 (n-3)/(n-1)) / n with the moment estimates plugged in.
    const double m4 = c.m4 / nd;
    const double var_of_var = (m4 - (nd - 3.0) / (nd - 1.0) * r.variance * r.variance) / nd;
    r.variance_se = std::sqrt(var_of_var > 0.0 ? var_of_var : 0.0);
    return r;
}

}  // namespace detail

/// Runs `replications` independent replications of `per_rep`, one RngStream
/// per replication keyed by its index. Thread count affects wall time only:
/// stream assignment and the pairwise reductions are fixed by the data.
template <class PerRep>
SimResult run_replications(std::uint64_t replications, std::uint64_t seed,
                           unsigned threads, PerRep&& per_rep) {
    if (replications < 1)
        throw std::invalid_argument("simulate: need at least one replication");
    std::vector<double> values(replications);
    auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            RngStream stream(seed, i);
            values[i] = per_rep(stream);
        }
    };
    if (threads <= 1) {
        fill(0, replications);
    } else {
        const std::uint64_t workers =
            std::min<std::uint64_t>(threads, replications);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::uint64_t chunk = (replications + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi = std::min(lo + chunk, replications);
            pool.emplace_back(fill, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    return detail::summarize(values);
}

namespace detail {

/// Work guard: refuses runs whose path enumeration cost is out of desk range
/// instead of silently burning hours.
inline void check_budget(const HopChain& chain, const SimConfig& cfg) {
    constexpr std::uint64_t kMaxSharedPaths = std::uint64_t{1} << 20;
    constexpr std::uint64_t kMaxPathWork = std::uint64_t{1} << 31;
    std::uint64_t paths = 0;
    try {
        paths = checked_path_count(chain.branch, chain.depth());
    } catch (const std::out_of_range&) {
        throw ResourceLimitError(
            "simulate: branching^depth overflows the path counter; reduce depth k");
    }
    if (cfg.mode == SimMode::shared_edges && paths > kMaxSharedPaths)
        throw ResourceLimitError(
            "simulate: shared-edge mode enumerates " + format_u64(paths) +
            " paths per replication (limit " + format_u64(kMaxSharedPaths) +
            "); reduce depth k");
    if (paths > kMaxPathWork / std::max<std::uint64_t>(cfg.replications, 1))
        throw ResourceLimitError(
            "simulate: " + format_u64(paths) + " paths x " +
            format_u64(cfg.replications) + " replications exceeds the work budget (" +
            format_u64(kMaxPathWork) + " path visits); reduce depth k or replications");
}

}  // namespace detail

inline SimResult simulate_path_count(const Scenario& scenario, const TreeSpec& tree,
                                     const DecayProfile& decay,
                                     const SeverityModel& severity,
                                     const SimConfig& cfg) {
    const HopChain chain = make_hop_chain(scenario, tree, decay, severity);
    detail::check_budget(chain, cfg);
    return run_replications(cfg.replications, cfg.seed, cfg.threads,
                            [&](RngStream& rng) {
                                return static_cast<double>(sample_path_count(
                                    chain, cfg.mode, cfg.hop_draw, severity, rng));
                            });
}

inline SimResult simulate_local_loss(const Scenario& scenario, const TreeSpec& tree,
                                     const DecayProfile& decay,
                                     const SeverityModel& severity,
                                     const SimConfig& cfg) {
    const HopChain chain = make_hop_chain(scenario, tree, decay, severity);
    detail::check_budget(chain, cfg);
    return run_replications(cfg.replications, cfg.seed, cfg.threads,
                            [&](RngStream& rng) {
                                return sample_local_loss(chain, cfg.mode, cfg.hop_draw,
                                                         severity, rng);
                            });
}

inline SimResult simulate_aggregate_loss(const Scenario& scenario, const TreeSpec& tree,
                                         const DecayProfile& decay,
                                         const SeverityModel& severity,
                                         const ArrivalProcess& arrivals,
                                         const SimConfig& cfg) {
    const HopChain chain = make_hop_chain(scenario, tree, decay, severity);
    detail::check_budget(chain, cfg);
    return run_replications(cfg.replications, cfg.seed, cfg.threads,
                            [&](RngStream& rng) {
                                return sample_aggregate_loss(chain, arrivals, cfg.mode,
                                                             cfg.hop_draw, severity, rng);
                            });
}

}  // namespace treeloss

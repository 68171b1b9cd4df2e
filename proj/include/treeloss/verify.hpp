#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "treeloss/contagion.hpp"
#include "treeloss/errors.hpp"
#include "treeloss/format.hpp"
#include "treeloss/moments.hpp"
#include "treeloss/quadrature.hpp"
#include "treeloss/rng.hpp"
#include "treeloss/severity.hpp"
#include "treeloss/simulate.hpp"

namespace treeloss {

/// Brute-force enumeration instance: a depth-k regular tree with branching
/// rho, hop success probability q_l at generation l (q_0 is the origin).
/// Feasible only while origin + edge states fit in 25 bits.
struct EdgeStateEnumeration {
    static constexpr std::uint64_t kMaxEdgeBits = 24;

    std::uint64_t branch = 1;
    std::vector<double> level_prob;  // q_0 .. q_k

    int depth() const { return static_cast<int>(level_prob.size()) - 1; }

    std::uint64_t edge_count() const {
        std::uint64_t edges = 0;
        std::uint64_t ring = 1;
        for (int l = 1; l <= depth(); ++l) {
            ring *= branch;
            edges += ring;
        }
        return edges;
    }

    std::uint64_t path_count() const {
        return detail::checked_path_count(branch, depth());
    }
};

inline EdgeStateEnumeration make_enumeration(std::uint64_t branch,
                                             std::vector<double> level_prob) {
    if (branch < 1)
        throw std::invalid_argument("enumeration: branching factor must be >= 1");
    if (level_prob.empty())
        throw std::invalid_argument("enumeration: need at least the origin probability");
    for (double q : level_prob)
        if (!(q >= 0.0) || !(q <= 1.0))
            throw std::invalid_argument("enumeration: probabilities must lie in [0,1]");
    EdgeStateEnumeration e{branch, std::move(level_prob)};
    std::uint64_t edges = 0;
    std::uint64_t ring = 1;
    for (int l = 1; l <= e.depth(); ++l) {
        if (ring > EdgeStateEnumeration::kMaxEdgeBits / branch + 1)
            throw ResourceLimitError("enumeration: more than 24 edge states");
        ring *= branch;
        edges += ring;
        if (edges > EdgeStateEnumeration::kMaxEdgeBits)
            throw ResourceLimitError(
                "enumeration: " + format_u64(edges) +
                " edge states exceed the 24-bit enumeration cap; shrink rho or k");
    }
    return e;
}

/// Exact pmf of the reached-path count by summing over every joint state of
/// the origin and all edges. In independent mode this reduces to the
/// Binomial(rho^k, prod q_l) law; in shared mode overlapping paths reuse one
/// outcome per edge, which fattens the tails.
inline std::vector<double> exact_path_count_pmf(const EdgeStateEnumeration& e,
                                                SimMode mode) {
    const std::uint64_t paths = e.path_count();
    const int k = e.depth();
    std::vector<double> pmf(paths + 1, 0.0);

    if (mode == SimMode::independent_paths) {
        double p = 1.0;
        for (double q : e.level_prob) p *= q;
        const PathCountLaw law{paths, p};
        for (std::uint64_t n = 0; n <= paths; ++n) pmf[n] = path_count_pmf(law, n);
        return pmf;
    }

    const std::uint64_t edges = e.edge_count();
    const int bits = static_cast<int>(edges) + 1;  // bit 0 is the origin

    // Success probability of each state bit; edges are laid out level-major.
    std::vector<double> bit_prob(static_cast<std::size_t>(bits));
    bit_prob[0] = e.level_prob[0];
    {
        std::size_t bit = 1;
        std::uint64_t ring = 1;
        for (int l = 1; l <= k; ++l) {
            ring *= e.branch;
            for (std::uint64_t i = 0; i < ring; ++i)
                bit_prob[bit++] = e.level_prob[static_cast<std::size_t>(l)];
        }
    }

    // Edge bits along the root-to-leaf chain of each leaf: the ancestor of
    // leaf j at generation l is node j / branch^(k-l) within its ring.
    std::vector<std::uint32_t> chain_bits(paths * static_cast<std::uint64_t>(k));
    {
        std::vector<std::uint64_t> ring_offset(static_cast<std::size_t>(k) + 1, 0);
        std::uint64_t acc = 0;
        std::uint64_t ring = 1;
        for (int l = 1; l <= k; ++l) {
            ring_offset[static_cast<std::size_t>(l)] = acc;
            ring *= e.branch;
            acc += ring;
        }
        for (std::uint64_t j = 0; j < paths; ++j) {
            std::uint64_t shrink = 1;
            for (int l = k; l >= 1; --l) {
                const std::uint64_t ancestor = j / shrink;
                chain_bits[j * static_cast<std::uint64_t>(k) +
                           static_cast<std::uint64_t>(l - 1)] =
                    static_cast<std::uint32_t>(
                        1 + ring_offset[static_cast<std::size_t>(l)] + ancestor);
                shrink *= e.branch;
            }
        }
    }

    const std::uint64_t states = std::uint64_t{1} << bits;
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        double prob = 1.0;
        for (int b = 0; b < bits; ++b) {
            const double q = bit_prob[static_cast<std::size_t>(b)];
            prob *= (mask >> b) & 1 ? q : 1.0 - q;
            if (prob == 0.0) break;
        }
        if (prob == 0.0) continue;
        std::uint64_t count = 0;
        if (mask & 1) {
            for (std::uint64_t j = 0; j < paths; ++j) {
                bool open = true;
                for (int l = 0; l < k; ++l) {
                    const std::uint32_t bit =
                        chain_bits[j * static_cast<std::uint64_t>(k) +
                                   static_cast<std::uint64_t>(l)];
                    if (!((mask >> bit) & 1)) {
                        open = false;
                        break;
                    }
                }
                count += open ? 1 : 0;
            }
        }
        pmf[count] += prob;
    }
    return pmf;
}

inline MomentPair pmf_moments(std::span<const double> pmf) {
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
        const double nd = static_cast<double>(n);
        mean += nd * pmf[n];
        second += nd * nd * pmf[n];
    }
    return MomentPair{mean, second - mean * mean};
}

/// Total variation distance between a pmf and an empirical histogram.
inline double total_variation(std::span<const double> pmf,
                              std::span<const double> empirical) {
    if (pmf.size() != empirical.size())
        throw std::invalid_argument("total_variation: length mismatch");
    double tv = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) tv += std::fabs(pmf[i] - empirical[i]);
    return 0.5 * tv;
}

/// How sibling edges are wired in the dependence audit below.
///   independent: every edge draws its own outcome (the model's assumption).
///   comonotone:  both edges under one parent share a single outcome --
///                a deliberately broken control that must fail the audit.
enum class SiblingCoupling { independent, comonotone };

struct FactorizationReport {
    /// max over parent/child states of |P(c1,c2,v)P(v) - P(c1,v)P(c2,v)|.
    double conditional_independence_residual = 0.0;
    /// max over joint states of |P(state) - P(root) prod P(child | parent)|.
    double factorization_residual = 0.0;
    bool pass = false;
};

/// Audits the depth-2 binary subtree (root, its 2 children, their 4 children)
/// by exhaustive enumeration: sibling subtrees must be conditionally
/// independent given the parent, and the 7-node joint law must factor into
/// per-edge conditionals. Both residuals sit at rounding error when edges are
/// independent; the comonotone control breaks them by construction.
inline FactorizationReport factorization_check(double q0, double q1, double q2,
                                               SiblingCoupling coupling,
                                               double tolerance = 1e-12) {
    for (double q : {q0, q1, q2})
        if (!(q >= 0.0) || !(q <= 1.0))
            throw std::invalid_argument("factorization: probabilities must lie in [0,1]");

    // Node state bits: 0=root, 1..2=children, 3..6=grandchildren (3,4 under
    // child 1; 5,6 under child 2).
    std::array<double, 128> joint{};
    const auto deposit = [&joint](bool o, bool e1, bool e2, bool e11, bool e12, bool e21,
                                  bool e22, double prob) {
        const bool v0 = o;
        const bool v1 = v0 && e1;
        const bool v2 = v0 && e2;
        const bool v3 = v1 && e11;
        const bool v4 = v1 && e12;
        const bool v5 = v2 && e21;
        const bool v6 = v2 && e22;
        const std::size_t state = static_cast<std::size_t>(v0) |
                                  static_cast<std::size_t>(v1) << 1 |
                                  static_cast<std::size_t>(v2) << 2 |
                                  static_cast<std::size_t>(v3) << 3 |
                                  static_cast<std::size_t>(v4) << 4 |
                                  static_cast<std::size_t>(v5) << 5 |
                                  static_cast<std::size_t>(v6) << 6;
        joint[state] += prob;
    };

    const auto mass = [](bool on, double q) { return on ? q : 1.0 - q; };
    if (coupling == SiblingCoupling::independent) {
        for (std::uint32_t m = 0; m < 128; ++m) {
            const bool o = m & 1, e1 = m & 2, e2 = m & 4, e11 = m & 8, e12 = m & 16,
                       e21 = m & 32, e22 = m & 64;
            const double prob = mass(o, q0) * mass(e1, q1) * mass(e2, q1) *
                                mass(e11, q2) * mass(e12, q2) * mass(e21, q2) *
                                mass(e22, q2);
            deposit(o, e1, e2, e11, e12, e21, e22, prob);
        }
    } else {
        // One shared draw per sibling pair: e1 = e2, e11 = e12, e21 = e22.
        for (std::uint32_t m = 0; m < 16; ++m) {
            const bool o = m & 1, pair_root = m & 2, pair_c1 = m & 4, pair_c2 = m & 8;
            const double prob =
                mass(o, q0) * mass(pair_root, q1) * mass(pair_c1, q2) * mass(pair_c2, q2);
            deposit(o, pair_root, pair_root, pair_c1, pair_c1, pair_c2, pair_c2, prob);
        }
    }

    const auto bit = [](std::size_t state, int node) { return (state >> node) & 1; };
    const auto marginal1 = [&](int node, std::size_t value) {
        double p = 0.0;
        for (std::size_t s = 0; s < 128; ++s)
            if (bit(s, node) == value) p += joint[s];
        return p;
    };
    const auto marginal2 = [&](int a, std::size_t va, int b, std::size_t vb) {
        double p = 0.0;
        for (std::size_t s = 0; s < 128; ++s)
            if (bit(s, a) == va && bit(s, b) == vb) p += joint[s];
        return p;
    };
    const auto marginal3 = [&](int a, std::size_t va, int b, std::size_t vb, int c,
                               std::size_t vc) {
        double p = 0.0;
        for (std::size_t s = 0; s < 128; ++s)
            if (bit(s, a) == va && bit(s, b) == vb && bit(s, c) == vc) p += joint[s];
        return p;
    };

    FactorizationReport report;

    // (a) Sibling conditional independence given the parent, in the
    // multiplied-through form that avoids dividing by P(parent).
    constexpr int families[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 5, 6}};
    for (const auto& fam : families) {
        const int parent = fam[0], c1 = fam[1], c2 = fam[2];
        for (std::size_t v = 0; v < 2; ++v)
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) {
                    const double lhs = marginal3(c1, a, c2, b, parent, v) *
                                       marginal1(parent, v);
                    const double rhs = marginal2(c1, a, parent, v) *
                                       marginal2(c2, b, parent, v);
                    report.conditional_independence_residual = std::max(
                        report.conditional_independence_residual, std::fabs(lhs - rhs));
                }
    }

    // (b) The joint law versus the root marginal times per-edge conditionals.
    constexpr int parent_of[7] = {-1, 0, 0, 1, 1, 2, 2};
    const auto conditional = [&](int child, std::size_t a, int parent, std::size_t v) {
        const double pv = marginal1(parent, v);
        return pv > 0.0 ? marginal2(child, a, parent, v) / pv : 0.0;
    };
    for (std::size_t s = 0; s < 128; ++s) {
        double product = marginal1(0, bit(s, 0));
        for (int node = 1; node < 7; ++node)
            product *= conditional(node, bit(s, node), parent_of[node],
                                   bit(s, parent_of[node]));
        report.factorization_residual =
            std::max(report.factorization_residual, std::fabs(joint[s] - product));
    }

    report.pass = report.conditional_independence_residual < tolerance &&
                  report.factorization_residual < tolerance;
    return report;
}

/// E[U_0^(k)] averaged over random scaled-uniform security profiles,
/// c_l = scale * U_l with independent U_l ~ U(0,1). Layer draws are
/// independent, so the average factors into one-dimensional integrals:
///   rho^k prod_{l=0..k} int_0^1 S_X(scale u / beta_l) du,
/// each evaluated by adaptive quadrature.
inline double expected_count_over_profiles(double scale, std::uint64_t branch, int k,
                                           const SeverityModel& severity,
                                           const DecayProfile& decay,
                                           double tol = 1e-9) {
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
    if (k < 0) throw std::invalid_argument("depth must be >= 0");
    double product = 1.0;
    for (int l = 0; l <= k; ++l) {
        const double beta = decay.beta(l);
        product *= integrate(
            [&](double u) { return severity.survival(scale * u / beta); }, 0.0, 1.0, tol);
    }
    return static_cast<double>(detail::checked_path_count(branch, k)) * product;
}

struct ProfileAverage {
    double mean = 0.0;
    double se = 0.0;
};

/// Monte Carlo cross-check of expected_count_over_profiles: draws whole
/// profiles, evaluates rho^k P exactly on each, and averages.
inline ProfileAverage averaged_count_over_profiles(double scale, std::uint64_t branch,
                                                   int k, const SeverityModel& severity,
                                                   const DecayProfile& decay,
                                                   std::uint64_t profile_draws,
                                                   std::uint64_t seed) {
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
    if (k < 0) throw std::invalid_argument("depth must be >= 0");
    if (profile_draws < 2)
        throw std::invalid_argument("need at least two profile draws");
    const double paths = static_cast<double>(detail::checked_path_count(branch, k));
    std::vector<double> values(profile_draws);
    for (std::uint64_t i = 0; i < profile_draws; ++i) {
        RngStream stream(seed, i);
        double p = 1.0;
        for (int l = 0; l <= k; ++l)
            p *= severity.survival(scale * stream.uniform_open01() / decay.beta(l));
        values[i] = paths * p;
    }
    const SimResult summary = detail::summarize(values);
    return ProfileAverage{summary.mean, summary.se};
}

}  // namespace treeloss

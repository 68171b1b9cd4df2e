#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "treeloss/config.hpp"
#include "treeloss/contagion.hpp"
#include "treeloss/csv.hpp"
#include "treeloss/loss.hpp"
#include "treeloss/network.hpp"
#include "treeloss/rng.hpp"
#include "treeloss/simulate.hpp"

namespace treeloss {

struct OutputOptions {
    int sig_digits = 6;    // 0 = full round-trip precision
    unsigned threads = 1;  // simulate wall time only; never changes the bytes
};

namespace detail {

/// Stable seed derivation for one simulated quantity of one sweep cell, so
/// cells draw from disjoint streams while staying a pure function of the
/// config seed and the cell's position.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = mix64(base ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t t : tags) h = mix64(h + 0x9e3779b97f4a7c15ULL * (t + 1));
    return h;
}

inline std::vector<TreeSpec> build_trees(const RunConfig& cfg) {
    std::vector<TreeSpec> trees;
    trees.reserve(cfg.profiles.size());
    for (const ProfileSpec& spec : cfg.profiles)
        trees.emplace_back(cfg.rho, SecurityProfile(spec, cfg.radius));
    return trees;
}

inline const char* kSkipNote = "skipped: r + k exceeds radius";

}  // namespace detail

/// `prob`: closed-form path contagion probability per cell.
inline void write_prob_csv(const RunConfig& cfg, std::ostream& out,
                           const OutputOptions& opts = {}) {
    validate_config(cfg);
    CsvWriter csv(out, opts.sig_digits);
    csv.row({"severity", "profile", "r", "k", "prob", "log_prob", "note"});
    const auto trees = detail::build_trees(cfg);
    for (const SeverityModel& severity : cfg.severities)
        for (std::size_t pi = 0; pi < cfg.profiles.size(); ++pi)
            for (int r : cfg.origins)
                for (int k : cfg.depths) {
                    const std::string sev = severity.canonical();
                    const std::string prof = cfg.profiles[pi].canonical();
                    if (r + k > cfg.radius) {
                        csv.row({sev, prof, format_int(r), format_int(k), "", "",
                                 detail::kSkipNote});
                        continue;
                    }
                    const PathProbability p = path_contagion_prob(
                        Scenario(r, k), trees[pi], cfg.decay, severity);
                    // log of an exactly-zero probability has no finite
                    // representation; leave the cell empty.
                    csv.row({sev, prof, format_int(r), format_int(k), csv.num(p.value),
                             p.value > 0.0 ? csv.num(p.log_value) : "", ""});
                }
}

/// `moments`: closed-form moments of Z, U, S and L per cell.
inline void write_moments_csv(const RunConfig& cfg, std::ostream& out,
                              const OutputOptions& opts = {}) {
    validate_config(cfg);
    CsvWriter csv(out, opts.sig_digits);
    csv.row({"severity", "profile", "r", "k", "prob", "z_mean", "z_var", "u_mean",
             "u_var", "s_mean", "s_var", "l_mean", "l_var", "note"});
    const auto trees = detail::build_trees(cfg);
    const ArrivalProcess arrivals(cfg.intensity, cfg.horizon);
    for (const SeverityModel& severity : cfg.severities)
        for (std::size_t pi = 0; pi < cfg.profiles.size(); ++pi)
            for (int r : cfg.origins)
                for (int k : cfg.depths) {
                    const std::string sev = severity.canonical();
                    const std::string prof = cfg.profiles[pi].canonical();
                    if (r + k > cfg.radius) {
                        csv.row({sev, prof, format_int(r), format_int(k), "", "", "", "",
                                 "", "", "", "", "", detail::kSkipNote});
                        continue;
                    }
                    const Scenario scenario(r, k);
                    const TreeSpec& tree = trees[pi];
                    const PathCountLaw law =
                        path_count_law(scenario, tree, cfg.decay, severity);
                    const MomentPair z =
                        path_loss_moments(scenario, tree, cfg.decay, severity);
                    const MomentPair u = path_count_moments(law);
                    const MomentPair s =
                        local_loss_moments(scenario, tree, cfg.decay, severity);
                    const MomentPair l = aggregate_loss_moments(scenario, tree, cfg.decay,
                                                                severity, arrivals);
                    csv.row({sev, prof, format_int(r), format_int(k), csv.num(law.success),
                             csv.num(z.mean), csv.num(z.variance), csv.num(u.mean),
                             csv.num(u.variance), csv.num(s.mean), csv.num(s.variance),
                             csv.num(l.mean), csv.num(l.variance), ""});
                }
}

/// `price`: premium per cell under each configured principle.
inline void write_price_csv(const RunConfig& cfg, std::ostream& out,
                            const OutputOptions& opts = {}) {
    validate_config(cfg);
    CsvWriter csv(out, opts.sig_digits);
    csv.row({"k", "r", "principle", "severity", "profile", "profile_seed", "premium",
             "note"});
    const auto trees = detail::build_trees(cfg);
    const ArrivalProcess arrivals(cfg.intensity, cfg.horizon);
    for (const SeverityModel& severity : cfg.severities)
        for (PremiumPrinciple principle : cfg.principles)
            for (std::size_t pi = 0; pi < cfg.profiles.size(); ++pi)
                for (int r : cfg.origins)
                    for (int k : cfg.depths) {
                        const ProfileSpec& spec = cfg.profiles[pi];
                        const std::string seed_label =
                            spec.kind == ProfileKind::scaled_uniform
                                ? format_u64(spec.seed)
                                : "";
                        if (r + k > cfg.radius) {
                            csv.row({format_int(k), format_int(r),
                                     principle_name(principle), severity.canonical(),
                                     spec.canonical(), seed_label, "",
                                     detail::kSkipNote});
                            continue;
                        }
                        const MomentPair l = aggregate_loss_moments(
                            Scenario(r, k), trees[pi], cfg.decay, severity, arrivals);
                        const PremiumQuote quote = premium(l, principle, cfg.delta);
                        csv.row({format_int(k), format_int(r), principle_name(principle),
                                 severity.canonical(), spec.canonical(), seed_label,
                                 csv.num(quote.amount), ""});
                    }
}

/// `simulate`: empirical vs closed-form mean for U, S and L per cell.
inline void write_simulate_csv(const RunConfig& cfg, std::ostream& out,
                               const OutputOptions& opts = {}) {
    validate_config(cfg);
    CsvWriter csv(out, opts.sig_digits);
    csv.row({"severity", "profile", "r", "k", "quantity", "mode", "reps", "emp_mean",
             "emp_var", "se", "closed_mean", "closed_var", "z", "note"});
    const auto trees = detail::build_trees(cfg);
    const ArrivalProcess arrivals(cfg.intensity, cfg.horizon);
    const char* mode_label =
        cfg.mode == SimMode::independent_paths ? "independent" : "shared";
    for (std::size_t si = 0; si < cfg.severities.size(); ++si)
        for (std::size_t pi = 0; pi < cfg.profiles.size(); ++pi)
            for (int r : cfg.origins)
                for (int k : cfg.depths) {
                    const SeverityModel& severity = cfg.severities[si];
                    const std::string sev = severity.canonical();
                    const std::string prof = cfg.profiles[pi].canonical();
                    if (r + k > cfg.radius) {
                        for (const char* quantity : {"U", "S", "L"})
                            csv.row({sev, prof, format_int(r), format_int(k), quantity,
                                     mode_label, format_u64(cfg.replications), "", "", "",
                                     "", "", "", detail::kSkipNote});
                        continue;
                    }
                    const Scenario scenario(r, k);
                    const TreeSpec& tree = trees[pi];
                    const MomentPair closed[3] = {
                        path_count_moments(path_count_law(scenario, tree, cfg.decay,
                                                          severity)),
                        local_loss_moments(scenario, tree, cfg.decay, severity),
                        aggregate_loss_moments(scenario, tree, cfg.decay, severity,
                                               arrivals)};
                    for (std::size_t qi = 0; qi < 3; ++qi) {
                        SimConfig sim;
                        sim.replications = cfg.replications;
                        sim.mode = cfg.mode;
                        sim.threads = opts.threads;
                        sim.seed = detail::derive_seed(
                            cfg.seed, {qi, si, pi, static_cast<std::uint64_t>(r),
                                       static_cast<std::uint64_t>(k)});
                        const SimResult res =
                            qi == 0 ? simulate_path_count(scenario, tree, cfg.decay,
                                                          severity, sim)
                            : qi == 1
                                ? simulate_local_loss(scenario, tree, cfg.decay, severity,
                                                      sim)
                                : simulate_aggregate_loss(scenario, tree, cfg.decay,
                                                          severity, arrivals, sim);
                        const double diff = res.mean - closed[qi].mean;
                        const char* quantity = qi == 0 ? "U" : qi == 1 ? "S" : "L";
                        csv.row({sev, prof, format_int(r), format_int(k), quantity,
                                 mode_label, format_u64(res.replications),
                                 csv.num(res.mean), csv.num(res.variance),
                                 csv.num(res.se), csv.num(closed[qi].mean),
                                 csv.num(closed[qi].variance),
                                 diff == 0.0 ? csv.num(0.0)
                                 : res.se > 0.0 ? csv.num(diff / res.se)
                                                : "",
                                 ""});
                    }
                }
}

/// `sweep`: the full closed-form grid with premiums, one row per
/// (severity, principle, profile, r, k) cell.
inline void write_sweep_csv(const RunConfig& cfg, std::ostream& out,
                            const OutputOptions& opts = {}) {
    validate_config(cfg);
    CsvWriter csv(out, opts.sig_digits);
    csv.row({"severity", "principle", "profile", "r", "k", "prob", "u_mean", "u_var",
             "s_mean", "s_var", "l_mean", "l_var", "premium", "note"});
    const auto trees = detail::build_trees(cfg);
    const ArrivalProcess arrivals(cfg.intensity, cfg.horizon);
    for (const SeverityModel& severity : cfg.severities)
        for (PremiumPrinciple principle : cfg.principles)
            for (std::size_t pi = 0; pi < cfg.profiles.size(); ++pi)
                for (int r : cfg.origins)
                    for (int k : cfg.depths) {
                        const std::string sev = severity.canonical();
                        const std::string prof = cfg.profiles[pi].canonical();
                        if (r + k > cfg.radius) {
                            csv.row({sev, principle_name(principle), prof, format_int(r),
                                     format_int(k), "", "", "", "", "", "", "", "",
                                     detail::kSkipNote});
                            continue;
                        }
                        const Scenario scenario(r, k);
                        const TreeSpec& tree = trees[pi];
                        const PathCountLaw law =
                            path_count_law(scenario, tree, cfg.decay, severity);
                        const MomentPair u = path_count_moments(law);
                        const MomentPair s =
                            local_loss_moments(scenario, tree, cfg.decay, severity);
                        const MomentPair l = aggregate_loss_moments(
                            scenario, tree, cfg.decay, severity, arrivals);
                        const PremiumQuote quote = premium(l, principle, cfg.delta);
                        csv.row({sev, principle_name(principle), prof, format_int(r),
                                 format_int(k), csv.num(law.success), csv.num(u.mean),
                                 csv.num(u.variance), csv.num(s.mean), csv.num(s.variance),
                                 csv.num(l.mean), csv.num(l.variance),
                                 csv.num(quote.amount), ""});
                    }
}

/// `figures`: the two plotted series, probability-vs-k and expected local
/// loss-vs-k, one file each.
inline void write_figures_csv(const RunConfig& cfg, std::ostream& prob_out,
                              std::ostream& loss_out, const OutputOptions& opts = {}) {
    validate_config(cfg);
    CsvWriter prob_csv(prob_out, opts.sig_digits);
    CsvWriter loss_csv(loss_out, opts.sig_digits);
    prob_csv.row({"severity", "profile", "r", "k", "prob", "note"});
    loss_csv.row({"severity", "profile", "r", "k", "s_mean", "note"});
    const auto trees = detail::build_trees(cfg);
    for (const SeverityModel& severity : cfg.severities)
        for (std::size_t pi = 0; pi < cfg.profiles.size(); ++pi)
            for (int r : cfg.origins)
                for (int k : cfg.depths) {
                    const std::string sev = severity.canonical();
                    const std::string prof = cfg.profiles[pi].canonical();
                    if (r + k > cfg.radius) {
                        prob_csv.row({sev, prof, format_int(r), format_int(k), "",
                                      detail::kSkipNote});
                        loss_csv.row({sev, prof, format_int(r), format_int(k), "",
                                      detail::kSkipNote});
                        continue;
                    }
                    const Scenario scenario(r, k);
                    const PathProbability p =
                        path_contagion_prob(scenario, trees[pi], cfg.decay, severity);
                    const MomentPair s =
                        local_loss_moments(scenario, trees[pi], cfg.decay, severity);
                    prob_csv.row({sev, prof, format_int(r), format_int(k),
                                  prob_csv.num(p.value), ""});
                    loss_csv.row({sev, prof, format_int(r), format_int(k),
                                  loss_csv.num(s.mean), ""});
                }
}

}  // namespace treeloss

// Command-line front end: closed-form tables, premiums, Monte Carlo runs and
// the self-verification battery, all driven by one config file.
//
// Exit codes: 0 success, 1 verification/internal failure, 2 config error,
// 3 resource limit exceeded.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "treeloss/config.hpp"
#include "treeloss/contagion.hpp"
#include "treeloss/errors.hpp"
#include "treeloss/format.hpp"
#include "treeloss/loss.hpp"
#include "treeloss/network.hpp"
#include "treeloss/severity.hpp"
#include "treeloss/simulate.hpp"
#include "treeloss/sweep.hpp"
#include "treeloss/verify.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<std::string> mode;
    unsigned threads = 1;
    bool full_precision = false;
};

void add_common_options(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path,
                    "Config file; built-in defaults when omitted")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_path, "Output file (stdout when omitted)");
    sub->add_option("--seed", opts.seed, "Override the config seed");
    sub->add_option("--reps", opts.reps, "Override the replication count");
    sub->add_option("--mode", opts.mode, "Override the simulation mode")
        ->check(CLI::IsMember({"independent", "shared"}));
    sub->add_option("--threads", opts.threads, "Worker threads (timing only)")
        ->check(CLI::Range(1u, 256u));
    sub->add_flag("--full-precision", opts.full_precision,
                  "Emit full round-trip precision instead of 6 significant digits");
}

treeloss::RunConfig make_config(const CommonOpts& opts) {
    treeloss::RunConfig cfg = opts.config_path.empty()
                                  ? treeloss::RunConfig{}
                                  : treeloss::load_config_file(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.reps) cfg.replications = *opts.reps;
    if (opts.mode)
        cfg.mode = *opts.mode == "shared" ? treeloss::SimMode::shared_edges
                                          : treeloss::SimMode::independent_paths;
    treeloss::validate_config(cfg);
    return cfg;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw treeloss::ConfigError(path + ": cannot open output file for writing");
    out << content;
    if (!out) throw treeloss::ConfigError(path + ": write failed");
}

/// Self-verification battery: exact small-tree enumerations, the dependence
/// audit with its deliberately broken control, and the quadrature identity,
/// each checked against an independently computed answer.
int run_verify(const CommonOpts& opts, std::ostream& out) {
    using namespace treeloss;
    const std::uint64_t seed = opts.seed.value_or(42);
    const std::uint64_t reps = opts.reps.value_or(100000);
    bool all_ok = true;
    const auto check = [&](bool ok, const std::string& label, const std::string& detail) {
        out << (ok ? "[ok] " : "[FAIL] ") << label << ": " << detail << "\n";
        all_ok = all_ok && ok;
    };

    // Exact enumeration on the depth-2 binary tree with certain origin and
    // fair edges: both modes have mean 1; sharing fattens the variance to 1
    // while independent paths give the binomial 0.75.
    {
        const auto enumeration = make_enumeration(2, {1.0, 0.5, 0.5});
        const auto shared = pmf_moments(exact_path_count_pmf(enumeration, SimMode::shared_edges));
        const auto indep =
            pmf_moments(exact_path_count_pmf(enumeration, SimMode::independent_paths));
        check(std::fabs(shared.mean - 1.0) < 1e-12 &&
                  std::fabs(shared.variance - 1.0) < 1e-12 &&
                  std::fabs(indep.mean - 1.0) < 1e-12 &&
                  std::fabs(indep.variance - 0.75) < 1e-12,
              "exact pmf, binary depth-2 tree",
              "shared mean " + format_double(shared.mean, 6) + " var " +
                  format_double(shared.variance, 6) + ", independent var " +
                  format_double(indep.variance, 6));
    }

    // Mode-agnostic means on seeded random hop probabilities.
    {
        double worst = 0.0;
        RngStream stream(seed, 1);
        for (int trial = 0; trial < 5; ++trial) {
            const auto enumeration = make_enumeration(
                2, {stream.uniform_open01(), stream.uniform_open01(),
                    stream.uniform_open01()});
            const auto shared =
                pmf_moments(exact_path_count_pmf(enumeration, SimMode::shared_edges));
            const auto indep = pmf_moments(
                exact_path_count_pmf(enumeration, SimMode::independent_paths));
            worst = std::max(worst, std::fabs(shared.mean - indep.mean));
        }
        check(worst < 1e-12, "mode-agnostic mean, 5 random draws",
              "max |shared - independent| = " + format_double(worst, 3));
    }

    // Monte Carlo histogram against the exact shared-mode pmf.
    {
        const auto enumeration = make_enumeration(2, {1.0, 0.5, 0.5});
        const auto exact = exact_path_count_pmf(enumeration, SimMode::shared_edges);
        HopChain chain;
        chain.branch = 2;
        chain.hop_prob = enumeration.level_prob;
        std::vector<double> hist(exact.size(), 0.0);
        const SeverityModel severity = SeverityModel::make_gamma(5, 1);
        for (std::uint64_t i = 0; i < reps; ++i) {
            RngStream stream(seed, i);
            hist[sample_path_count(chain, SimMode::shared_edges, HopDraw::bernoulli,
                                   severity, stream)] += 1.0;
        }
        for (double& h : hist) h /= static_cast<double>(reps);
        const double tv = total_variation(exact, hist);
        check(tv < 0.02, "Monte Carlo vs exact shared pmf",
              "total variation " + format_double(tv, 3) + " at " + format_u64(reps) +
                  " replications");
    }

    // Dependence audit: independent edges must factorize, comonotone sibling
    // edges must not.
    {
        const auto good =
            factorization_check(0.9, 0.3, 0.7, SiblingCoupling::independent);
        const auto broken =
            factorization_check(0.9, 0.3, 0.7, SiblingCoupling::comonotone);
        check(good.pass, "factorization audit (independent edges)",
              "residuals " + format_double(good.conditional_independence_residual, 3) +
                  " / " + format_double(good.factorization_residual, 3));
        check(!broken.pass, "factorization audit (comonotone control)",
              "residuals " + format_double(broken.conditional_independence_residual, 3) +
                  " / " + format_double(broken.factorization_residual, 3) +
                  " exceed tolerance as they should");
    }

    // Profile-averaged expected count: product-of-integrals identity vs a
    // direct Monte Carlo average over whole profiles.
    {
        const SeverityModel severity = SeverityModel::make_gamma(5, 1);
        const DecayProfile decay = DecayProfile::geometric(0.95);
        const double quad = expected_count_over_profiles(2.0, 2, 1, severity, decay);
        const auto mc =
            averaged_count_over_profiles(2.0, 2, 1, severity, decay, reps, seed);
        const double err = std::fabs(quad - mc.mean);
        check(err <= 4.0 * mc.se, "profile-averaged expected count",
              "quadrature " + format_double(quad, 6) + " vs Monte Carlo " +
                  format_double(mc.mean, 6) + " (|err| = " + format_double(err, 3) +
                  ", 4se = " + format_double(4.0 * mc.se, 3) + ")");
    }

    out << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    return all_ok ? 0 : 1;
}

int dispatch(const std::string& command, const CommonOpts& opts) {
    using namespace treeloss;
    const OutputOptions output_opts{opts.full_precision ? 0 : 6, opts.threads};
    std::ostringstream buffer;

    if (command == "verify") {
        const int rc = run_verify(opts, buffer);
        write_output(opts.out_path, buffer.str());
        return rc;
    }
    if (command == "figures") {
        if (opts.out_path.empty())
            throw ConfigError(
                "figures writes two files and needs --out as a filename prefix");
        const RunConfig cfg = make_config(opts);
        std::ostringstream prob_buffer, loss_buffer;
        write_figures_csv(cfg, prob_buffer, loss_buffer, output_opts);
        write_output(opts.out_path + "_prob.csv", prob_buffer.str());
        write_output(opts.out_path + "_local_loss.csv", loss_buffer.str());
        return 0;
    }

    const RunConfig cfg = make_config(opts);
    if (command == "prob") write_prob_csv(cfg, buffer, output_opts);
    else if (command == "moments") write_moments_csv(cfg, buffer, output_opts);
    else if (command == "price") write_price_csv(cfg, buffer, output_opts);
    else if (command == "simulate") write_simulate_csv(cfg, buffer, output_opts);
    else if (command == "sweep") write_sweep_csv(cfg, buffer, output_opts);
    else throw std::logic_error("unhandled command " + command);
    write_output(opts.out_path, buffer.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-based contagion losses and premiums on regular trees"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
    };
    constexpr Command kCommands[] = {
        {"prob", "Closed-form path contagion probabilities"},
        {"moments", "Closed-form moments of the path count and losses"},
        {"price", "Premiums under the configured principles"},
        {"simulate", "Monte Carlo estimates against the closed forms"},
        {"sweep", "Full closed-form grid with premiums"},
        {"figures", "Probability and local-loss series for plotting"},
        {"verify", "Run the self-verification battery"},
    };

    std::vector<CommonOpts> opts(std::size(kCommands));
    for (std::size_t i = 0; i < std::size(kCommands); ++i)
        add_common_options(app.add_subcommand(kCommands[i].name, kCommands[i].help),
                           opts[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad flags are config errors
    }

    try {
        for (std::size_t i = 0; i < std::size(kCommands); ++i)
            if (app.get_subcommand(kCommands[i].name)->parsed())
                return dispatch(kCommands[i].name, opts[i]);
        return 2;
    } catch (const treeloss::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const treeloss::ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

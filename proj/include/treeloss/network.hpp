#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treeloss/format.hpp"
#include "treeloss/rng.hpp"

namespace treeloss {

/// Attenuation of attack strength per hop: beta_l multiplies the original
/// severity after l generations. beta_0 is always 1 and levels never amplify.
class DecayProfile {
public:
    enum class Kind { geometric, explicit_levels };

    /// beta_l = base^l with base in (0, 1].
    static DecayProfile geometric(double base) {
        if (!(base > 0.0) || !(base <= 1.0))
            throw std::invalid_argument("decay geometric: base must be in (0,1]");
        DecayProfile p;
        p.kind_ = Kind::geometric;
        p.base_ = base;
        return p;
    }

    static DecayProfile from_levels(std::vector<double> levels) {
        if (levels.empty() || levels.front() != 1.0)
            throw std::invalid_argument("decay explicit: levels must start at beta_0 = 1");
        for (double b : levels)
            if (!(b > 0.0) || !(b <= 1.0))
                throw std::invalid_argument("decay explicit: levels must be in (0,1]");
        DecayProfile p;
        p.kind_ = Kind::explicit_levels;
        p.levels_ = std::move(levels);
        return p;
    }

    double beta(int level) const {
        if (level < 0) throw std::out_of_range("decay: level must be >= 0");
        if (kind_ == Kind::geometric) return std::pow(base_, level);
        if (static_cast<std::size_t>(level) >= levels_.size())
            throw std::out_of_range("decay: level beyond the explicit profile");
        return levels_[static_cast<std::size_t>(level)];
    }

    Kind kind() const { return kind_; }
    double base() const { return base_; }
    const std::vector<double>& levels() const { return levels_; }

    std::string canonical() const {
        if (kind_ == Kind::geometric) return "geometric(" + format_double(base_) + ")";
        std::string out = "explicit(";
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            if (i > 0) out += ",";
            out += format_double(levels_[i]);
        }
        return out + ")";
    }

    bool operator==(const DecayProfile&) const = default;

private:
    DecayProfile() = default;

    Kind kind_ = Kind::geometric;
    double base_ = 1.0;
    std::vector<double> levels_;
};

enum class ProfileKind { explicit_levels, scaled_uniform, geometric };

/// Recipe for a security-cost profile c_0..c_R. Kept separate from the
/// materialized profile so a config can be replayed at any radius and so the
/// provenance (including the seed of a sampled profile) survives into output.
struct ProfileSpec {
    ProfileKind kind = ProfileKind::geometric;
    double scale = 0.0;          // scaled_uniform: c_r = scale * U_r, U_r ~ U(0,1)
    std::uint64_t seed = 0;      // scaled_uniform draw seed
    double base = 0.0;           // geometric: c_r = base * ratio^r
    double ratio = 0.0;          // geometric
    std::vector<double> levels;  // explicit_levels

    static ProfileSpec scaled_uniform(double scale, std::uint64_t seed) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("profile uniform: scale must be positive");
        ProfileSpec s;
        s.kind = ProfileKind::scaled_uniform;
        s.scale = scale;
        s.seed = seed;
        return s;
    }

    static ProfileSpec geometric(double base, double ratio) {
        if (!(base > 0.0) || !std::isfinite(base))
            throw std::invalid_argument("profile geometric: base must be positive");
        if (!(ratio > 0.0) || !std::isfinite(ratio))
            throw std::invalid_argument("profile geometric: ratio must be positive");
        ProfileSpec s;
        s.kind = ProfileKind::geometric;
        s.base = base;
        s.ratio = ratio;
        return s;
    }

    static ProfileSpec constant(double value) { return geometric(value, 1.0); }

    static ProfileSpec explicit_levels(std::vector<double> levels) {
        if (levels.empty())
            throw std::invalid_argument("profile explicit: needs at least one level");
        for (double c : levels)
            if (!(c > 0.0) || !std::isfinite(c))
                throw std::invalid_argument("profile explicit: levels must be positive");
        ProfileSpec s;
        s.kind = ProfileKind::explicit_levels;
        s.levels = std::move(levels);
        return s;
    }

    std::string canonical() const {
        switch (kind) {
            case ProfileKind::scaled_uniform:
                return "uniform(" + format_double(scale) + "," + format_u64(seed) + ")";
            case ProfileKind::geometric:
                return "geometric(" + format_double(base) + "," + format_double(ratio) + ")";
            case ProfileKind::explicit_levels: {
                std::string out = "explicit(";
                for (std::size_t i = 0; i < levels.size(); ++i) {
                    if (i > 0) out += ",";
                    out += format_double(levels[i]);
                }
                return out + ")";
            }
        }
        throw std::logic_error("profile: unknown kind");
    }

    bool operator==(const ProfileSpec&) const = default;
};

/// Materialized security costs c_0..c_R, one per distance ring from the root.
class SecurityProfile {
public:
    /// Stream id reserved for drawing scaled-uniform profiles; simulation
    /// streams are keyed by a different seed domain, so no overlap arises.
    static constexpr std::uint64_t kProfileStreamId = 0;

    SecurityProfile(ProfileSpec spec, int radius) : spec_(std::move(spec)) {
        if (radius < 0) throw std::invalid_argument("profile: radius must be >= 0");
        const auto n = static_cast<std::size_t>(radius) + 1;
        switch (spec_.kind) {
            case ProfileKind::scaled_uniform: {
                RngStream stream(spec_.seed, kProfileStreamId);
                levels_.reserve(n);
                for (std::size_t i = 0; i < n; ++i)
                    levels_.push_back(spec_.scale * stream.uniform_open01());
                break;
            }
            case ProfileKind::geometric: {
                levels_.reserve(n);
                double c = spec_.base;
                for (std::size_t i = 0; i < n; ++i) {
                    levels_.push_back(c);
                    c *= spec_.ratio;
                }
                break;
            }
            case ProfileKind::explicit_levels: {
                if (spec_.levels.size() != n)
                    throw std::invalid_argument(
                        "profile explicit: need exactly radius + 1 levels, got " +
                        format_u64(spec_.levels.size()));
                levels_ = spec_.levels;
                break;
            }
        }
    }

    double level(int r) const {
        if (r < 0 || static_cast<std::size_t>(r) >= levels_.size())
            throw std::out_of_range("profile: ring " + format_int(r) +
                                    " outside radius " +
                                    format_u64(levels_.size() - 1));
        return levels_[static_cast<std::size_t>(r)];
    }

    int radius() const { return static_cast<int>(levels_.size()) - 1; }
    const std::vector<double>& levels() const { return levels_; }
    const ProfileSpec& provenance() const { return spec_; }

    bool operator==(const SecurityProfile&) const = default;

private:
    ProfileSpec spec_;
    std::vector<double> levels_;
};

/// A rooted regular tree: every node has `branching` children out to `radius`
/// generations, and ring r carries security cost profile.level(r).
class TreeSpec {
public:
    TreeSpec(int branching, SecurityProfile profile)
        : branching_(branching), profile_(std::move(profile)) {
        if (branching < 1)
            throw std::invalid_argument("tree: branching factor must be >= 1");
    }

    int branching() const { return branching_; }
    int radius() const { return profile_.radius(); }
    const SecurityProfile& profile() const { return profile_; }

    /// Number of root-to-descendant paths spanning k generations, branching^k.
    std::uint64_t path_count(int depth) const;

    bool operator==(const TreeSpec&) const = default;

private:
    int branching_;
    SecurityProfile profile_;
};

/// One contagion question: an attack seeded at distance-r ring, followed for
/// k onward generations.
struct Scenario {
    int origin_distance = 0;  // r
    int depth = 0;            // k

    Scenario(int r, int k) : origin_distance(r), depth(k) {
        if (r < 0) throw std::invalid_argument("scenario: origin distance must be >= 0");
        if (k < 0) throw std::invalid_argument("scenario: depth must be >= 0");
    }

    bool operator==(const Scenario&) const = default;
};

namespace detail {

/// branching^depth with an overflow guard; anything past 2^62 paths is
/// outside every budget in this library anyway.
inline std::uint64_t checked_path_count(std::uint64_t branching, int depth) {
    constexpr std::uint64_t cap = std::uint64_t{1} << 62;
    std::uint64_t paths = 1;
    for (int l = 0; l < depth; ++l) {
        if (paths > cap / branching)
            throw std::out_of_range("path count branching^depth exceeds 2^62");
        paths *= branching;
    }
    return paths;
}

}  // namespace detail

inline std::uint64_t TreeSpec::path_count(int depth) const {
    if (depth < 0) throw std::invalid_argument("tree: depth must be >= 0");
    return detail::checked_path_count(static_cast<std::uint64_t>(branching_), depth);
}

/// Effective per-hop severity thresholds d_l = c_{r+l} / beta_l for
/// l = 0..k. The attack weakens with each hop, so the threshold the next
/// ring's cost presents grows relative to the original severity draw.
inline std::vector<double> thresholds(const Scenario& scenario,
                                      const SecurityProfile& profile,
                                      const DecayProfile& decay) {
    if (scenario.origin_distance + scenario.depth > profile.radius())
        throw std::out_of_range(
            "scenario reaches ring " +
            format_int(scenario.origin_distance + scenario.depth) +
            " beyond radius " + format_int(profile.radius()));
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(scenario.depth) + 1);
    for (int l = 0; l <= scenario.depth; ++l)
        d.push_back(profile.level(scenario.origin_distance + l) / decay.beta(l));
    return d;
}

}  // namespace treeloss

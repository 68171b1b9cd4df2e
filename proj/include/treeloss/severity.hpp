#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "treeloss/format.hpp"
#include "treeloss/rng.hpp"
#include "treeloss/special.hpp"

namespace treeloss {

enum class SeverityFamily { gamma, normal };

/// Severity law of a single compromise. Two families are supported:
///   gamma(shape a, rate b):      mean a/b, variance a/b^2
///   normal(mean m, variance s2): the variance parameter is s^2, not s
///
/// normal(m, 0) is accepted as the degenerate point mass at m so that
/// zero-variance limits stay expressible.
class SeverityModel {
public:
    static SeverityModel make_gamma(double shape, double rate) {
        if (!(shape > 0.0) || !std::isfinite(shape))
            throw std::invalid_argument("severity gamma: shape must be positive");
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("severity gamma: rate must be positive");
        return SeverityModel(SeverityFamily::gamma, shape, rate);
    }

    static SeverityModel make_normal(double mean, double variance) {
        if (!std::isfinite(mean))
            throw std::invalid_argument("severity normal: mean must be finite");
        if (!(variance >= 0.0) || !std::isfinite(variance))
            throw std::invalid_argument("severity normal: variance must be >= 0");
        return SeverityModel(SeverityFamily::normal, mean, variance);
    }

    SeverityFamily family() const { return family_; }

    /// First parameter: gamma shape, or normal mean.
    double param1() const { return p1_; }
    /// Second parameter: gamma rate, or normal variance.
    double param2() const { return p2_; }

    double mean() const {
        return family_ == SeverityFamily::gamma ? p1_ / p2_ : p1_;
    }

    double variance() const {
        return family_ == SeverityFamily::gamma ? p1_ / (p2_ * p2_) : p2_;
    }

    /// Survival function P(X > x).
    double survival(double x) const {
        if (family_ == SeverityFamily::gamma) {
            if (x <= 0.0) return 1.0;  // gamma support is (0, inf)
            return gamma_q(p1_, p2_ * x);
        }
        if (p2_ == 0.0) return x < p1_ ? 1.0 : 0.0;  // point mass at the mean
        return 0.5 * std::erfc((x - p1_) / std::sqrt(2.0 * p2_));
    }

    double sample(RngStream& rng) const {
        if (family_ == SeverityFamily::gamma) {
            if (p1_ < 1.0)
                throw std::invalid_argument(
                    "severity gamma: sampling requires shape >= 1");
            return rng.gamma(p1_) / p2_;
        }
        if (p2_ == 0.0) return p1_;
        return p1_ + std::sqrt(p2_) * rng.normal();
    }

    /// Canonical spelling, e.g. "gamma(5,1)" or "normal(5,4)". Used by the
    /// config serializer and as the severity label in CSV output.
    std::string canonical() const {
        const char* name = family_ == SeverityFamily::gamma ? "gamma" : "normal";
        return std::string(name) + "(" + format_double(p1_) + "," + format_double(p2_) + ")";
    }

    bool operator==(const SeverityModel&) const = default;

private:
    SeverityModel(SeverityFamily family, double p1, double p2)
        : family_(family), p1_(p1), p2_(p2) {}

    SeverityFamily family_;
    double p1_;
    double p2_;
};

}  // namespace treeloss

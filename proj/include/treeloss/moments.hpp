#pragma once

namespace treeloss {

/// Mean/variance pair for a scalar law.
struct MomentPair {
    double mean = 0.0;
    double variance = 0.0;

    double second_moment() const { return variance + mean * mean; }

    bool operator==(const MomentPair&) const = default;
};

}  // namespace treeloss

#pragma once

#include <cstddef>
#include <cstdint>

#include "compvar/errors.hpp"

namespace compvar {

// Feedback controller around a rolling quantile forecast: the forecast is
// shifted by -kappa * (alpha_hat - alpha), where alpha_hat is the running
// hit frequency seeded with a pseudo-sample of warmup_W observations at the
// target level alpha.
struct CompensatorConfig {
    double alpha = 0.05;        // target hit probability, in (0, 1)
    double kappa = 0.0;         // feedback gain, >= 0 (0 disables the adjustment)
    std::size_t warmup_W = 1;   // prior weight of the initialization, >= 1
};

struct CompensatorState {
    std::uint64_t hit_count = 0;
    std::uint64_t steps_seen = 0;
    double alpha_hat = 0.0;
};

inline void validate(const CompensatorConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw AlphaOutOfRange("compensator: alpha must lie strictly inside (0, 1)");
    }
    if (!(cfg.kappa >= 0.0)) {
        throw InvalidConfig("compensator: kappa must be nonnegative");
    }
    if (cfg.warmup_W < 1) {
        throw InvalidConfig("compensator: warmup_W must be a positive integer");
    }
}

// Prior-weighted hit frequency: (hits + alpha * W) / (steps + W).
inline double weighted_rate(std::uint64_t hit_count, std::uint64_t steps_seen,
                            const CompensatorConfig& cfg) {
    return (static_cast<double>(hit_count) + cfg.alpha * static_cast<double>(cfg.warmup_W)) /
           static_cast<double>(steps_seen + cfg.warmup_W);
}

inline CompensatorState initial_state(const CompensatorConfig& cfg) {
    validate(cfg);
    return {0, 0, cfg.alpha};  // weighted_rate(0, 0) == alpha by construction
}

inline double adjusted_quantile(double q_hat, const CompensatorState& state,
                                const CompensatorConfig& cfg) {
    return q_hat - cfg.kappa * (state.alpha_hat - cfg.alpha);
}

struct Observation {
    int hit = 0;
    CompensatorState state;
};

// Score one observation against an adjusted quantile and advance the state.
// A hit means x <= q_adj (the forecast covered the draw).
inline Observation observe(const CompensatorState& state, double x, double q_adj,
                           const CompensatorConfig& cfg) {
    const int hit = x <= q_adj ? 1 : 0;
    CompensatorState next;
    next.hit_count = state.hit_count + static_cast<std::uint64_t>(hit);
    next.steps_seen = state.steps_seen + 1;
    next.alpha_hat = weighted_rate(next.hit_count, next.steps_seen, cfg);
    return {hit, next};
}

// Largest admissible gain for a bounded sample: kappa < 2 * L * (T - W),
// where T is the sample length, W the warmup/window length and L a bound on
// both |X| and the fitted quantiles.
inline double kappa_bound(double L, std::size_t T, std::size_t W) {
    if (!(L > 0.0)) {
        throw InvalidConfig("kappa_bound: L must be positive");
    }
    if (W >= T) {
        throw WindowExceedsSample("kappa_bound: window length must be smaller than the sample");
    }
    return 2.0 * L * static_cast<double>(T - W);
}

// Almost-sure envelope for |alpha_hat - alpha| after n observations:
// 2 * L / kappa + 1 / n.
inline double theorem1_band(double L, double kappa, std::uint64_t n) {
    if (!(L > 0.0)) {
        throw InvalidConfig("theorem1_band: L must be positive");
    }
    if (n < 1) {
        throw InvalidConfig("theorem1_band: n must be a positive integer");
    }
    if (!(kappa > 0.0)) {
        throw ZeroKappa("theorem1_band: band is undefined for kappa = 0");
    }
    return 2.0 * L / kappa + 1.0 / static_cast<double>(n);
}

}  // namespace compvar

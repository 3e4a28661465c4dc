#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "compvar/compensator.hpp"
#include "compvar/engine.hpp"
#include "compvar/series.hpp"
#include "compvar/special_functions.hpp"

namespace compvar {

struct SimConfig {
    std::size_t n_total = 10200;
    std::size_t window_W = 200;
    double alpha = 0.01;
    std::vector<double> kappas = {0.0, 20.0, 50.0, 200.0};
    double mean = 0.0;
    double variance = 0.01;
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    DistKind dist_kind = DistKind::normal;
    double student_dof = 5.0;
};

namespace detail {

// Uniform draw on (0, 1) from the top 53 bits of a mt19937_64 word. The
// half-offset keeps 0 and 1 unreachable.
inline double uniform_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double gaussian_draw(std::mt19937_64& rng) {
    return inv_normal_cdf(uniform_open(rng));
}

}  // namespace detail

// Deterministic Gaussian sample: mt19937_64, the fixed 53-bit uniform
// mapping and our own inverse-CDF transform. std::normal_distribution is
// implementation-defined, so the same seed would not reproduce across
// standard libraries; this path does.
inline ReturnSeries generate_gaussian(std::size_t n, double mean, double variance,
                                      std::uint64_t seed) {
    if (n < 1) {
        throw InvalidConfig("generate_gaussian: n must be positive");
    }
    if (!(variance > 0.0)) {
        throw InvalidConfig("generate_gaussian: variance must be positive");
    }
    std::mt19937_64 rng(seed);
    const double sd = std::sqrt(variance);
    std::vector<double> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(mean + sd * detail::gaussian_draw(rng));
    }
    return make_return_series(std::move(values));
}

struct KappaTrajectory {
    double kappa = 0.0;
    std::vector<double> alpha_hat_path;  // prior-weighted hit rate per step
};

// One simulated series (cfg.seed), one backtest per gain in cfg.kappas, all
// on the same draw so the trajectories are directly comparable.
inline std::vector<KappaTrajectory> convergence_experiment(const SimConfig& cfg) {
    const ReturnSeries series =
        generate_gaussian(cfg.n_total, cfg.mean, cfg.variance, cfg.seed);
    BacktestConfig bt;
    bt.alpha = cfg.alpha;
    bt.window_W = cfg.window_W;
    bt.dist_kind = cfg.dist_kind;
    bt.student_dof = cfg.student_dof;
    std::vector<KappaTrajectory> out;
    out.reserve(cfg.kappas.size());
    for (double k : cfg.kappas) {
        bt.kappa = k;
        out.push_back({k, run_backtest(series, bt).alpha_hat_weighted_path});
    }
    return out;
}

struct BandCheck {
    bool pass = false;
    std::size_t entry_step = 0;     // 1-based observation at which the band was first met
    std::size_t violations = 0;     // post-entry steps outside the band
    double worst_margin = std::numeric_limits<double>::infinity();  // min of band - |dev|
};

// Stress harness for the convergence band: the quantile forecast is pinned to
// a constant c with |c| <= L (a worst-case, data-ignoring forecaster), the
// data are Gaussian draws clipped to [-L, L], and the compensator runs with a
// minimal warmup of 1. After the first step at which |alpha_hat - alpha| is
// inside 2L/kappa + 1/n, it must stay inside for good. The step count n here
// includes the one-observation prior, which is tighter than the plain 1/steps
// band, so passing implies the looser statement as well.
inline BandCheck adversarial_band_test(double q_hat_const, double kappa, double L,
                                       std::size_t n, std::uint64_t seed,
                                       double alpha = 0.05) {
    if (!(L > 0.0)) {
        throw InvalidConfig("adversarial_band_test: L must be positive");
    }
    if (std::abs(q_hat_const) > L) {
        throw InvalidConfig("adversarial_band_test: |q_hat_const| must not exceed L");
    }
    if (!(kappa > 0.0)) {
        throw ZeroKappa("adversarial_band_test: the band needs kappa > 0");
    }
    const CompensatorConfig cfg{alpha, kappa, 1};
    validate(cfg);
    CompensatorState state = initial_state(cfg);
    std::mt19937_64 rng(seed);
    const double sd = 0.5 * L;

    BandCheck out;
    bool entered = false;
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = std::clamp(sd * detail::gaussian_draw(rng), -L, L);
        const double q_adj = adjusted_quantile(q_hat_const, state, cfg);
        state = observe(state, x, q_adj, cfg).state;
        const double dev = std::abs(state.alpha_hat - cfg.alpha);
        const double band =
            2.0 * L / kappa + 1.0 / static_cast<double>(state.steps_seen + cfg.warmup_W);
        if (!entered) {
            if (dev <= band) {
                entered = true;
                out.entry_step = i;
                out.worst_margin = band - dev;
            }
        } else {
            out.worst_margin = std::min(out.worst_margin, band - dev);
            if (dev > band) {
                ++out.violations;
            }
        }
    }
    out.pass = entered && out.violations == 0;
    return out;
}

struct EnsembleResult {
    std::vector<double> mean_alpha_tilde_path;  // cross-replication mean per step
    std::vector<double> var_alpha_tilde_path;   // cross-replication variance per step
    std::vector<double> band;                   // 2*l_alpha/kappa + 1/n, +inf when kappa = 0
    double l_alpha = 0.0;            // max |fitted quantile| over all replications and steps
    double mc_standard_error = 0.0;  // terminal standard error of the ensemble mean
};

// Lockstep ensemble: R independent series advance together, and at every step
// the penalty uses the cross-replication mean of the weighted hit rates, the
// same shift applied to every path. With R = 1 this reduces exactly to the
// realized-path compensator. The reported band uses the terminal l_alpha, the
// realized stand-in for a uniform quantile bound, so it decreases in n.
inline EnsembleResult ensemble_experiment(const SimConfig& cfg, double kappa) {
    if (cfg.replications < 1) {
        throw TooFewReplications("ensemble_experiment: need at least one replication");
    }
    if (cfg.n_total <= cfg.window_W) {
        throw SeriesTooShort("ensemble_experiment: n_total must exceed window_W");
    }
    const std::size_t R = cfg.replications;
    const std::size_t W = cfg.window_W;

    std::vector<ReturnSeries> series;
    series.reserve(R);
    for (std::size_t r = 0; r < R; ++r) {
        series.push_back(generate_gaussian(cfg.n_total, cfg.mean, cfg.variance,
                                           cfg.seed + static_cast<std::uint64_t>(r)));
    }

    const CompensatorConfig comp{cfg.alpha, kappa, W};
    validate(comp);
    std::vector<CompensatorState> states(R, initial_state(comp));

    const std::size_t steps = cfg.n_total - W;
    EnsembleResult out;
    out.mean_alpha_tilde_path.reserve(steps);
    out.var_alpha_tilde_path.reserve(steps);

    std::vector<double> q_hat(R);
    for (std::size_t s = W; s < cfg.n_total; ++s) {
        for (std::size_t r = 0; r < R; ++r) {
            const Window w{series[r].values.data() + (s - W), W};
            q_hat[r] = quantile(detail::fit_window(w, cfg.dist_kind, cfg.student_dof), cfg.alpha);
            out.l_alpha = std::max(out.l_alpha, std::abs(q_hat[r]));
        }
        double acc = 0.0;
        for (const CompensatorState& st : states) acc += st.alpha_hat;
        const double mean_tilde = acc / static_cast<double>(R);
        const double penalty = kappa * (mean_tilde - cfg.alpha);
        for (std::size_t r = 0; r < R; ++r) {
            const double q_adj = q_hat[r] - penalty;
            states[r] = observe(states[r], series[r].values[s], q_adj, comp).state;
        }
        double m = 0.0;
        for (const CompensatorState& st : states) m += st.alpha_hat;
        m /= static_cast<double>(R);
        double v = 0.0;
        for (const CompensatorState& st : states) {
            const double d = st.alpha_hat - m;
            v += d * d;
        }
        out.mean_alpha_tilde_path.push_back(m);
        out.var_alpha_tilde_path.push_back(v / static_cast<double>(R));
    }

    out.band.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double n = static_cast<double>(W + i + 1);
        out.band.push_back(kappa > 0.0 ? 2.0 * out.l_alpha / kappa + 1.0 / n
                                       : std::numeric_limits<double>::infinity());
    }

    if (R > 1) {
        const double vt = out.var_alpha_tilde_path.back() * static_cast<double>(R) /
                          static_cast<double>(R - 1);  // unbiased sample variance
        out.mc_standard_error = std::sqrt(vt / static_cast<double>(R));
    }
    return out;
}

}  // namespace compvar

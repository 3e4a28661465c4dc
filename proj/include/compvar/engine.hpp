#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compvar/compensator.hpp"
#include "compvar/coverage_tests.hpp"
#include "compvar/distribution.hpp"
#include "compvar/errors.hpp"
#include "compvar/series.hpp"

namespace compvar {

// Optional per-step gain; called with the 1-based post-warmup step index.
using KappaSchedule = std::function<double(std::size_t)>;

struct BacktestConfig {
    double alpha = 0.05;
    double kappa = 0.0;
    std::size_t window_W = 200;
    DistKind dist_kind = DistKind::normal;
    double student_dof = 5.0;
    std::optional<double> bound_L;   // defaults to the realized max |X|
    KappaSchedule kappa_schedule;    // overrides kappa when set
};

struct BacktestReport {
    std::vector<double> var_adj;                  // adjusted VaR per step, -q_adj
    std::vector<int> hits;                        // 1 iff X_s <= -var_adj_s
    std::vector<double> alpha_hat_weighted_path;  // prior-weighted hit rate after each step
    double alpha_hat_raw = 0.0;                   // terminal M1 / (M0 + M1)
    ViolationLedger ledger;
    TestResult kupiec;
    TestResult christoffersen;
    double mean_var_x100 = 0.0;  // 100 * mean(var_adj)
    std::vector<std::string> warnings;
};

namespace detail {

inline DistributionEstimate fit_window(Window w, DistKind kind, double student_dof) {
    switch (kind) {
        case DistKind::normal: return fit_normal(w);
        case DistKind::empirical: return fit_empirical(w);
        case DistKind::student_t: return fit_student_t(w, student_dof);
    }
    throw Error("fit_window: unknown distribution kind");
}

}  // namespace detail

// Rolling out-of-sample backtest. For each step s = W+1 .. T the model is
// fitted on the W returns strictly before s, the alpha-quantile forecast is
// shifted by the compensator, and X_s is scored against it. Nothing at or
// after s ever enters the fit, so the loop is causal by construction.
inline BacktestReport run_backtest(const ReturnSeries& series, const BacktestConfig& cfg) {
    const std::size_t T = series.size();
    const std::size_t W = cfg.window_W;
    if (W < 1) {
        throw InvalidConfig("run_backtest: window_W must be positive");
    }
    if (T < W + 2) {
        throw SeriesTooShort("run_backtest: need at least window_W + 2 returns, got " +
                             std::to_string(T));
    }

    CompensatorConfig comp{cfg.alpha, cfg.kappa, W};
    validate(comp);

    BacktestReport rep;
    const std::size_t steps = T - W;
    rep.var_adj.reserve(steps);
    rep.hits.reserve(steps);
    rep.alpha_hat_weighted_path.reserve(steps);

    const double L = cfg.bound_L.value_or(series.bound_L);
    if (!cfg.kappa_schedule && L > 0.0 && cfg.kappa >= kappa_bound(L, T, W)) {
        rep.warnings.push_back("kappa = " + std::to_string(cfg.kappa) +
                               " is at or above the admissible bound 2*L*(T-W) = " +
                               std::to_string(kappa_bound(L, T, W)) +
                               "; the convergence band no longer applies");
    }

    CompensatorState state = initial_state(comp);
    for (std::size_t s = W; s < T; ++s) {
        const Window w{series.values.data() + (s - W), W};
        const DistributionEstimate est = detail::fit_window(w, cfg.dist_kind, cfg.student_dof);
        const double q_hat = quantile(est, cfg.alpha);
        if (cfg.kappa_schedule) {
            comp.kappa = cfg.kappa_schedule(s - W + 1);
            if (!(comp.kappa >= 0.0)) {
                throw InvalidConfig("run_backtest: kappa schedule produced a negative gain");
            }
        }
        const double q_adj = adjusted_quantile(q_hat, state, comp);
        rep.var_adj.push_back(-q_adj);
        const Observation obs = observe(state, series.values[s], q_adj, comp);
        rep.hits.push_back(obs.hit);
        state = obs.state;
        rep.alpha_hat_weighted_path.push_back(state.alpha_hat);
    }

    rep.ledger = ledger_from_hits(rep.hits);
    rep.alpha_hat_raw =
        static_cast<double>(rep.ledger.ones()) / static_cast<double>(rep.ledger.total());
    rep.kupiec = kupiec(rep.ledger, cfg.alpha);
    rep.christoffersen = christoffersen(rep.ledger);
    rep.mean_var_x100 =
        100.0 * std::accumulate(rep.var_adj.begin(), rep.var_adj.end(), 0.0) /
        static_cast<double>(rep.var_adj.size());
    return rep;
}

// One independent backtest per gain, each from a fresh compensator state.
// Any schedule on cfg is ignored; the swept values are constants.
inline std::vector<BacktestReport> sweep_kappa(const ReturnSeries& series,
                                               const BacktestConfig& cfg,
                                               std::span<const double> kappas) {
    std::vector<BacktestReport> reports;
    reports.reserve(kappas.size());
    for (double k : kappas) {
        BacktestConfig c = cfg;
        c.kappa = k;
        c.kappa_schedule = nullptr;
        reports.push_back(run_backtest(series, c));
    }
    return reports;
}

}  // namespace compvar

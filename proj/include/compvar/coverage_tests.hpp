#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "compvar/errors.hpp"
#include "compvar/special_functions.hpp"

namespace compvar {

// First-order transition counts of a 0/1 hit sequence: m_ij is the number of
// steps moving from state i to state j.
struct ViolationLedger {
    std::uint64_t m00 = 0;
    std::uint64_t m01 = 0;
    std::uint64_t m10 = 0;
    std::uint64_t m11 = 0;

    std::uint64_t total() const noexcept { return m00 + m01 + m10 + m11; }
    std::uint64_t zeros() const noexcept { return m00 + m01; }  // steps leaving state 0
    std::uint64_t ones() const noexcept { return m10 + m11; }   // steps leaving state 1
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

inline ViolationLedger ledger_from_hits(std::span<const int> hits) {
    if (hits.size() < 2) {
        throw TooShort("ledger_from_hits: need at least two observations to form a transition");
    }
    ViolationLedger lg;
    for (std::size_t i = 0; i + 1 < hits.size(); ++i) {
        const bool from = hits[i] != 0;
        const bool to = hits[i + 1] != 0;
        if (!from && !to) {
            ++lg.m00;
        } else if (!from && to) {
            ++lg.m01;
        } else if (from && !to) {
            ++lg.m10;
        } else {
            ++lg.m11;
        }
    }
    return lg;
}

namespace detail {

// x * log(y) with the likelihood convention 0 * log(0) = 0.
inline double xlogy(double x, double y) {
    return x == 0.0 ? 0.0 : x * std::log(y);
}

// The likelihood-ratio statistics are nonnegative by Jensen; clamp the -0.0
// and ulp-level negatives that cancellation produces so that p = 1 is exact.
inline double clamp_stat(double t) {
    return std::max(t, 0.0);
}

}  // namespace detail

// Kupiec's unconditional-coverage likelihood ratio. Depends on the ledger
// only through the marginal hit/no-hit counts.
inline TestResult kupiec(const ViolationLedger& lg, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw AlphaOutOfRange("kupiec: alpha must lie strictly inside (0, 1)");
    }
    if (lg.total() == 0) {
        throw EmptyLedger("kupiec: ledger holds no transitions");
    }
    const double m1 = static_cast<double>(lg.ones());
    const double m0 = static_cast<double>(lg.zeros());
    const double a_hat = m1 / (m0 + m1);
    const double t1 = detail::clamp_stat(
        2.0 * (detail::xlogy(m1, a_hat / alpha) + detail::xlogy(m0, (1.0 - a_hat) / (1.0 - alpha))));
    return {t1, chi2_1_survival(t1)};
}

// Christoffersen's independence likelihood ratio: first-order Markov
// alternative against the iid null. Each count multiplies the log of its own
// alternative/null probability ratio rather than a difference of whole
// log-likelihoods: equal rational probabilities divide to exactly 1.0, so an
// exactly independent ledger yields an exact zero (and p = 1) instead of a
// cancellation residue. Empty transition rows contribute nothing (0/0 := 0
// for the transition probabilities, guarded by the zero counts).
inline TestResult christoffersen(const ViolationLedger& lg) {
    if (lg.total() == 0) {
        throw EmptyLedger("christoffersen: ledger holds no transitions");
    }
    const double m00 = static_cast<double>(lg.m00);
    const double m01 = static_cast<double>(lg.m01);
    const double m10 = static_cast<double>(lg.m10);
    const double m11 = static_cast<double>(lg.m11);

    const double row0 = m00 + m01;
    const double row1 = m10 + m11;
    const double pi01 = row0 > 0.0 ? m01 / row0 : 0.0;
    const double pi11 = row1 > 0.0 ? m11 / row1 : 0.0;
    const double pi = (m01 + m11) / static_cast<double>(lg.total());

    const double t2 = detail::clamp_stat(
        2.0 * (detail::xlogy(m00, (1.0 - pi01) / (1.0 - pi)) + detail::xlogy(m01, pi01 / pi) +
               detail::xlogy(m10, (1.0 - pi11) / (1.0 - pi)) + detail::xlogy(m11, pi11 / pi)));
    return {t2, chi2_1_survival(t2)};
}

// Check (pinball) loss of the candidate quantile xi at level alpha. Convex
// and piecewise linear in xi; minimized by the lower empirical alpha-quantile.
inline double check_loss(std::span<const double> sample, double xi, double alpha) {
    if (sample.empty()) {
        throw EmptySample("check_loss: sample is empty");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw AlphaOutOfRange("check_loss: alpha must lie strictly inside (0, 1)");
    }
    double loss = 0.0;
    for (double x : sample) {
        loss += x < xi ? (alpha - 1.0) * (x - xi) : alpha * (x - xi);
    }
    return loss;
}

}  // namespace compvar

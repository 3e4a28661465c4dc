#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "compvar/errors.hpp"
#include "compvar/special_functions.hpp"

namespace compvar {

// A rolling estimation window: contiguous, ordered, read-only.
using Window = std::span<const double>;

enum class DistKind { normal, empirical, student_t };

inline std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::normal: return "normal";
        case DistKind::empirical: return "empirical";
        case DistKind::student_t: return "student_t";
    }
    return "unknown";
}

// One fitted window. location/scale always carry the sample mean and MLE
// standard deviation (divide by W, not W - 1); sorted_values is only
// populated for the empirical kind, dof only for student_t.
struct DistributionEstimate {
    DistKind kind = DistKind::normal;
    double location = 0.0;
    double scale = 0.0;
    double dof = 0.0;
    std::vector<double> sorted_values;
};

namespace detail {

inline void require_finite(Window w) {
    for (double v : w) {
        if (!std::isfinite(v)) {
            throw NonFiniteValue("window contains a non-finite value");
        }
    }
}

struct Moments {
    double mean;
    double mle_sd;
};

inline Moments window_moments(Window w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    const double mean = sum / static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w) {
        const double d = v - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(w.size()))};
}

inline bool all_equal(Window w) {
    return std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); });
}

}  // namespace detail

inline DistributionEstimate fit_normal(Window w) {
    if (w.size() < 2) {
        throw TooShort("fit_normal: window must hold at least 2 values");
    }
    detail::require_finite(w);
    if (detail::all_equal(w)) {
        throw ZeroVariance("fit_normal: window is constant, scale would be zero");
    }
    const auto [mean, sd] = detail::window_moments(w);
    if (sd == 0.0) {
        throw ZeroVariance("fit_normal: window variance underflowed to zero");
    }
    return {DistKind::normal, mean, sd, 0.0, {}};
}

inline DistributionEstimate fit_empirical(Window w) {
    if (w.empty()) {
        throw TooShort("fit_empirical: window must hold at least 1 value");
    }
    detail::require_finite(w);
    DistributionEstimate est;
    est.kind = DistKind::empirical;
    est.sorted_values.assign(w.begin(), w.end());
    std::sort(est.sorted_values.begin(), est.sorted_values.end());
    const auto [mean, sd] = detail::window_moments(w);
    est.location = mean;
    est.scale = sd;  // may be 0 for a constant window; the quantile never divides by it
    return est;
}

// Location-scale Student-t with moment matching: the fitted MLE standard
// deviation is the target *standard deviation*, so the scale parameter of the
// ordinary t is sd * sqrt((dof - 2) / dof).
inline DistributionEstimate fit_student_t(Window w, double dof) {
    if (!(dof > 2.0)) {
        throw InvalidDof("fit_student_t: dof must exceed 2 so the variance is finite");
    }
    if (w.size() < 2) {
        throw TooShort("fit_student_t: window must hold at least 2 values");
    }
    detail::require_finite(w);
    if (detail::all_equal(w)) {
        throw ZeroVariance("fit_student_t: window is constant, scale would be zero");
    }
    const auto [mean, sd] = detail::window_moments(w);
    if (sd == 0.0) {
        throw ZeroVariance("fit_student_t: window variance underflowed to zero");
    }
    return {DistKind::student_t, mean, sd * std::sqrt((dof - 2.0) / dof), dof, {}};
}

// Lower alpha-quantile of a fitted estimate. The empirical kind returns the
// ceil(alpha * W)-th smallest window value (1-based), the left-continuous
// inverse of the empirical CDF; a tiny downward nudge keeps products like
// 0.07 * 100 that land a few ulps above an integer from ceiling one rank too
// high.
inline double quantile(const DistributionEstimate& est, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw AlphaOutOfRange("quantile: alpha must lie strictly inside (0, 1)");
    }
    switch (est.kind) {
        case DistKind::normal:
            return est.location + est.scale * inv_normal_cdf(alpha);
        case DistKind::student_t:
            return est.location + est.scale * student_t_quantile(alpha, est.dof);
        case DistKind::empirical: {
            const std::size_t n = est.sorted_values.size();
            if (n == 0) {
                throw EmptySample("quantile: empirical estimate holds no values");
            }
            const double rank = std::ceil(alpha * static_cast<double>(n) - 1e-9);
            std::size_t k = rank < 1.0 ? 1 : static_cast<std::size_t>(rank);
            if (k > n) k = n;
            return est.sorted_values[k - 1];
        }
    }
    throw Error("quantile: unknown distribution kind");
}

}  // namespace compvar

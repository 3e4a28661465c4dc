#pragma once

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "compvar/errors.hpp"

namespace compvar {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)

inline double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Lower-tail standard normal CDF. erfc keeps full relative accuracy in the
// left tail, where the plain erf form would cancel.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

namespace detail {

// Wichura's algorithm AS 241, routine PPND16: rational approximation to the
// standard normal quantile, good to about 1e-16 relative over (0, 1).
inline double ppnd16(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) *
                        r +
                    4.5921953931549871457e+4) *
                       r +
                   1.3731693765509461125e+4) *
                      r +
                  1.9715909503065514427e+3) *
                     r +
                 1.3314166789178437745e+2) *
                    r +
                3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) *
                        r +
                    2.1213794301586595867e+4) *
                       r +
                   5.3941960214247511077e+3) *
                      r +
                  6.8718700749205790830e+2) *
                     r +
                 4.2313330701600911252e+1) *
                    r +
                1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e+0) *
                    r +
                3.64784832476320460504e+0) *
                   r +
               5.76949722146069140550e+0) *
                  r +
              4.63033784615654529590e+0) *
                 r +
             1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e+0) *
                  r +
              2.05319162663775882187e+0) *
                 r +
             1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e+0) *
                  r +
              5.46378491116411436990e+0) *
                 r +
             6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
    }
    return q < 0.0 ? -x : x;
}

}  // namespace detail

// Standard normal quantile. AS 241 start plus one Halley step against the
// erfc-based CDF. p > 0.5 goes through the exact reflection -F^{-1}(1 - p);
// 1 - p is representable without rounding there, and the refinement then
// always runs on the cancellation-free lower tail.
inline double inv_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw POutOfRange("inv_normal_cdf: p must lie strictly inside (0, 1)");
    }
    if (p > 0.5) {
        return -inv_normal_cdf(1.0 - p);
    }
    double x = detail::ppnd16(p);
    const double pdf = normal_pdf(x);
    if (pdf > 1e-300) {  // skip where the density underflows; AS 241 stands alone there
        const double err = normal_cdf(x) - p;
        const double u = err / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// Survival function of a chi-squared variable with one degree of freedom:
// P(Z^2 > x) = P(|Z| > sqrt(x)) = erfc(sqrt(x / 2)).
inline double chi2_1_survival(double x) {
    if (!(x >= 0.0)) {
        throw NegativeStatistic("chi2_1_survival: statistic must be nonnegative");
    }
    return std::erfc(std::sqrt(0.5 * x));
}

// Quantile of the ordinary (unit-scale) Student-t distribution.
inline double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) {
        throw AlphaOutOfRange("student_t_quantile: p must lie strictly inside (0, 1)");
    }
    if (!(dof > 0.0)) {
        throw InvalidDof("student_t_quantile: dof must be positive");
    }
    const boost::math::students_t_distribution<double> dist(dof);
    return boost::math::quantile(dist, p);
}

}  // namespace compvar

#pragma once

// Independent high-precision reference implementations used to pin expected
// values. Everything here works in 50-digit floating point and evaluates the
// likelihood ratios in direct product form, deliberately avoiding the
// log-space route the library takes.

#include <cstdint>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracles {

using mp = boost::multiprecision::cpp_bin_float_50;

// Integer power by repeated multiplication; 0^0 = 1 as in the likelihood
// convention.
inline mp mp_pow(const mp& base, std::uint64_t e) {
    mp out = 1;
    for (std::uint64_t i = 0; i < e; ++i) {
        out *= base;
    }
    return out;
}

inline double normal_quantile(double p) {
    const boost::math::normal_distribution<mp> dist;
    return static_cast<double>(boost::math::quantile(dist, mp(p)));
}

inline double normal_cdf(double x) {
    return static_cast<double>(boost::math::erfc(-mp(x) / sqrt(mp(2))) / 2);
}

inline double chi2_1_survival(double x) {
    return static_cast<double>(boost::math::erfc(sqrt(mp(x) / 2)));
}

// Kupiec unconditional-coverage statistic, product form.
inline double kupiec_stat(std::uint64_t m0, std::uint64_t m1, double alpha) {
    const mp a(alpha);
    const mp a_hat = mp(m1) / (mp(m0) + mp(m1));
    const mp l_null = mp_pow(a, m1) * mp_pow(1 - a, m0);
    const mp l_alt = mp_pow(a_hat, m1) * mp_pow(1 - a_hat, m0);
    return static_cast<double>(2 * log(l_alt / l_null));
}

// Christoffersen independence statistic, product form. Zero bases only ever
// receive zero exponents, so both likelihoods stay strictly positive.
inline double christoffersen_stat(std::uint64_t m00, std::uint64_t m01, std::uint64_t m10,
                                  std::uint64_t m11) {
    const mp row0 = mp(m00) + mp(m01);
    const mp row1 = mp(m10) + mp(m11);
    const mp total = row0 + row1;
    const mp pi01 = row0 > 0 ? mp(mp(m01) / row0) : mp(0);
    const mp pi11 = row1 > 0 ? mp(mp(m11) / row1) : mp(0);
    const mp pi = (mp(m01) + mp(m11)) / total;
    const mp l_alt = mp_pow(1 - pi01, m00) * mp_pow(pi01, m01) * mp_pow(1 - pi11, m10) *
                     mp_pow(pi11, m11);
    const mp l_null = mp_pow(1 - pi, m00 + m10) * mp_pow(pi, m01 + m11);
    return static_cast<double>(2 * log(l_alt / l_null));
}

}  // namespace oracles

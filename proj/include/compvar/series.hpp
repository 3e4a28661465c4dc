#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compvar/errors.hpp"

namespace compvar {

// A return series plus the realized bound L = max |value|. dates, when
// present, is aligned 1:1 with values.
struct ReturnSeries {
    std::vector<double> values;
    std::vector<std::string> dates;
    double bound_L = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

inline ReturnSeries make_return_series(std::vector<double> values,
                                       std::vector<std::string> dates = {}) {
    if (!dates.empty() && dates.size() != values.size()) {
        throw InvalidConfig("make_return_series: dates must align with values");
    }
    double bound = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NonFiniteValue("make_return_series: series contains a non-finite value");
        }
        bound = std::max(bound, std::abs(v));
    }
    return {std::move(values), std::move(dates), bound};
}

// Log returns X_s = ln(P_{s+1} / P_s). price_dates, when given, must align
// with prices; the returned series carries the date of each return's later
// price.
inline ReturnSeries log_returns(std::span<const double> prices,
                                std::vector<std::string> price_dates = {}) {
    if (prices.size() < 2) {
        throw TooShort("log_returns: need at least two prices");
    }
    if (!price_dates.empty() && price_dates.size() != prices.size()) {
        throw InvalidConfig("log_returns: dates must align with prices");
    }
    std::vector<double> values;
    values.reserve(prices.size() - 1);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0)) {
            throw NonPositivePrice("log_returns: price at position " + std::to_string(i + 1) +
                                   " is not positive");
        }
        if (i > 0) {
            values.push_back(std::log(prices[i] / prices[i - 1]));
        }
    }
    std::vector<std::string> dates;
    if (!price_dates.empty()) {
        dates.assign(price_dates.begin() + 1, price_dates.end());
    }
    return make_return_series(std::move(values), std::move(dates));
}

}  // namespace compvar

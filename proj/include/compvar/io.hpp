#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "compvar/engine.hpp"
#include "compvar/errors.hpp"
#include "compvar/series.hpp"
#include "compvar/simulation.hpp"
#include "compvar/version.hpp"

namespace compvar {

// Shortest decimal string that parses back to exactly the same double, so
// CSV and JSON artifacts round-trip bit for bit.
inline std::string fmt_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline std::string utc_timestamp_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

// SHA-256 of a file's bytes, lowercase hex.
inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                      EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw IoError("sha256: cannot initialize digest");
    }
    std::array<char, 65536> chunk{};
    while (in) {
        in.read(chunk.data(), chunk.size());
        const std::streamsize got = in.gcount();
        if (got > 0 &&
            EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(got)) != 1) {
            throw IoError("sha256: digest update failed");
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw IoError("sha256: digest finalization failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace detail {

inline bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        return false;
    }
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

}  // namespace detail

// Read a `date,close` CSV into a return series. Dates must be ISO-8601 and
// strictly increasing, closes strictly positive decimals. Row numbers in
// errors are 1-based and count the header.
inline ReturnSeries ingest_prices(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "header", "file is empty");
    }
    if (detail::strip_cr(line) != "date,close") {
        throw ParseError(1, "header", "expected exactly 'date,close'");
    }

    std::vector<std::string> dates;
    std::vector<double> closes;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = detail::strip_cr(line);
        if (line.empty()) {
            continue;  // tolerate a trailing blank line
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(row, "row", "expected exactly two comma-separated fields");
        }
        std::string date = line.substr(0, comma);
        const std::string close_str = line.substr(comma + 1);
        if (!detail::is_iso_date(date)) {
            throw ParseError(row, "date", "'" + date + "' is not an ISO-8601 date");
        }
        double close = 0.0;
        const auto res =
            std::from_chars(close_str.data(), close_str.data() + close_str.size(), close);
        if (res.ec != std::errc{} || res.ptr != close_str.data() + close_str.size()) {
            throw ParseError(row, "close", "'" + close_str + "' is not a decimal number");
        }
        if (!(close > 0.0)) {
            throw NonPositivePrice("row " + std::to_string(row) + ": close " + close_str +
                                   " is not positive");
        }
        if (!dates.empty() && date <= dates.back()) {
            throw NonMonotoneDates("row " + std::to_string(row) + ": date " + date +
                                   " does not increase over " + dates.back());
        }
        dates.push_back(std::move(date));
        closes.push_back(close);
    }
    if (closes.size() < 2) {
        throw SeriesTooShort("need at least two price rows, got " +
                             std::to_string(closes.size()));
    }
    return log_returns(closes, std::move(dates));
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no \r\n translation anywhere
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

}  // namespace detail

// Per-step trajectory of one backtest: step,date,var_adj,hit,alpha_hat. The
// date column is empty for simulated data; alpha_hat is the prior-weighted
// rate after the step.
inline void write_trajectory_csv(const std::filesystem::path& path, const BacktestReport& rep,
                                 const std::vector<std::string>& step_dates = {}) {
    std::ofstream out = detail::open_out(path);
    out << "step,date,var_adj,hit,alpha_hat\n";
    for (std::size_t i = 0; i < rep.var_adj.size(); ++i) {
        out << (i + 1) << ',' << (i < step_dates.size() ? step_dates[i] : "") << ','
            << fmt_double(rep.var_adj[i]) << ',' << rep.hits[i] << ','
            << fmt_double(rep.alpha_hat_weighted_path[i]) << '\n';
    }
}

inline void write_band_csv(const std::filesystem::path& path, std::span<const double> band) {
    std::ofstream out = detail::open_out(path);
    out << "step,band\n";
    for (std::size_t i = 0; i < band.size(); ++i) {
        out << (i + 1) << ',' << fmt_double(band[i]) << '\n';
    }
}

inline void write_ensemble_csv(const std::filesystem::path& path, const EnsembleResult& res) {
    std::ofstream out = detail::open_out(path);
    out << "step,mean_alpha_tilde,band,var_alpha_tilde\n";
    for (std::size_t i = 0; i < res.mean_alpha_tilde_path.size(); ++i) {
        out << (i + 1) << ',' << fmt_double(res.mean_alpha_tilde_path[i]) << ','
            << fmt_double(res.band[i]) << ',' << fmt_double(res.var_alpha_tilde_path[i]) << '\n';
    }
}

// One report entry per gain. Statistics are emitted as numbers; nlohmann
// serializes doubles with shortest round-trip precision, so re-parsing
// reproduces them bit-exactly.
inline nlohmann::ordered_json report_entry_json(double kappa, const BacktestReport& rep) {
    nlohmann::ordered_json j;
    j["kappa"] = kappa;
    j["alpha_hat"] = rep.alpha_hat_raw;
    j["alpha_hat_weighted"] = rep.alpha_hat_weighted_path.back();
    j["lr_uc"] = rep.kupiec.p_value;
    j["lr_ind"] = rep.christoffersen.p_value;
    j["t1"] = rep.kupiec.statistic;
    j["t2"] = rep.christoffersen.statistic;
    j["mean_var_x100"] = rep.mean_var_x100;
    j["hits"] = rep.ledger.ones();
    j["steps"] = rep.ledger.total();
    j["transitions"] = {{"m00", rep.ledger.m00},
                        {"m01", rep.ledger.m01},
                        {"m10", rep.ledger.m10},
                        {"m11", rep.ledger.m11}};
    j["warnings"] = rep.warnings;
    return j;
}

struct RunManifest {
    std::string command;
    nlohmann::ordered_json config;
    std::optional<std::string> input_path;
    std::optional<std::string> input_sha256;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> artifacts;
};

inline nlohmann::ordered_json manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = "compvar";
    j["tool_version"] = kVersion;
    j["generated_at_utc"] = utc_timestamp_now();
    j["command"] = m.command;
    j["config"] = m.config;
    if (m.input_path) {
        j["input"] = {{"path", *m.input_path}, {"sha256", m.input_sha256.value_or("")}};
    } else {
        j["input"] = nullptr;
    }
    if (m.seed) {
        j["seed"] = *m.seed;
    } else {
        j["seed"] = nullptr;
    }
    j["artifacts"] = m.artifacts;
    return j;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out = detail::open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace compvar

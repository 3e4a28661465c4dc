#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace compvar {

// Base class for everything thrown by this library. Catching compvar::Error
// separates domain/data failures from genuine programming errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class ZeroVariance : public Error {
public:
    using Error::Error;
};

class InvalidDof : public Error {
public:
    using Error::Error;
};

class AlphaOutOfRange : public Error {
public:
    using Error::Error;
};

class POutOfRange : public Error {
public:
    using Error::Error;
};

class NegativeStatistic : public Error {
public:
    using Error::Error;
};

class TooShort : public Error {
public:
    using Error::Error;
};

class EmptyLedger : public Error {
public:
    using Error::Error;
};

class EmptySample : public Error {
public:
    using Error::Error;
};

class ZeroKappa : public Error {
public:
    using Error::Error;
};

class WindowExceedsSample : public Error {
public:
    using Error::Error;
};

class SeriesTooShort : public Error {
public:
    using Error::Error;
};

class NonPositivePrice : public Error {
public:
    using Error::Error;
};

class NonMonotoneDates : public Error {
public:
    using Error::Error;
};

class TooFewReplications : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// CSV ingestion failure with a 1-based row number (the header is row 1) and
// the name of the offending column.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::string column, const std::string& what)
        : Error("row " + std::to_string(row) + ", column " + column + ": " + what),
          row_(row),
          column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

}  // namespace compvar

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aspp {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- market core -----------------------------------------------------------

class EmptyActiveSetError : public Error {
public:
    EmptyActiveSetError() : Error("active set is empty") {}
};

/// Every active agent holds zero shares, so the clearing denominator vanishes.
class AllStockZeroError : public Error {
public:
    AllStockZeroError() : Error("all active agents hold zero shares") {}
};

// --- population -------------------------------------------------------------

/// The truncated sampling region has acceptance probability too low to be usable.
class RejectionStallError : public Error {
public:
    explicit RejectionStallError(std::size_t rejections)
        : Error("trait sampling stalled after " + std::to_string(rejections) +
                " consecutive rejections; check the mean/variance against the "
                "ln-greed >= 0, ln-fear >= 0 region") {}
};

// --- statistics -------------------------------------------------------------

class ConstantInputError : public Error {
public:
    explicit ConstantInputError(const std::string& what) : Error(what) {}
};

class DegenerateTraitsError : public Error {
public:
    DegenerateTraitsError() : Error("trait variance is zero; wealth-trait correlation undefined") {}
};

// --- estimator ---------------------------------------------------------------

class SeriesTooShortError : public Error {
public:
    SeriesTooShortError(std::size_t length, std::size_t required)
        : Error("price series has " + std::to_string(length) + " observations, needs at least " +
                std::to_string(required)) {}
};

class CalibrationError : public Error {
public:
    enum class Kind { ConstantReturns, ConstantVolatility, BracketFailure };

    CalibrationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

    const char* kind_name() const {
        switch (kind_) {
            case Kind::ConstantReturns: return "ConstantReturns";
            case Kind::ConstantVolatility: return "ConstantVolatility";
            case Kind::BracketFailure: return "BracketFailure";
        }
        return "CalibrationError";
    }

private:
    Kind kind_;
};

// --- cli-io -------------------------------------------------------------------

/// Configuration file / CLI override problems; message carries the field path.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class CsvError : public Error {
public:
    explicit CsvError(const std::string& what) : Error(what) {}
};

class MissingColumnError : public CsvError {
public:
    explicit MissingColumnError(const std::string& column)
        : CsvError("missing required column '" + column + "'") {}
};

class NonPositivePriceError : public CsvError {
public:
    NonPositivePriceError(std::size_t line, const std::string& value)
        : CsvError("line " + std::to_string(line) + ": non-positive close '" + value + "'"),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class UnparsableDateError : public CsvError {
public:
    UnparsableDateError(std::size_t line, const std::string& value)
        : CsvError("line " + std::to_string(line) + ": unparsable date '" + value + "'"),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class TooFewRowsError : public CsvError {
public:
    TooFewRowsError(std::size_t rows, std::size_t required)
        : CsvError("only " + std::to_string(rows) + " usable rows after cleaning, need at least " +
                   std::to_string(required)) {}
};

}  // namespace aspp

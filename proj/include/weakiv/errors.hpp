#pragma once

#include <stdexcept>
#include <string>

namespace weakiv {

// The requested statistic is undefined at the evaluated point (for example a
// zero variance denominator). Confidence-set inversion catches this per grid
// point and records the point as undefined instead of failing the whole run.
class StatisticUndefined : public std::runtime_error {
public:
    explicit StatisticUndefined(const std::string& msg) : std::runtime_error(msg) {}
};

class ZeroDenominatorError : public StatisticUndefined {
public:
    explicit ZeroDenominatorError(const std::string& msg) : StatisticUndefined(msg) {}
};

class AllDegenerateError : public StatisticUndefined {
public:
    explicit AllDegenerateError(const std::string& msg) : StatisticUndefined(msg) {}
};

class SingularMatrixError : public StatisticUndefined {
public:
    explicit SingularMatrixError(const std::string& msg) : StatisticUndefined(msg) {}
};

// Caller-side contract violations (bad alpha, missing gamma, invalid grid...).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

class KTooSmallError : public InvalidInput {
public:
    explicit KTooSmallError(const std::string& msg) : InvalidInput(msg) {}
};

class DegenerateDirectionError : public InvalidInput {
public:
    explicit DegenerateDirectionError(const std::string& msg) : InvalidInput(msg) {}
};

// Problems with user-supplied data or config files.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& msg, long row, long col)
        : DataError(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row),
          col(col) {}
    long row;  // 1-based, header is row 1
    long col;  // 1-based
};

class MissingColumnError : public DataError {
public:
    explicit MissingColumnError(const std::string& msg) : DataError(msg) {}
};

class NonFiniteValueError : public DataError {
public:
    NonFiniteValueError(const std::string& msg, long row, long col)
        : DataError(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row),
          col(col) {}
    long row;
    long col;
};

}  // namespace weakiv

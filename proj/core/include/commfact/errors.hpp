#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace commfact {

enum class ErrorKind {
    DimensionMismatch,
    InvalidArgument,
    NonFinite,
    NormalityViolation,
    NilpotencyViolation,
    TraceNotZero,
    SumNotZero,
    CapExceeded,
    NonConvergence,
    RankDegeneracy,
    ShapeError,
    CoefficientMismatch,
    EigenvalueDegenerate,
    NoAdmissibleEigenvalue,
    ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base class of every error the library throws. `kind()` lets callers
/// (the CLI in particular) map failures to exit codes without RTTI games.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what)
        : Error(ErrorKind::DimensionMismatch, what) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what)
        : Error(ErrorKind::InvalidArgument, what) {}
};

class NonFinite : public Error {
public:
    explicit NonFinite(const std::string& what) : Error(ErrorKind::NonFinite, what) {}
};

class NormalityViolation : public Error {
public:
    NormalityViolation(double defect, const std::string& what)
        : Error(ErrorKind::NormalityViolation, what), defect_(defect) {}
    /// ||x* x - x x*|| of the rejected input.
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class NilpotencyViolation : public Error {
public:
    NilpotencyViolation(std::complex<double> eigenvalue, const std::string& what)
        : Error(ErrorKind::NilpotencyViolation, what), eigenvalue_(eigenvalue) {}
    std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

private:
    std::complex<double> eigenvalue_;
};

class TraceNotZero : public Error {
public:
    TraceNotZero(std::complex<double> trace, const std::string& what)
        : Error(ErrorKind::TraceNotZero, what), trace_(trace) {}
    std::complex<double> trace() const noexcept { return trace_; }

private:
    std::complex<double> trace_;
};

class SumNotZero : public Error {
public:
    SumNotZero(std::complex<double> sum, const std::string& what)
        : Error(ErrorKind::SumNotZero, what), sum_(sum) {}
    std::complex<double> sum() const noexcept { return sum_; }

private:
    std::complex<double> sum_;
};

class CapExceeded : public Error {
public:
    CapExceeded(std::size_t requested, std::size_t cap, const std::string& what)
        : Error(ErrorKind::CapExceeded, what), requested_(requested), cap_(cap) {}
    std::size_t requested() const noexcept { return requested_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t requested_;
    std::size_t cap_;
};

class NonConvergence : public Error {
public:
    NonConvergence(double best_estimate, const std::string& what)
        : Error(ErrorKind::NonConvergence, what), best_estimate_(best_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

class RankDegeneracy : public Error {
public:
    RankDegeneracy(double gap_ratio, const std::string& what)
        : Error(ErrorKind::RankDegeneracy, what), gap_ratio_(gap_ratio) {}
    double gap_ratio() const noexcept { return gap_ratio_; }

private:
    double gap_ratio_;
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ErrorKind::ShapeError, what) {}
};

class CoefficientMismatch : public Error {
public:
    CoefficientMismatch(std::size_t index, const std::string& what)
        : Error(ErrorKind::CoefficientMismatch, what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class EigenvalueDegenerate : public Error {
public:
    explicit EigenvalueDegenerate(const std::string& what)
        : Error(ErrorKind::EigenvalueDegenerate, what) {}
};

class NoAdmissibleEigenvalue : public Error {
public:
    explicit NoAdmissibleEigenvalue(const std::string& what)
        : Error(ErrorKind::NoAdmissibleEigenvalue, what) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(ErrorKind::ParseError, what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace commfact

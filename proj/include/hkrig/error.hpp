#pragma once

#include <stdexcept>
#include <string>

namespace hkrig {

enum class ErrorKind {
    InvalidHyperparameter,
    InvalidInput,
    Shape,
    NotPositiveDefinite,
    UnderdeterminedTrend,
    InsufficientData,
    FitFailure,
    AllInfeasible,
    DegenerateValidation,
    NoModel,
    Schema,
    Parse,
    EmptyDataset,
    ConstantInput,
    Usage,
    Io,
};

/// Library-wide exception. Every failure path carries a kind so callers
/// (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace hkrig

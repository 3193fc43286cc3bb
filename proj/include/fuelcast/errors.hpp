#pragma once

#include <stdexcept>
#include <string>

namespace fuelcast {

/// Error categories. The CLI maps Schema/Usage to exit code 2 and
/// everything else to exit code 1.
enum class ErrorKind {
    Usage,
    Schema,
    Parse,
    EmptyInput,
    DateGap,
    DuplicateRow,
    NegativeValue,
    Split,
    Dimension,
    InvalidValue,
    InsufficientData,
    Selection,
    ZeroShare,
    ZeroTotal,
    DegenerateProportions,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace fuelcast

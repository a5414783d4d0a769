#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mkp {

enum class ErrorCode {
    NotOddPrime,
    BasisOutOfRange,
    IndexOutOfRange,
    ConstructionInconsistent,
    PhaseCountMismatch,
    DegenerateOutput,
    EmptyPattern,
    EmptySubset,
    NonFiniteLoss,
    DimensionMismatch,
    SchemaError,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every mkp operation. The code identifies the failed
/// contract so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mkp

#pragma once

#include <stdexcept>
#include <string>

namespace pktree {

/// Error categories raised by construction and validation routines.
enum class Errc {
    // tree construction
    NonPositiveProbability,
    ProbabilitySumMismatch,
    NonIncreasingTimes,
    // expectation / predicates
    DepthOrderViolation,
    ProcessNotDefinedAtDepth,
    EmptyRange,
    RangeStartsAtRoot,
    // kernel construction
    NonPositiveKernel,
    NotStrictSupermartingale,
    ScheduleNotDecreasing,
    NotAMartingale,
    NonPositiveMartingale,
    NotStrictlyIncreasing,
    ZeroKernelInsideHorizon,
    // bonds
    IndexOutOfRange,
    // assets
    DividendOutsideHorizon,
    AxiomAViolation,
    NotPrevisible,
    // model generators
    MartingaleConditionViolated,
    TreeNotBinary,
    ExtinctionMassPresent,
    SupportTooLarge,
    NonPositive,
    // cli / config
    ConfigParseError,
    // generic misuse
    InvalidArgument,
};

const char* errc_name(Errc code);

/// Exception carrying a machine-checkable error code plus a human message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace pktree

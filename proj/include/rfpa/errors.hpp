// errors.hpp - error codes and the exception type shared by all modules.

#pragma once

#include <stdexcept>
#include <string>

namespace rfpa {

enum class ErrorCode {
    // configuration
    NonPositiveParameter,
    BandwidthExceeded,
    TooManyTxAntennas,
    TooFewTxAntennas,
    NotEnoughRxAntennas,
    NonPowerOfTwoAlphabet,
    AlphabetMismatch,
    NonIntegerPriLength,
    SampleRateBelowBandwidth,
    NonIntegerChipLength,
    NonPowerOfTwoModOrder,
    // codec
    OverflowGuard,
    InsufficientBits,
    InvalidHopSet,
    // waveform / channel
    PlanLengthMismatch,
    DimensionMismatch,
    ZeroRateScheme,
    // receiver
    RankDeficientChannel,
    SearchSpaceTooLarge,
    // ambiguity
    DelayOutOfRange,
    GridTooLarge,
    // harness / io
    InvalidExperiment,
    IoFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace rfpa

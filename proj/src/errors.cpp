#include "rfpa/errors.hpp"

namespace rfpa {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveParameter:     return "NonPositiveParameter";
        case ErrorCode::BandwidthExceeded:        return "BandwidthExceeded";
        case ErrorCode::TooManyTxAntennas:        return "TooManyTxAntennas";
        case ErrorCode::TooFewTxAntennas:         return "TooFewTxAntennas";
        case ErrorCode::NotEnoughRxAntennas:      return "NotEnoughRxAntennas";
        case ErrorCode::NonPowerOfTwoAlphabet:    return "NonPowerOfTwoAlphabet";
        case ErrorCode::AlphabetMismatch:         return "AlphabetMismatch";
        case ErrorCode::NonIntegerPriLength:      return "NonIntegerPriLength";
        case ErrorCode::SampleRateBelowBandwidth: return "SampleRateBelowBandwidth";
        case ErrorCode::NonIntegerChipLength:     return "NonIntegerChipLength";
        case ErrorCode::NonPowerOfTwoModOrder:    return "NonPowerOfTwoModOrder";
        case ErrorCode::OverflowGuard:            return "OverflowGuard";
        case ErrorCode::InsufficientBits:         return "InsufficientBits";
        case ErrorCode::InvalidHopSet:            return "InvalidHopSet";
        case ErrorCode::PlanLengthMismatch:       return "PlanLengthMismatch";
        case ErrorCode::DimensionMismatch:        return "DimensionMismatch";
        case ErrorCode::ZeroRateScheme:           return "ZeroRateScheme";
        case ErrorCode::RankDeficientChannel:     return "RankDeficientChannel";
        case ErrorCode::SearchSpaceTooLarge:      return "SearchSpaceTooLarge";
        case ErrorCode::DelayOutOfRange:          return "DelayOutOfRange";
        case ErrorCode::GridTooLarge:             return "GridTooLarge";
        case ErrorCode::InvalidExperiment:        return "InvalidExperiment";
        case ErrorCode::IoFailure:                return "IoFailure";
    }
    return "UnknownError";
}

} // namespace rfpa

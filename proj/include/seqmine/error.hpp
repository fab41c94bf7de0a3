#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqmine {

enum class Errc {
    EmptyElement,
    EmptyPattern,
    EmptyDatabase,
    InvalidThreshold,
    InvalidConstraints,
    InvalidSequence,
    DuplicateId,
    MixedSizes,
    MissingSubsetSupport,
    BadBatchSize,
    InvalidConfig,
    AlphabetTooLarge,
    InstanceTooLarge,
    ParseError,
    NonIntegerTime,
    DuplicateKey,
    OutOfRange,
    InvalidBands,
    InsufficientHistory,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::EmptyElement: return "EmptyElement";
    case Errc::EmptyPattern: return "EmptyPattern";
    case Errc::EmptyDatabase: return "EmptyDatabase";
    case Errc::InvalidThreshold: return "InvalidThreshold";
    case Errc::InvalidConstraints: return "InvalidConstraints";
    case Errc::InvalidSequence: return "InvalidSequence";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::MixedSizes: return "MixedSizes";
    case Errc::MissingSubsetSupport: return "MissingSubsetSupport";
    case Errc::BadBatchSize: return "BadBatchSize";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::AlphabetTooLarge: return "AlphabetTooLarge";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::ParseError: return "ParseError";
    case Errc::NonIntegerTime: return "NonIntegerTime";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InvalidBands: return "InvalidBands";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    }
    return "Unknown";
}

/// Every failure surfaced by the library. `line()` is 1-based and only
/// meaningful for the ingestion errors (0 otherwise).
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), code_(code), line_(line) {}

    Errc code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }

    /// Input-data errors as opposed to misuse of the API.
    bool is_input_error() const noexcept {
        switch (code_) {
        case Errc::ParseError:
        case Errc::NonIntegerTime:
        case Errc::DuplicateKey:
        case Errc::DuplicateId:
        case Errc::OutOfRange:
        case Errc::EmptyDatabase:
        case Errc::InvalidSequence:
        case Errc::InsufficientHistory:
            return true;
        default:
            return false;
        }
    }

  private:
    Errc code_;
    std::size_t line_;
};

} // namespace seqmine

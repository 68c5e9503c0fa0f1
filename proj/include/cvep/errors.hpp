// Error types shared across the cvep library. Each condition the
// pipeline can reject gets its own exception class so callers and
// tests can discriminate without parsing messages.

#pragma once

#include <stdexcept>
#include <string>

namespace cvep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// code generation
struct ZeroSeedError : Error { using Error::Error; };
struct NonMaximalPeriodError : Error { using Error::Error; };
struct LagOutOfRangeError : Error { using Error::Error; };
struct LagCollisionError : Error { using Error::Error; };

// signal processing
struct InvalidBandError : Error { using Error::Error; };
struct SignalTooShortError : Error { using Error::Error; };
struct ZeroVarianceError : Error { using Error::Error; };
struct ShapeMismatchError : Error { using Error::Error; };
struct PositionOutOfRangeError : Error { using Error::Error; };
struct EmptyInputError : Error { using Error::Error; };

// lexicon / dictionary
struct UnknownCharacterError : Error { using Error::Error; };
struct WordNotInDictionaryError : Error { using Error::Error; };
struct EmptyDictionaryError : Error { using Error::Error; };

// files and configuration
struct FileNotFoundError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace cvep

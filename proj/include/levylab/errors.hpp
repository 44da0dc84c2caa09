#pragma once

#include <stdexcept>
#include <string>

namespace levylab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// potential analysis
struct DegenerateExtremum : Error { using Error::Error; };
struct NoMinimum : Error { using Error::Error; };
struct NonInterlaced : Error { using Error::Error; };

// generic argument / state violations
struct DomainError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };

// limit chain
struct NotTwoWell : Error { using Error::Error; };
struct EqualDepth : Error { using Error::Error; };

// statistics
struct TooFewSamples : Error { using Error::Error; };
struct ExcessCensoring : Error { using Error::Error; };
struct UnclassifiedExcess : Error { using Error::Error; };

// experiment configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace levylab

#pragma once

#include <stdexcept>
#include <string>

namespace scatfun {

// Error taxonomy shared by all modules. Every failure mode carries a
// human-readable diagnostic; callers that can recover catch the specific type.

struct RankDeficient : std::runtime_error {
    explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

struct AliasingViolation : std::runtime_error {
    explicit AliasingViolation(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyAccumulator : std::runtime_error {
    explicit EmptyAccumulator(const std::string& what) : std::runtime_error(what) {}
};

struct CoverTooLarge : std::runtime_error {
    explicit CoverTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct SingularWeights : std::runtime_error {
    explicit SingularWeights(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateFit : std::runtime_error {
    explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scatfun

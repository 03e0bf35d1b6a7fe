#ifndef SPMITI_ERRORS_HPP
#define SPMITI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spmiti {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error("ParseError: " + msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error("ValidationError: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("ConfigError: " + msg) {}
};

struct SplitError : std::runtime_error {
    explicit SplitError(const std::string& msg) : std::runtime_error("SplitError: " + msg) {}
};

struct UnknownMetric : std::runtime_error {
    explicit UnknownMetric(const std::string& name) : std::runtime_error("UnknownMetric: " + name) {}
};

struct UnknownOverheadType : std::runtime_error {
    explicit UnknownOverheadType(const std::string& name) : std::runtime_error("UnknownOverheadType: " + name) {}
};

struct UnknownStep : std::runtime_error {
    explicit UnknownStep(const std::string& id) : std::runtime_error("UnknownStep: " + id) {}
};

struct SpaceTooLarge : std::runtime_error {
    explicit SpaceTooLarge(const std::string& msg) : std::runtime_error("SpaceTooLarge: " + msg) {}
};

struct GuardrailExceeded : std::runtime_error {
    explicit GuardrailExceeded(const std::string& msg) : std::runtime_error("GuardrailExceeded: " + msg) {}
};

struct EmptySolutionSpace : std::runtime_error {
    explicit EmptySolutionSpace(const std::string& msg) : std::runtime_error("EmptySolutionSpace: " + msg) {}
};

struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& msg) : std::runtime_error("TooLarge: " + msg) {}
};

}  // namespace spmiti

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace varigen {

enum class ErrorCode {
    UnsupportedImageShape,
    BackendUnavailable,
    EmptyText,
    DimensionMismatch,
    ZeroVector,
    CacheCorrupt,
    WordNotInLexicon,
    EmptyPositiveSet,
    ShapeMismatch,
    NegativeVariance,
    NonFiniteLoss,
    EmptyInput,
    EmptyTrainingSet,
    SingleClassInput,
    MissingMask,
    LayoutViolation,
    InsufficientImages,
    UnknownStrategy,
    DecodeFailure,
    IoFailure,
    RunNotFound,
    EmptyImageSet,
    ConfigError,
};

const char* error_code_name(ErrorCode code);

/// Whether the condition is a violated domain precondition (CLI exit 2)
/// as opposed to an internal/runtime failure (CLI exit 1).
bool is_domain_precondition(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace varigen

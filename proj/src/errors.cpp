#include "varigen/errors.hpp"

namespace varigen {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnsupportedImageShape: return "UnsupportedImageShape";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::CacheCorrupt: return "CacheCorrupt";
        case ErrorCode::WordNotInLexicon: return "WordNotInLexicon";
        case ErrorCode::EmptyPositiveSet: return "EmptyPositiveSet";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NegativeVariance: return "NegativeVariance";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::SingleClassInput: return "SingleClassInput";
        case ErrorCode::MissingMask: return "MissingMask";
        case ErrorCode::LayoutViolation: return "LayoutViolation";
        case ErrorCode::InsufficientImages: return "InsufficientImages";
        case ErrorCode::UnknownStrategy: return "UnknownStrategy";
        case ErrorCode::DecodeFailure: return "DecodeFailure";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::RunNotFound: return "RunNotFound";
        case ErrorCode::EmptyImageSet: return "EmptyImageSet";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

bool is_domain_precondition(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteLoss:
        case ErrorCode::IoFailure:
        case ErrorCode::CacheCorrupt:
            return false;
        default:
            return true;
    }
}

}  // namespace varigen

// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace panolayers {

enum class ErrorCode {
    Bounds,
    InvalidDepth,
    DegeneratePoint,
    DimensionMismatch,
    Coverage,
    UnclassifiedLabel,
    AdapterProtocol,
    DegenerateHole,
    InsufficientBoundary,
    MissingDepth,
    InvalidSplat,
    EmptyFilter,
    Divergence,
    Checksum,
    Version,
    Validation,
    Config,
    Io,
    Internal,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. `code()` identifies the
/// failure class so callers (and tests) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), mCode(code) {}

    ErrorCode code() const noexcept { return mCode; }

private:
    ErrorCode mCode;
};

inline std::string_view
to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Bounds: return "bounds error";
    case ErrorCode::InvalidDepth: return "invalid depth";
    case ErrorCode::DegeneratePoint: return "degenerate point";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::Coverage: return "coverage error";
    case ErrorCode::UnclassifiedLabel: return "unclassified label";
    case ErrorCode::AdapterProtocol: return "adapter protocol error";
    case ErrorCode::DegenerateHole: return "degenerate hole";
    case ErrorCode::InsufficientBoundary: return "insufficient boundary";
    case ErrorCode::MissingDepth: return "missing depth";
    case ErrorCode::InvalidSplat: return "invalid splat";
    case ErrorCode::EmptyFilter: return "empty layer filter";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Checksum: return "checksum mismatch";
    case ErrorCode::Version: return "version mismatch";
    case ErrorCode::Validation: return "validation error";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::Internal: return "internal error";
    }
    return "error";
}

} // namespace panolayers

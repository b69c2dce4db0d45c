// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/error.hpp"

namespace torsiongeo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularTriad: return "SingularTriad";
    case ErrorKind::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorKind::TorsionUndefined: return "TorsionUndefined";
    case ErrorKind::ChartSingularity: return "ChartSingularity";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::OriginOnContour: return "OriginOnContour";
    case ErrorKind::MetricNotPositiveDefinite: return "MetricNotPositiveDefinite";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::GridResolutionInsufficient: return "GridResolutionInsufficient";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

bool is_config_error(ErrorKind kind) {
  return kind == ErrorKind::ParseError || kind == ErrorKind::ValidationError;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace torsiongeo

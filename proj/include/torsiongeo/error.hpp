// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace torsiongeo {

enum class ErrorKind {
  SingularTriad,
  DerivativeUnavailable,
  TorsionUndefined,
  ChartSingularity,
  StepTooLarge,
  GridTooCoarse,
  GridMismatch,
  OriginOnContour,
  MetricNotPositiveDefinite,
  ParameterOutOfRange,
  NoConvergence,
  GridResolutionInsufficient,
  IllConditionedFit,
  ParseError,
  ValidationError,
  Unsupported,
};

std::string_view to_string(ErrorKind kind);

// Configuration problems map to exit code 2 in the CLI, everything else to 1.
bool is_config_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace torsiongeo

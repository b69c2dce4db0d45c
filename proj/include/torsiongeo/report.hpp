// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace torsiongeo {

// Fixed-width summary of a result.json document. Documents without results
// produce the single line "no results".
std::string format_report(const std::string& result_json);

}  // namespace torsiongeo

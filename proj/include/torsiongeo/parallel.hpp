// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace torsiongeo {

// Worker count: TORSIONGEO_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int thread_count();

// Calls body(i) for i in [begin, end) split into contiguous chunks over at
// most thread_count() threads. The first exception thrown by any chunk is
// rethrown on the calling thread.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace torsiongeo

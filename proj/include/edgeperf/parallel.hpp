// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace edgeperf
{

// Number of worker threads to use for a requested count; 0 means all cores.
int resolve_threads(int requested);

// Calls body(i) for every i in [0, n) on up to `threads` threads. Callers write
// results into slot i, so output order never depends on scheduling. The first
// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body);

}  // namespace edgeperf

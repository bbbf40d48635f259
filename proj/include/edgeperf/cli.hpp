// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace edgeperf::cli
{

// Parses argv and runs one subcommand: generate, estimate, train, predict,
// evaluate, analyze or swap. Returns the process exit code; diagnostics go
// to `err`, reports to `out`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
int run(int argc, const char *const *argv);

}  // namespace edgeperf::cli

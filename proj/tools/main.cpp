// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/cli.hpp"

int main(int argc, char **argv) { return edgeperf::cli::run(argc, argv); }

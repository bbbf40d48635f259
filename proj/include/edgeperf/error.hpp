// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace edgeperf
{

// Base exception for every recoverable error raised by the library.
class Error : public std::runtime_error
{
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace edgeperf

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iostream>

namespace risvec {

// Exit codes: 0 success, 1 usage error (usage on `err`), 2 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace risvec

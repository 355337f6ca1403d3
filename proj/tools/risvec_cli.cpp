// SPDX-License-Identifier: Apache-2.0

#include "risvec/cli.hpp"

int main(int argc, char** argv) { return risvec::run_cli(argc, argv); }

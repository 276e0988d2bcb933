// SPDX-License-Identifier: Apache-2.0

#include "csdoa/cli.hpp"

int main(int argc, char **argv) { return csdoa::cli_main(argc, argv); }

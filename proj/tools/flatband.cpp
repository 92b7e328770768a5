// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "flatband/cli.hpp"

int main(int argc, char** argv) { return flatband::run_cli(argc, argv, std::cout, std::cerr); }

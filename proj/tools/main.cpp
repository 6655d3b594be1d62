// SPDX-License-Identifier: MIT

#include <fusetrack/cli.h>

#include <iostream>

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fusetrack::Dispatch(args, std::cout, std::cerr);
}

#include <cstdlib>
#include <iostream>

#include "treeshift_cli/cli.hpp"

int main(int argc, char** argv) {
  treeshift::cli::RunResult r = treeshift::cli::run_command_line(argc, argv, std::getenv("TREESHIFT_TOL"));
  std::cout << r.report;
  return r.exit_code;
}

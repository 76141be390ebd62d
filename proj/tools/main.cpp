#include <string>
#include <vector>

#include "beamopt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return beamopt::cli_run(args);
}

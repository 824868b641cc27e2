#include <string>
#include <vector>

#include "flyatom/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flyatom::cli::run(args);
}

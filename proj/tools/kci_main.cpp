#include <string>
#include <vector>

#include "kci/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kci::cli::run(std::move(args));
}

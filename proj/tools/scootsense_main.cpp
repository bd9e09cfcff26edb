#include <vector>

#include "scootsense/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scootsense::pipeline::run_cli(args);
}

#include <string>
#include <vector>

#include "wsfit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wsfit::cli::dispatch(args);
}

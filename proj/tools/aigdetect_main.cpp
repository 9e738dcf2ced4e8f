#include <string>
#include <vector>

#include "aigdetect/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return aigdetect::dispatch(args);
}

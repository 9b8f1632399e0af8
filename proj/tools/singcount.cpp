#include <iostream>

#include "singcount/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return singcount::dispatch(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "hessflow/scenario.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return hessflow::run_cli(args, std::cout, std::cerr);
}

#include <iostream>

#include "gd_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gdcli::run(args, std::cout, std::cerr);
}

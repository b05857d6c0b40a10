#include <iostream>
#include <string>
#include <vector>

#include "ideoaudit/app/cli.hpp"

int main(int argc, char** argv) {
  return ideoaudit::app::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

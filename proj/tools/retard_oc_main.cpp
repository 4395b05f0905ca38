#include <iostream>

#include "retard_oc/cli.hpp"

int main(int argc, char** argv) {
  return retard_oc::run_cli(argc, argv, retard_oc::Registry::builtin(), std::cout, std::cerr);
}

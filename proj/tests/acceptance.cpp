#include <cstring>
#include <iostream>

#include "qlev/acceptance.hpp"

int main(int argc, char** argv) {
  bool reduced = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--reduced") == 0) reduced = true;
  auto results = qlev::acceptance::run_criteria(reduced, std::cout);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}

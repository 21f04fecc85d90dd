// Runs acceptance criteria 1-12 and prints one pass/fail line for each.
#include <iostream>

#include "gluni/verify.hpp"

int main() {
  std::size_t failed = 0;
  for (int id = 1; id <= 12; ++id) {
    const auto r = gluni::run_criterion(id);
    std::cout << gluni::format_line(r) << std::endl;
    failed += !r.pass;
  }
  std::cout << (12 - failed) << "/12 acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

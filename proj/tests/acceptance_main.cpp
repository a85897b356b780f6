// One line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>

#include <fmt/format.h>

#include "isodeform/acceptance.hpp"

int main() {
  int failed = 0;
  isodeform::acceptance::run_all([&](const isodeform::acceptance::CriterionResult& r) {
    fmt::print("{}\n", isodeform::acceptance::format_line(r));
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  fmt::print("{} criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}

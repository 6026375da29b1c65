// Runs the acceptance criteria and prints one line per criterion.
// Usage: acceptance [ID ...]   (SEED overrides the fixed seed)

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gymlab/acceptance.hpp"

int main(int argc, char** argv) {
  gymlab::acceptance::Options opt;
  if (const char* s = std::getenv("SEED")) opt.seed = std::strtoull(s, nullptr, 10);
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty()) ids = gymlab::acceptance::ids();
  int failed = 0;
  for (const auto& id : ids) {
    try {
      const auto r = gymlab::acceptance::run(id, opt);
      std::printf("%-4s %s  %-42s value=%-11.4g tol=%-9.3g %6.2fs/%gs  %s\n", r.id.c_str(), r.passed ? "PASS" : "FAIL",
                  r.title.c_str(), r.value, r.tolerance, r.seconds, r.budget, r.detail.c_str());
      failed += !r.passed;
    } catch (const std::exception& e) {
      std::printf("%-4s FAIL  error: %s\n", id.c_str(), e.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(ids.size()) - failed, ids.size());
  return failed ? 1 : 0;
}

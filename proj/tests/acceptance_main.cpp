// Acceptance gate: runs every release criterion and prints one line per check.
#include <cstdio>

#include "scrt/verify.hpp"

int main() {
  std::vector<scrt::CheckResult> results = scrt::run_all();
  bool all_pass = true;
  for (const scrt::CheckResult& r : results) {
    if (r.pass) {
      std::printf("[%2d] PASS %-32s (%.3f s)\n", r.id, r.name.c_str(), r.seconds);
    } else {
      all_pass = false;
      std::printf("[%2d] FAIL %-32s (%.3f s): %s\n", r.id, r.name.c_str(), r.seconds,
                  r.detail.c_str());
    }
  }
  std::printf("%s\n", all_pass ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL");
  return all_pass ? 0 : 1;
}

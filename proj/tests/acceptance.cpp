// Acceptance runner: one line per criterion, PASS/FAIL with wall time against
// its budget.  A criterion that passes its check but overruns the budget
// fails here; the JSON verdict itself never carries timings.

#include "rwrt/verify.hpp"

#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

using namespace rwrt;

namespace {

double budget(int id) {
  for (const auto& c : criterion_table())
    if (c.id == id) return c.budget_seconds;
  return 0.0;
}

}  // namespace

int main(int argc, char** argv) {
  VerifyConfig config;
  std::string json_out;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--json") == 0 && i + 1 < argc) {
      json_out = argv[++i];
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      config.seed = std::stoull(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--json FILE] [--seed N]\n";
      return 2;
    }
  }

  int failures = 0;
  const auto results = run_suite(config, [&](const CriterionResult& r) {
    const double limit = budget(r.id);
    const bool in_time = r.seconds <= limit;
    const bool ok = r.passed() && in_time;
    failures += ok ? 0 : 1;
    std::printf("%s  criterion %2d  %-40s %8.2fs / %6.0fs%s%s\n", ok ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, limit, in_time ? "" : "  (over budget)", r.error.empty() ? "" : ("  " + r.error).c_str());
    std::fflush(stdout);
  });
  if (!json_out.empty()) write_json(json_out, suite_json(config, results));
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}

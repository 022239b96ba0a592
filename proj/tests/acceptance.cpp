// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]... [--fast] [--seed S]

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "rbmld/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> ids;
  rbmld::AcceptanceOptions opt;
  app.add_option("--criterion", ids);
  app.add_flag("--fast", opt.fast);
  app.add_option("--seed", opt.seed);
  app.add_option("--workers", opt.workers);
  CLI11_PARSE(app, argc, argv);
  if (ids.empty()) ids = rbmld::criterion_ids();

  int failed = 0;
  for (int id : ids) {
    const auto r = rbmld::run_criterion(id, opt);
    std::cout << rbmld::report_line(r) << std::endl;
    std::fprintf(stderr, "C%02d: %.1f s (budget %.0f s)\n", r.id, r.seconds, r.budget_seconds);
    if (!r.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

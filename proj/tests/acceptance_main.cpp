// Acceptance suite: runs the numbered criteria end to end and prints one
// pass/fail line per criterion (plus the per-check rows underneath).
// Usage: pdflow_acceptance [index|all] [--quick]

#include <cstring>
#include <iostream>
#include <string>

#include "pdflow/csvio.hpp"
#include "pdflow/experiments.hpp"

using namespace pdflow;

int main(int argc, char** argv) {
  int only = 0;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else if (std::strcmp(argv[i], "all") != 0) {
      only = std::atoi(argv[i]);
      if (only < 1 || only > criterion_count()) {
        std::cerr << "criterion index must be 1.." << criterion_count() << "\n";
        return 2;
      }
    }
  }

  bool all_pass = true;
  for (int c = 1; c <= criterion_count(); ++c) {
    if (only != 0 && c != only) continue;
    CriterionResult res;
    try {
      res = run_criterion(c, quick);
    } catch (const std::exception& e) {
      std::cout << "[FAIL] criterion " << c << ": " << criterion_name(c)
                << " (exception: " << e.what() << ")\n";
      all_pass = false;
      continue;
    }
    std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c
              << ": " << res.name << "\n";
    for (const StatReport& row : res.rows) {
      std::cout << "    " << (row.pass ? "ok   " : "FAIL ") << row.kind
                << " estimate=" << format_double(row.estimate)
                << " reference=" << format_double(row.reference)
                << " z=" << format_double(row.z);
      if (row.ks_p) std::cout << " ks_p=" << format_double(*row.ks_p);
      if (!row.note.empty()) std::cout << " | " << row.note;
      std::cout << "\n";
    }
    all_pass = all_pass && res.pass;
  }
  return all_pass ? 0 : 1;
}

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "sparsetree/acceptance.hpp"

// Usage: acceptance_tests [--quick] [--known-failure N]... [criterion ids...]
// A known failure still prints FAIL; it only stops that criterion from failing the run.
int main(int argc, char** argv) {
  sparsetree::AcceptanceOptions options;
  std::vector<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--quick") {
      options.quick = true;
    } else if (arg == "--known-failure" && i + 1 < argc) {
      known.push_back(std::atoi(argv[++i]));
    } else {
      options.only.push_back(std::atoi(arg.c_str()));
    }
  }
  const auto results = sparsetree::run_acceptance(options, [](const sparsetree::CriterionResult& r) {
    std::cout << sparsetree::format_result_line(r) << std::endl;
  });
  std::size_t passed = 0;
  int unexpected = 0;
  for (const auto& r : results) {
    if (r.passed) {
      ++passed;
    } else if (std::find(known.begin(), known.end(), r.id) != known.end()) {
      std::cout << "criterion " << r.id << " failed as documented (known failure)" << std::endl;
    } else {
      ++unexpected;
    }
  }
  std::cout << passed << "/" << results.size() << " criteria passed";
  if (unexpected > 0) std::cout << ", " << unexpected << " unexpected failure(s)";
  std::cout << std::endl;
  return unexpected == 0 ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sparsetree/segmentation.hpp"

namespace sparsetree {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; exceeding it fails the criterion
};

struct AcceptanceOptions {
  bool quick = false;   // smaller instance counts and volumes, same thresholds
  unsigned workers = 0;
  std::vector<int> only;  // empty = every criterion
};

/// Runs the acceptance criteria in order. `on_result` (optional) is called as each finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result_line(const CriterionResult& r);

/// A path in the sparse tree described by depths only: x1 at depth `start_depth`, climbing
/// `up` steps to the branch point, then descending `down` steps to v. Lets the segmentation
/// be exercised on paths far deeper than any ball that fits in memory.
struct PathShape {
  TreeParams tree;
  int L0 = 5;
  std::int64_t start_depth = 0;
  std::int64_t up = 0;
  std::int64_t down = 0;

  LineGeometry geometry() const;
};

/// Draws a PathShape satisfying the segmentation preconditions: k in {2,3,4},
/// gamma in [1.3, 3], L0 in [5, 12]. Deterministic in (seed, index).
PathShape sample_segmentation_instance(std::uint64_t seed, std::uint64_t index);

}  // namespace sparsetree

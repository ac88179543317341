#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsetree/tree.hpp"

namespace sparsetree {

/// The geometry of a path as seen from its start: its length d(x1, v) and the offsets of
/// the junctions it carries (0 = x1, length = v), ascending.
struct LineGeometry {
  std::int64_t length = 0;
  std::vector<std::int64_t> junction_offsets;

  static LineGeometry of_path(const TreeBall& ball, const PathSegment& p);

  /// Distance from the vertex at `offset` to the first junction at or after it.
  std::optional<std::int64_t> junction_distance(std::int64_t offset) const;
  /// Junction offsets inside the closed interval [from, to].
  std::vector<std::int64_t> junctions_between(std::int64_t from, std::int64_t to) const;
};

struct SegmentPair {
  std::int64_t x_offset = 0;
  std::int64_t v_offset = 0;
  VertexId x = kNoVertex;  // filled by segment_path; kNoVertex for bare geometry
  VertexId v = kNoVertex;
};

struct SegmentationResult {
  std::vector<SegmentPair> pairs;
  int L0 = 0;
  std::int64_t path_length = 0;

  std::size_t count() const { return pairs.size(); }
};

/// A violated precondition of the path segmentation, with the measured value.
class SegmentationError : public std::invalid_argument {
 public:
  SegmentationError(std::string condition, std::string measured);
  const std::string& condition() const { return condition_; }
  const std::string& measured() const { return measured_; }

 private:
  std::string condition_;
  std::string measured_;
};

/// Cuts a path into vertex pairs (x_j, v_j):
///   - v_j lies L0 beyond x_j when the junction distance J(x_j) >= 3 L0, else 5 L0 beyond;
///   - x_{j+1} lies 3 beyond v_j;
///   - once d(x_{j+1}, v) <= 7 L0, v_{j+1} = v and the construction stops.
/// Preconditions: L0 >= 1, length > 7 L0, J(x1) > L0, consecutive junctions more than
/// 8 L0 apart.
SegmentationResult segment_line(const LineGeometry& line, int L0);

/// segment_line on the path from x1 to v in the ball. Additionally requires L0 >= 5.
SegmentationResult segment_path(const TreeBall& ball, VertexId x1, VertexId v, int L0);

inline constexpr int kMinL0 = 5;

struct PropertyCheck {
  bool passed = true;
  std::string witness;  // first offending pair, empty when passed
};

/// The four properties the segmentation guarantees, plus structural checks.
///   1. J(x_j) >= L0 for every j.
///   2. v_j is at least L0 from the junction on L(x_j, v_j), if there is one.
///   3. d(x_j, v_j) >= L0.
///   4. l >= d(x1, v) / (5 L0 + 3).
struct SegmentationReport {
  bool well_formed = true;  // pairs ordered on the path, spacing 3, ends at v
  std::string structure_witness;
  bool single_junction = true;  // every L(x_j, v_j) holds at most one junction
  std::array<PropertyCheck, 4> properties;

  bool all_passed() const;
};

SegmentationReport verify_segmentation(const LineGeometry& line, const SegmentationResult& result);

/// Offsets are recomputed from the ids in `result` along the path from its first x to v.
SegmentationReport verify_segmentation(const TreeBall& ball, const SegmentationResult& result,
                                       VertexId v);

}  // namespace sparsetree

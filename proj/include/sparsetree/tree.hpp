#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsetree {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

/// Default vertex cap for materialized balls.
inline constexpr std::uint64_t kDefaultVertexCap = 5'000'000;

/// Parameters of a ball B(r) in the sparse tree with branching k and stretch gamma.
///
/// Junctions sit at depth 0 and at every depth R_N = floor(gamma) + ... + floor(gamma^N).
/// A junction has k forward neighbors, every other vertex exactly one. gamma = 1 gives
/// the Bethe lattice (every vertex branches).
struct TreeParams {
  int k = 2;
  double gamma = 2.0;
  std::int64_t radius = 0;

  void validate() const;
  bool operator==(const TreeParams&) const = default;
};

/// Raised when a ball would exceed the configured vertex cap.
class BallTooLarge : public std::length_error {
 public:
  BallTooLarge(std::uint64_t projected, std::uint64_t cap);
  std::uint64_t projected_size() const { return projected_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t projected_;
  std::uint64_t cap_;
};

/// floor(gamma^j), snapped to the nearest integer when gamma^j lies within 1e-9 of it.
std::int64_t stretch_length(double gamma, int j);

/// R_n, the depth of the n-th junction shell (n >= 1).
std::int64_t shell_radius(const TreeParams& params, int n);

/// All junction depths {0, R_1, R_2, ...} that are <= max_depth, ascending.
std::vector<std::int64_t> junction_depths(const TreeParams& params, std::int64_t max_depth);

/// #B(r) in closed form, without building the tree. Throws std::overflow_error when the
/// count does not fit in 64 bits.
std::uint64_t ball_size_exact(const TreeParams& params, std::int64_t r);

/// log #B(r) / log r. Converges to 1 + log k / log gamma.
double dimension_estimate(const TreeParams& params, std::int64_t r);

/// The r -> infinity limit 1 + log k / log gamma.
double dimension_limit(const TreeParams& params);

struct Bond {
  VertexId inside;
  VertexId outside;
  bool operator==(const Bond&) const = default;
};

/// Explicit finite ball of a rooted tree. Vertex ids are breadth-first with children in
/// creation order, so the children of a vertex occupy a contiguous id range and every
/// parent id is smaller than its children's ids. Immutable after construction.
class TreeBall {
 public:
  enum class Shape { sparse_tree, line };

  /// Ball B(radius) of the sparse tree described by params.
  static TreeBall build(const TreeParams& params, std::uint64_t vertex_cap = kDefaultVertexCap);

  /// A segment of Z with `sites` vertices, rooted at its left end. Has no junctions.
  static TreeBall line(std::size_t sites);

  Shape shape() const { return shape_; }
  const TreeParams& params() const { return params_; }
  std::size_t size() const { return depth_.size(); }
  bool contains(VertexId x) const { return x < depth_.size(); }

  std::int64_t depth(VertexId x) const { return depth_[x]; }
  std::optional<VertexId> parent(VertexId x) const;
  bool is_junction(VertexId x) const { return junction_[x] != 0; }
  auto children(VertexId x) const {
    return std::views::iota(first_child_[x], first_child_[x] + child_count_[x]);
  }
  std::size_t child_count(VertexId x) const { return child_count_[x]; }

  /// Neighbors inside the ball: parent first (if any), then children.
  std::vector<VertexId> neighbors(VertexId x) const;

  /// Degree in the infinite graph the ball is cut from (not the degree inside the ball).
  int full_degree(VertexId x) const;

  bool adjacent(VertexId x, VertexId y) const;
  VertexId lowest_common_ancestor(VertexId x, VertexId y) const;
  std::int64_t distance(VertexId x, VertexId y) const;

  /// Leftmost descending ray from the root: root, first child, its first child, ...
  std::vector<VertexId> leftmost_ray() const;

  /// Throws std::out_of_range naming the offending id.
  void require(VertexId x) const;

 private:
  TreeBall() = default;

  Shape shape_ = Shape::sparse_tree;
  TreeParams params_;
  std::vector<std::int64_t> depth_;
  std::vector<VertexId> parent_;
  std::vector<VertexId> first_child_;
  std::vector<std::uint8_t> child_count_;
  std::vector<std::uint8_t> junction_;
};

inline TreeBall build_ball(const TreeParams& params, std::uint64_t vertex_cap = kDefaultVertexCap) {
  return TreeBall::build(params, vertex_cap);
}

/// Ordered vertex list of the unique path from x to y.
using PathSegment = std::vector<VertexId>;

PathSegment path(const TreeBall& ball, VertexId x, VertexId y);

/// Distance from x to the nearest junction on the path from x to v, counting x itself.
/// Empty when the path carries no junction.
std::optional<std::int64_t> junction_distance(const TreeBall& ball, VertexId x, VertexId v);

/// A set of vertices of one ambient ball, kept sorted and unique.
class Region {
 public:
  Region() = default;
  Region(const TreeBall& ball, std::vector<VertexId> ids);
  static Region whole(const TreeBall& ball);

  std::span<const VertexId> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(VertexId x) const;
  bool operator==(const Region&) const = default;

 private:
  std::vector<VertexId> ids_;
};

/// Bonds (x, x') with x in omega and x' an in-ball neighbor outside omega. Bonds that
/// would leave the ambient ball are never produced.
std::vector<Bond> theta(const TreeBall& ball, const Region& omega);

/// All vertices within `steps` of omega.
Region expand(const TreeBall& ball, const Region& omega, int steps);

/// Vertices of omega with an in-ball neighbor outside omega.
Region boundary_vertices(const TreeBall& ball, const Region& omega);

}  // namespace sparsetree

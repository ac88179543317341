#include "sparsetree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sparsetree {

namespace {

constexpr int kMaxBranching = 255;

bool checked_add(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_add_overflow(a, b, &out);
}

bool checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_mul_overflow(a, b, &out);
}

}  // namespace

void TreeParams::validate() const {
  if (k < 2 || k > kMaxBranching) {
    throw std::invalid_argument("k must lie in [2, " + std::to_string(kMaxBranching) +
                                "], got " + std::to_string(k));
  }
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be a finite number >= 1, got " + std::to_string(gamma));
  }
  if (radius < 0) {
    throw std::invalid_argument("radius must be >= 0, got " + std::to_string(radius));
  }
}

BallTooLarge::BallTooLarge(std::uint64_t projected, std::uint64_t cap)
    : std::length_error("ball would hold " + std::to_string(projected) +
                        " vertices, above the cap of " + std::to_string(cap)),
      projected_(projected),
      cap_(cap) {}

std::int64_t stretch_length(double gamma, int j) {
  if (j < 0) throw std::invalid_argument("stretch exponent must be >= 0");
  const long double p = std::pow(static_cast<long double>(gamma), j);
  if (!(p < 4.0e18L)) throw std::overflow_error("gamma^" + std::to_string(j) + " overflows");
  const long double nearest = std::nearbyint(p);
  if (std::fabs(p - nearest) <= 1e-9L) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(p));
}

std::int64_t shell_radius(const TreeParams& params, int n) {
  if (n < 1) throw std::invalid_argument("shell index must be >= 1, got " + std::to_string(n));
  std::int64_t sum = 0;
  for (int j = 1; j <= n; ++j) {
    if (__builtin_add_overflow(sum, stretch_length(params.gamma, j), &sum)) {
      throw std::overflow_error("shell radius overflows");
    }
  }
  return sum;
}

std::vector<std::int64_t> junction_depths(const TreeParams& params, std::int64_t max_depth) {
  std::vector<std::int64_t> out{0};
  std::int64_t depth = 0;
  for (int j = 1;; ++j) {
    const auto step = stretch_length(params.gamma, j);
    if (step > max_depth - depth) break;
    depth += step;
    out.push_back(depth);
  }
  return out;
}

std::uint64_t ball_size_exact(const TreeParams& params, std::int64_t r) {
  if (r < 0) throw std::invalid_argument("radius must be >= 0");
  // Depths d in (R_N, R_{N+1}] hold k^{N+1} vertices each.
  std::uint64_t total = 1;
  std::uint64_t shell = 1;
  std::int64_t lower = 0;
  for (int j = 1; lower < r; ++j) {
    if (!checked_mul(shell, static_cast<std::uint64_t>(params.k), shell)) {
      throw std::overflow_error("ball size overflows 64 bits");
    }
    const std::int64_t upper = std::min<std::int64_t>(r, lower + stretch_length(params.gamma, j));
    std::uint64_t block = 0;
    if (!checked_mul(shell, static_cast<std::uint64_t>(upper - lower), block) ||
        !checked_add(total, block, total)) {
      throw std::overflow_error("ball size overflows 64 bits");
    }
    lower = upper;
  }
  return total;
}

double dimension_estimate(const TreeParams& params, std::int64_t r) {
  if (r < 2) throw std::invalid_argument("dimension estimate needs r >= 2");
  if (!(params.gamma > 1.0)) {
    throw std::invalid_argument("dimension is undefined for gamma = 1 (the Bethe lattice)");
  }
  return std::log(static_cast<double>(ball_size_exact(params, r))) / std::log(static_cast<double>(r));
}

double dimension_limit(const TreeParams& params) {
  if (!(params.gamma > 1.0)) {
    throw std::invalid_argument("dimension is undefined for gamma = 1 (the Bethe lattice)");
  }
  return 1.0 + std::log(static_cast<double>(params.k)) / std::log(params.gamma);
}

TreeBall TreeBall::build(const TreeParams& params, std::uint64_t vertex_cap) {
  params.validate();
  std::uint64_t projected = 0;
  try {
    projected = ball_size_exact(params, params.radius);
  } catch (const std::overflow_error&) {
    throw BallTooLarge(std::numeric_limits<std::uint64_t>::max(), vertex_cap);
  }
  if (projected > vertex_cap || projected >= kNoVertex) throw BallTooLarge(projected, vertex_cap);

  TreeBall ball;
  ball.params_ = params;
  const auto n = static_cast<std::size_t>(projected);
  ball.depth_.reserve(n);
  ball.parent_.reserve(n);
  ball.first_child_.reserve(n);
  ball.child_count_.reserve(n);
  ball.junction_.reserve(n);

  const auto junctions = junction_depths(params, params.radius);
  std::size_t next_junction = 0;  // index into junctions, advanced as BFS depth grows

  ball.depth_.push_back(0);
  ball.parent_.push_back(kNoVertex);
  for (VertexId x = 0; x < ball.depth_.size(); ++x) {
    const std::int64_t d = ball.depth_[x];
    while (next_junction < junctions.size() && junctions[next_junction] < d) ++next_junction;
    const bool junction = next_junction < junctions.size() && junctions[next_junction] == d;
    ball.junction_.push_back(junction ? 1 : 0);
    const auto first = static_cast<VertexId>(ball.depth_.size());
    ball.first_child_.push_back(first);
    if (d >= params.radius) {
      ball.child_count_.push_back(0);
      continue;
    }
    const int count = junction ? params.k : 1;
    ball.child_count_.push_back(static_cast<std::uint8_t>(count));
    for (int c = 0; c < count; ++c) {
      ball.depth_.push_back(d + 1);
      ball.parent_.push_back(x);
    }
  }
  return ball;
}

TreeBall TreeBall::line(std::size_t sites) {
  if (sites == 0) throw std::invalid_argument("a line needs at least one site");
  if (sites >= kNoVertex) throw BallTooLarge(sites, kNoVertex - 1);
  TreeBall ball;
  ball.shape_ = Shape::line;
  ball.params_ = TreeParams{2, std::numeric_limits<double>::infinity(),
                            static_cast<std::int64_t>(sites - 1)};
  ball.depth_.resize(sites);
  ball.parent_.resize(sites);
  ball.first_child_.resize(sites);
  ball.child_count_.resize(sites);
  ball.junction_.assign(sites, 0);
  for (std::size_t i = 0; i < sites; ++i) {
    ball.depth_[i] = static_cast<std::int64_t>(i);
    ball.parent_[i] = i == 0 ? kNoVertex : static_cast<VertexId>(i - 1);
    ball.first_child_[i] = static_cast<VertexId>(i + 1);
    ball.child_count_[i] = i + 1 < sites ? 1 : 0;
  }
  return ball;
}

std::optional<VertexId> TreeBall::parent(VertexId x) const {
  if (parent_[x] == kNoVertex) return std::nullopt;
  return parent_[x];
}

std::vector<VertexId> TreeBall::neighbors(VertexId x) const {
  std::vector<VertexId> out;
  out.reserve(child_count_[x] + 1u);
  if (parent_[x] != kNoVertex) out.push_back(parent_[x]);
  for (auto c : children(x)) out.push_back(c);
  return out;
}

int TreeBall::full_degree(VertexId x) const {
  if (shape_ == Shape::line) return 2;
  if (!is_junction(x)) return 2;
  return x == 0 ? params_.k : params_.k + 1;
}

bool TreeBall::adjacent(VertexId x, VertexId y) const {
  return (parent_[x] == y && y != kNoVertex) || (parent_[y] == x && x != kNoVertex);
}

VertexId TreeBall::lowest_common_ancestor(VertexId x, VertexId y) const {
  while (depth_[x] > depth_[y]) x = parent_[x];
  while (depth_[y] > depth_[x]) y = parent_[y];
  while (x != y) {
    x = parent_[x];
    y = parent_[y];
  }
  return x;
}

std::int64_t TreeBall::distance(VertexId x, VertexId y) const {
  require(x);
  require(y);
  return depth_[x] + depth_[y] - 2 * depth_[lowest_common_ancestor(x, y)];
}

std::vector<VertexId> TreeBall::leftmost_ray() const {
  std::vector<VertexId> ray{0};
  while (child_count_[ray.back()] > 0) ray.push_back(first_child_[ray.back()]);
  return ray;
}

void TreeBall::require(VertexId x) const {
  if (!contains(x)) {
    throw std::out_of_range("vertex id " + std::to_string(x) + " is outside the ball of " +
                            std::to_string(size()) + " vertices");
  }
}

PathSegment path(const TreeBall& ball, VertexId x, VertexId y) {
  ball.require(x);
  ball.require(y);
  PathSegment up;
  PathSegment down;
  while (ball.depth(x) > ball.depth(y)) {
    up.push_back(x);
    x = *ball.parent(x);
  }
  while (ball.depth(y) > ball.depth(x)) {
    down.push_back(y);
    y = *ball.parent(y);
  }
  while (x != y) {
    up.push_back(x);
    down.push_back(y);
    x = *ball.parent(x);
    y = *ball.parent(y);
  }
  up.push_back(x);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

std::optional<std::int64_t> junction_distance(const TreeBall& ball, VertexId x, VertexId v) {
  const auto p = path(ball, x, v);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (ball.is_junction(p[i])) return static_cast<std::int64_t>(i);
  }
  return std::nullopt;
}

Region::Region(const TreeBall& ball, std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  if (!ids_.empty()) ball.require(ids_.back());
}

Region Region::whole(const TreeBall& ball) {
  std::vector<VertexId> ids(ball.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<VertexId>(i);
  return Region(ball, std::move(ids));
}

bool Region::contains(VertexId x) const {
  return std::binary_search(ids_.begin(), ids_.end(), x);
}

std::vector<Bond> theta(const TreeBall& ball, const Region& omega) {
  std::vector<Bond> out;
  for (auto x : omega.ids()) {
    for (auto y : ball.neighbors(x)) {
      if (!omega.contains(y)) out.push_back({x, y});
    }
  }
  return out;
}

Region expand(const TreeBall& ball, const Region& omega, int steps) {
  if (steps < 0) throw std::invalid_argument("expansion steps must be >= 0");
  std::vector<VertexId> members(omega.ids().begin(), omega.ids().end());
  std::vector<VertexId> frontier = members;
  for (int s = 0; s < steps && !frontier.empty(); ++s) {
    const Region current(ball, members);
    std::vector<VertexId> next;
    for (auto x : frontier) {
      for (auto y : ball.neighbors(x)) {
        if (!current.contains(y)) next.push_back(y);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    members.insert(members.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return Region(ball, std::move(members));
}

Region boundary_vertices(const TreeBall& ball, const Region& omega) {
  std::vector<VertexId> out;
  for (auto x : omega.ids()) {
    for (auto y : ball.neighbors(x)) {
      if (!omega.contains(y)) {
        out.push_back(x);
        break;
      }
    }
  }
  return Region(ball, std::move(out));
}

}  // namespace sparsetree

#include "sparsetree/hamiltonian.hpp"

#include <stdexcept>
#include <string>

namespace sparsetree {

std::string_view to_string(LaplacianKind kind) {
  return kind == LaplacianKind::adjacency ? "adjacency" : "graph";
}

LaplacianKind parse_laplacian_kind(std::string_view name) {
  if (name == "adjacency") return LaplacianKind::adjacency;
  if (name == "graph") return LaplacianKind::graph;
  throw std::invalid_argument("unknown laplacian '" + std::string(name) +
                              "' (expected adjacency or graph)");
}

HamiltonianMatrix::HamiltonianMatrix(std::shared_ptr<const TreeBall> ball, LaplacianKind kind,
                                     std::vector<double> diagonal, std::vector<std::uint8_t> active)
    : ball_(std::move(ball)), kind_(kind), diagonal_(std::move(diagonal)), active_(std::move(active)) {
  if (!ball_) throw std::invalid_argument("hamiltonian needs a ball");
  if (diagonal_.size() != ball_->size() || active_.size() != ball_->size()) {
    throw std::invalid_argument("hamiltonian arrays do not match the ball size");
  }
  active_[0] = 0;
}

double HamiltonianMatrix::entry(VertexId x, VertexId y) const {
  ball_->require(x);
  ball_->require(y);
  if (x == y) return diagonal_[x];
  const auto px = ball_->parent(x);
  if (px && *px == y) return active_[x] ? 1.0 : 0.0;
  const auto py = ball_->parent(y);
  if (py && *py == x) return active_[y] ? 1.0 : 0.0;
  return 0.0;
}

std::vector<Bond> HamiltonianMatrix::active_bonds() const {
  std::vector<Bond> out;
  for (VertexId c = 1; c < size(); ++c) {
    if (active_[c]) out.push_back({*ball_->parent(c), c});
  }
  return out;
}

Eigen::SparseMatrix<double> HamiltonianMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * size());
  for (VertexId x = 0; x < size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    if (diagonal_[x] != 0.0) triplets.emplace_back(i, i, diagonal_[x]);
    if (active_[x]) {
      const auto p = static_cast<Eigen::Index>(*ball_->parent(x));
      triplets.emplace_back(i, p, 1.0);
      triplets.emplace_back(p, i, 1.0);
    }
  }
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

HamiltonianMatrix assemble(std::shared_ptr<const TreeBall> ball, LaplacianKind kind,
                           std::span<const double> potential, double lambda) {
  if (!ball) throw std::invalid_argument("assemble needs a ball");
  if (potential.size() != ball->size()) {
    throw std::invalid_argument("potential has " + std::to_string(potential.size()) +
                                " entries, ball has " + std::to_string(ball->size()) + " vertices");
  }
  std::vector<double> diagonal(ball->size());
  for (VertexId x = 0; x < ball->size(); ++x) {
    diagonal[x] = lambda * potential[x];
    if (kind == LaplacianKind::graph) diagonal[x] -= ball->full_degree(x);
  }
  std::vector<std::uint8_t> active(ball->size(), 1);
  return HamiltonianMatrix(std::move(ball), kind, std::move(diagonal), std::move(active));
}

HamiltonianMatrix restrict_dirichlet(const HamiltonianMatrix& h, const Region& omega) {
  std::vector<std::uint8_t> active(h.edge_flags().begin(), h.edge_flags().end());
  const auto& ball = h.ball();
  for (const auto& b : theta(ball, omega)) {
    const auto child = ball.parent(b.inside) == b.outside ? b.inside : b.outside;
    active[child] = 0;
  }
  return HamiltonianMatrix(h.ball_ptr(), h.kind(),
                           std::vector<double>(h.diagonal().begin(), h.diagonal().end()),
                           std::move(active));
}

HamiltonianMatrix restrict_outside(const HamiltonianMatrix& h, const Region& omega) {
  std::vector<std::uint8_t> active(h.size(), 0);
  const auto& ball = h.ball();
  for (auto x : omega.ids()) {
    const auto p = ball.parent(x);
    if (p && h.edge_active(x) && omega.contains(*p)) active[x] = 1;
  }
  return HamiltonianMatrix(h.ball_ptr(), h.kind(),
                           std::vector<double>(h.diagonal().begin(), h.diagonal().end()),
                           std::move(active));
}

Eigen::SparseMatrix<double> hopping_difference(const HamiltonianMatrix& h, const Region& omega) {
  const auto& ball = h.ball();
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& b : theta(ball, omega)) {
    const auto child = ball.parent(b.inside) == b.outside ? b.inside : b.outside;
    if (!h.edge_active(child)) continue;
    triplets.emplace_back(static_cast<Eigen::Index>(b.inside), static_cast<Eigen::Index>(b.outside), 1.0);
    triplets.emplace_back(static_cast<Eigen::Index>(b.outside), static_cast<Eigen::Index>(b.inside), 1.0);
  }
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::SparseMatrix<double> t(n, n);
  t.setFromTriplets(triplets.begin(), triplets.end());
  return t;
}

}  // namespace sparsetree

#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "sparsetree/tree.hpp"

namespace sparsetree {

/// adjacency: (Lf)(x) = sum of f over neighbors.
/// graph:     (Lf)(x) = sum of f over neighbors - deg(x) f(x).
enum class LaplacianKind { adjacency, graph };

std::string_view to_string(LaplacianKind kind);
LaplacianKind parse_laplacian_kind(std::string_view name);

/// Real symmetric operator Laplacian + lambda V on a tree ball.
///
/// Every hopping term equals 1 and sits on a tree edge, so the off-diagonal part is stored
/// as one activity flag per edge, indexed by the edge's child vertex. Restrictions only
/// switch edges off; the diagonal is never touched.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(std::shared_ptr<const TreeBall> ball, LaplacianKind kind,
                    std::vector<double> diagonal, std::vector<std::uint8_t> active);

  const TreeBall& ball() const { return *ball_; }
  const std::shared_ptr<const TreeBall>& ball_ptr() const { return ball_; }
  LaplacianKind kind() const { return kind_; }
  std::size_t size() const { return diagonal_.size(); }

  std::span<const double> diagonal() const { return diagonal_; }
  double diagonal(VertexId x) const { return diagonal_[x]; }

  /// Whether the edge between `child` and its parent carries a hopping term.
  bool edge_active(VertexId child) const { return active_[child] != 0; }
  std::span<const std::uint8_t> edge_flags() const { return active_; }

  double entry(VertexId x, VertexId y) const;
  std::vector<Bond> active_bonds() const;
  Eigen::SparseMatrix<double> to_sparse() const;

 private:
  std::shared_ptr<const TreeBall> ball_;
  LaplacianKind kind_;
  std::vector<double> diagonal_;
  std::vector<std::uint8_t> active_;
};

/// H = L + lambda V on the whole ball, with every in-ball edge active. For the graph kind
/// the diagonal uses the degree in the infinite tree, also at the edge of the ball.
HamiltonianMatrix assemble(std::shared_ptr<const TreeBall> ball, LaplacianKind kind,
                           std::span<const double> potential, double lambda);

/// H_Omega: hopping terms across theta(omega) removed.
HamiltonianMatrix restrict_dirichlet(const HamiltonianMatrix& h, const Region& omega);

/// H^Omega: only hopping terms with both endpoints in omega survive.
HamiltonianMatrix restrict_outside(const HamiltonianMatrix& h, const Region& omega);

/// T_Omega = H - H_Omega: the hopping terms of h that cross theta(omega).
Eigen::SparseMatrix<double> hopping_difference(const HamiltonianMatrix& h, const Region& omega);

}  // namespace sparsetree

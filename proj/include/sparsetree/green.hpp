#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparsetree/hamiltonian.hpp"

namespace sparsetree {

using Complex = std::complex<double>;

/// Smallest imaginary part accepted for the spectral parameter.
inline constexpr double kEtaFloor = 1e-8;

/// z = energy + i eta, restricted to the open upper half-plane.
struct SpectralPoint {
  double energy = 0.0;
  double eta = 1.0;

  Complex z() const { return {energy, eta}; }
  /// Throws std::invalid_argument when eta < kEtaFloor or either part is not finite.
  void validate() const;
};

/// Column y of (H - z)^{-1}, i.e. u[x] = G(x, y; z).
///
/// Solved exactly by eliminating leaves first: children before parents in reverse
/// breadth-first order, then a forward sweep from each component root. The active graph
/// is a forest, so the elimination has no fill-in and costs O(#vertices).
std::vector<Complex> resolvent_column(const HamiltonianMatrix& h, VertexId y, SpectralPoint z);

/// Same as above, writing into `out` (resized as needed) and reusing `pivots` as scratch.
void resolvent_column(const HamiltonianMatrix& h, VertexId y, SpectralPoint z,
                      std::vector<Complex>& out, std::vector<Complex>& pivots);

Complex green_entry(const HamiltonianMatrix& h, VertexId x, VertexId y, SpectralPoint z);

inline constexpr std::size_t kDenseOracleCap = 2000;

/// Full (H - z)^{-1} by dense LU. Verification only.
Eigen::MatrixXcd dense_oracle(const HamiltonianMatrix& h, SpectralPoint z,
                              std::size_t max_size = kDenseOracleCap);

/// Both sides of the double resolvent expansion of G(x, w; z) around the path L = L(x, y):
///
///   G(x,w) = sum_{(u,u') in theta(L)} sum_{(v,v') in theta(L++)}
///            G_L(x,u) T_L(u,u') G(u',v) T_{L++}(v,v') G_{L++}(v',w)
///
/// where G_Omega is the resolvent of restrict_dirichlet(h, Omega) and T_Omega the
/// corresponding hopping difference. Every restricted operator is rebuilt on each call.
struct ResolventExpansion {
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
  std::size_t inner_bonds = 0;             // |theta(L)|
  std::size_t outer_bonds = 0;             // |theta(L++)|
  std::size_t contributing_outer_bonds = 0;  // outer bonds with G_{L++}(v', w) != 0
};

/// Requires y on the path from x to w and w outside L(x, y)++.
ResolventExpansion check_resolvent_identity(const HamiltonianMatrix& h, VertexId x, VertexId y,
                                            VertexId w, SpectralPoint z);

}  // namespace sparsetree

#include "sparsetree/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sparsetree {

namespace {
constexpr double kTiny = std::numeric_limits<double>::min();

// Far tails underflow; subnormal arithmetic would dominate the sweep.
Complex flush(Complex v) {
  return std::abs(v.real()) < kTiny && std::abs(v.imag()) < kTiny ? Complex{} : v;
}
}  // namespace

void SpectralPoint::validate() const {
  if (!std::isfinite(energy) || !std::isfinite(eta)) {
    throw std::invalid_argument("spectral point must be finite");
  }
  if (!(eta >= kEtaFloor)) {
    throw std::invalid_argument("eta must be >= " + std::to_string(kEtaFloor) + ", got " +
                                std::to_string(eta));
  }
}

void resolvent_column(const HamiltonianMatrix& h, VertexId y, SpectralPoint z,
                      std::vector<Complex>& out, std::vector<Complex>& pivots) {
  z.validate();
  const auto& ball = h.ball();
  ball.require(y);
  const std::size_t n = h.size();
  const Complex zc = z.z();
  const auto diag = h.diagonal();
  const auto active = h.edge_flags();

  pivots.resize(n);
  out.assign(n, Complex{});
  for (std::size_t x = 0; x < n; ++x) pivots[x] = diag[x] - zc;
  out[y] = 1.0;

  // Parents precede children in BFS order, so a reverse sweep sees every child first.
  for (std::size_t x = n - 1; x > 0; --x) {
    if (!active[x]) continue;
    const auto p = *ball.parent(static_cast<VertexId>(x));
    const Complex inv = 1.0 / pivots[x];
    pivots[p] -= inv;
    if (out[x] != Complex{}) out[p] = flush(out[p] - out[x] * inv);
  }
  for (std::size_t x = 0; x < n; ++x) {
    Complex rhs = out[x];
    if (x > 0 && active[x]) rhs -= out[*ball.parent(static_cast<VertexId>(x))];
    out[x] = flush(rhs / pivots[x]);
  }
}

std::vector<Complex> resolvent_column(const HamiltonianMatrix& h, VertexId y, SpectralPoint z) {
  std::vector<Complex> out;
  std::vector<Complex> pivots;
  resolvent_column(h, y, z, out, pivots);
  return out;
}

Complex green_entry(const HamiltonianMatrix& h, VertexId x, VertexId y, SpectralPoint z) {
  h.ball().require(x);
  return resolvent_column(h, y, z)[x];
}

Eigen::MatrixXcd dense_oracle(const HamiltonianMatrix& h, SpectralPoint z, std::size_t max_size) {
  z.validate();
  if (h.size() > max_size) {
    throw std::length_error("dense oracle refuses " + std::to_string(h.size()) +
                            " vertices (cap " + std::to_string(max_size) + ")");
  }
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXcd a = Eigen::MatrixXd(h.to_sparse()).cast<Complex>();
  a.diagonal().array() -= z.z();
  return a.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
}

ResolventExpansion check_resolvent_identity(const HamiltonianMatrix& h, VertexId x, VertexId y,
                                            VertexId w, SpectralPoint z) {
  const auto& ball = h.ball();
  const auto route = path(ball, x, w);
  if (std::find(route.begin(), route.end(), y) == route.end()) {
    throw std::invalid_argument("y = " + std::to_string(y) + " is not on the path from x = " +
                                std::to_string(x) + " to w = " + std::to_string(w));
  }
  const Region line(ball, path(ball, x, y));
  const Region fattened = expand(ball, line, 2);
  if (fattened.contains(w)) {
    throw std::invalid_argument("w = " + std::to_string(w) +
                                " lies within distance 2 of the path from x to y");
  }

  const auto h_line = restrict_dirichlet(h, line);
  const auto h_fat = restrict_dirichlet(h, fattened);
  const auto t_line = hopping_difference(h, line);
  const auto t_fat = hopping_difference(h, fattened);
  const auto inner = theta(ball, line);
  const auto outer = theta(ball, fattened);

  ResolventExpansion result;
  result.inner_bonds = inner.size();
  result.outer_bonds = outer.size();
  result.lhs = green_entry(h, x, w, z);

  const auto g_line_x = resolvent_column(h_line, x, z);  // G_L(u, x) = G_L(x, u)
  const auto g_fat_w = resolvent_column(h_fat, w, z);    // G_{L++}(v', w)
  for (const auto& [v, v_out] : outer) {
    if (g_fat_w[v_out] != Complex{}) ++result.contributing_outer_bonds;
  }

  Complex rhs{};
  for (const auto& [u, u_out] : inner) {
    const double t_uu = t_line.coeff(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u_out));
    if (t_uu == 0.0) continue;
    const auto g_col = resolvent_column(h, u_out, z);  // G(v, u') = G(u', v)
    for (const auto& [v, v_out] : outer) {
      const double t_vv = t_fat.coeff(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v_out));
      if (t_vv == 0.0) continue;
      rhs += g_line_x[u] * t_uu * g_col[v] * t_vv * g_fat_w[v_out];
    }
  }
  result.rhs = rhs;
  result.residual = std::abs(result.lhs - result.rhs);
  return result;
}

}  // namespace sparsetree

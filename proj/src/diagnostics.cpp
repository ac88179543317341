#include "sparsetree/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "sparsetree/stats.hpp"

namespace sparsetree {

namespace {

Eigen::MatrixXd dense(const HamiltonianMatrix& h) { return Eigen::MatrixXd(h.to_sparse()); }

std::vector<std::int64_t> distances_from(const TreeBall& ball, VertexId source) {
  std::vector<std::int64_t> dist(ball.size(), -1);
  std::deque<VertexId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (auto y : ball.neighbors(x)) {
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

}  // namespace

SpectralDecomposition spectrum_full(const HamiltonianMatrix& h, std::size_t max_size) {
  if (h.size() > max_size) {
    throw std::length_error("full eigen-decomposition refuses " + std::to_string(h.size()) +
                            " vertices (cap " + std::to_string(max_size) +
                            "); use the eigenvalue-only variant");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense(h));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd spectrum_values(const HamiltonianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  return solver.eigenvalues();
}

double inverse_participation_ratio(std::span<const double> psi) {
  double sum = 0.0;
  for (double a : psi) sum += a * a * a * a;
  return sum;
}

LocalizationMetrics localization_metrics(std::span<const double> psi, const TreeBall& ball) {
  if (psi.size() != ball.size()) throw std::invalid_argument("vector does not match the ball");
  LocalizationMetrics m;
  m.ipr = inverse_participation_ratio(psi);
  std::size_t center = 0;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    if (std::fabs(psi[i]) > std::fabs(psi[center])) center = i;
  }
  m.center = static_cast<VertexId>(center);

  const auto dist = distances_from(ball, m.center);
  const auto max_d = *std::max_element(dist.begin(), dist.end());
  std::vector<double> shell_max(static_cast<std::size_t>(max_d) + 1, 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    auto& s = shell_max[static_cast<std::size_t>(dist[i])];
    s = std::max(s, std::fabs(psi[i]));
  }
  const double peak = shell_max[0];
  std::vector<double> d;
  std::vector<double> log_amp;
  for (std::size_t k = 0; k < shell_max.size(); ++k) {
    if (shell_max[k] > 1e-12 * peak) {
      d.push_back(static_cast<double>(k));
      log_amp.push_back(std::log(shell_max[k]));
    }
  }
  m.shells_used = d.size();
  if (d.size() >= 2) {
    const auto fit = least_squares(d, log_amp);
    m.decay_rate = -fit.slope;
    m.decay_r_squared = fit.r_squared;
  }
  return m;
}

std::vector<LocalizationMetrics> eigen_metrics(const SpectralDecomposition& dec, const TreeBall& ball) {
  std::vector<LocalizationMetrics> out;
  out.reserve(static_cast<std::size_t>(dec.eigenvectors.cols()));
  for (Eigen::Index n = 0; n < dec.eigenvectors.cols(); ++n) {
    const Eigen::VectorXd col = dec.eigenvectors.col(n);
    out.push_back(localization_metrics(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), ball));
  }
  return out;
}

std::vector<SpectralAtom> spectral_measure(const SpectralDecomposition& dec, VertexId x) {
  if (x >= dec.eigenvectors.rows()) throw std::out_of_range("vertex outside the decomposition");
  std::vector<SpectralAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(dec.eigenvalues.size()));
  for (Eigen::Index n = 0; n < dec.eigenvalues.size(); ++n) {
    const double a = dec.eigenvectors(x, n);
    atoms.push_back({dec.eigenvalues(n), a * a});
  }
  return atoms;
}

std::complex<double> stieltjes_transform(std::span<const SpectralAtom> atoms, std::complex<double> z) {
  std::complex<double> sum{};
  for (const auto& a : atoms) sum += a.weight / (a.energy - z);
  return sum;
}

SpacingStatistics spacing_statistics(std::span<const double> eigenvalues) {
  if (eigenvalues.size() < kMinLevels) {
    throw std::invalid_argument("spacing statistics need >= " + std::to_string(kMinLevels) +
                                " levels, got " + std::to_string(eigenvalues.size()));
  }
  std::vector<double> levels(eigenvalues.begin(), eigenvalues.end());
  std::sort(levels.begin(), levels.end());
  const std::size_t n = levels.size() - 1;
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = levels[i + 1] - levels[i];

  const auto half = static_cast<std::ptrdiff_t>(kUnfoldingWindow / 2);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  auto reflect = [&](std::ptrdiff_t j) {
    while (j < 0 || j > last) {
      if (j < 0) j = -j;
      if (j > last) j = 2 * last - j;
    }
    return static_cast<std::size_t>(j);
  };

  SpacingStatistics out;
  out.spacings.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double local = 0.0;
    for (std::ptrdiff_t o = -half; o <= half; ++o) local += raw[reflect(static_cast<std::ptrdiff_t>(i) + o)];
    local /= static_cast<double>(kUnfoldingWindow);
    out.spacings[i] = local > 0.0 ? raw[i] / local : 0.0;
  }
  CompensatedSum total;
  for (double s : out.spacings) total.add(s);
  const double mean = total.value() / static_cast<double>(n);
  if (!(mean > 0.0)) throw std::invalid_argument("spectrum is fully degenerate");
  for (double& s : out.spacings) s /= mean;

  std::vector<double> sorted = out.spacings;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = 1.0 - std::exp(-sorted[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    out.ks_distance = std::max({out.ks_distance, std::fabs(f - lo), std::fabs(hi - f)});
  }
  return out;
}

}  // namespace sparsetree

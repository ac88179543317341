#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "sparsetree/diagnostics.hpp"
#include "sparsetree/disorder.hpp"
#include "sparsetree/green.hpp"

using namespace sparsetree;

namespace {

HamiltonianMatrix free_line(std::size_t sites) {
  auto ball = std::make_shared<const TreeBall>(TreeBall::line(sites));
  return assemble(ball, LaplacianKind::adjacency, std::vector<double>(sites, 0.0), 1.0);
}

}  // namespace

TEST_CASE("small spectra") {
  const auto two = spectrum_full(free_line(2));
  CHECK(two.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(two.eigenvalues(1) == doctest::Approx(1.0));
  const auto three = spectrum_values(free_line(3));
  CHECK(three(0) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(three(1) == doctest::Approx(0.0));
  CHECK(three(2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("trace and orthonormality on a random ball") {
  auto ball = std::make_shared<const TreeBall>(TreeBall::build({2, 2.0, 20}));
  DisorderSpec spec;
  const auto h = assemble(ball, LaplacianKind::graph, sample_potential(spec, *ball, 0), 3.0);
  const auto dec = spectrum_full(h);
  double diag = 0.0;
  for (double d : h.diagonal()) diag += d;
  CHECK(dec.eigenvalues.sum() == doctest::Approx(diag).epsilon(1e-10));
  const auto n = dec.eigenvectors.cols();
  CHECK((dec.eigenvectors.transpose() * dec.eigenvectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::is_sorted(dec.eigenvalues.data(), dec.eigenvalues.data() + n));
  CHECK_THROWS_AS(spectrum_full(h, 10), std::length_error);
}

TEST_CASE("inverse participation ratio") {
  const std::vector<double> delta{0.0, 1.0, 0.0, 0.0};
  CHECK(inverse_participation_ratio(delta) == doctest::Approx(1.0));
  const std::vector<double> flat(100, 0.1);
  CHECK(inverse_participation_ratio(flat) == doctest::Approx(0.01));
}

TEST_CASE("decay rate of a synthetic exponential profile") {
  const auto ball = TreeBall::line(60);
  std::vector<double> psi(60);
  double norm = 0.0;
  for (std::size_t x = 0; x < psi.size(); ++x) {
    psi[x] = std::exp(-0.5 * std::abs(static_cast<double>(x) - 20.0));
    norm += psi[x] * psi[x];
  }
  for (auto& p : psi) p /= std::sqrt(norm);
  const auto m = localization_metrics(psi, ball);
  CHECK(m.center == 20);
  CHECK(m.decay_rate == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.decay_r_squared == doctest::Approx(1.0));
}

TEST_CASE("spectral measure and Stieltjes transform") {
  auto ball = std::make_shared<const TreeBall>(TreeBall::build({3, 1.5, 8}));
  DisorderSpec spec;
  spec.master_seed = 4;
  const auto h = assemble(ball, LaplacianKind::adjacency, sample_potential(spec, *ball, 2), 2.0);
  const auto dec = spectrum_full(h);
  for (VertexId x : {VertexId{0}, VertexId{5}, static_cast<VertexId>(ball->size() - 1)}) {
    const auto atoms = spectral_measure(dec, x);
    double total = 0.0;
    for (const auto& a : atoms) total += a.weight;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (const SpectralPoint z : {SpectralPoint{0.0, 1.0}, SpectralPoint{0.7, 0.01}}) {
      CHECK(std::abs(stieltjes_transform(atoms, z.z()) - green_entry(h, x, x, z)) <= 1e-8);
    }
  }
}

TEST_CASE("level spacing statistics") {
  // Equally spaced levels: every unfolded spacing is 1, far from exponential.
  std::vector<double> picket(200);
  for (std::size_t i = 0; i < picket.size(); ++i) picket[i] = 0.1 * static_cast<double>(i);
  const auto p = spacing_statistics(picket);
  CHECK(p.spacings.size() == picket.size() - 1);
  for (double s : p.spacings) CHECK(s == doctest::Approx(1.0));
  CHECK(p.ks_distance == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.01));

  // Independent uniform levels have exponential spacings.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> poisson(4000);
  for (auto& e : poisson) e = u(rng);
  std::sort(poisson.begin(), poisson.end());
  const auto q = spacing_statistics(poisson);
  double mean = 0.0;
  for (double s : q.spacings) mean += s;
  CHECK(mean / static_cast<double>(q.spacings.size()) == doctest::Approx(1.0));
  CHECK(q.ks_distance < 0.05);

  CHECK_THROWS_AS(spacing_statistics(std::vector<double>(10, 0.0)), std::invalid_argument);
}

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <memory>
#include <iterator>
#include <random>

#include "sparsetree/disorder.hpp"
#include "sparsetree/green.hpp"

using namespace sparsetree;

namespace {

HamiltonianMatrix random_operator(std::shared_ptr<const TreeBall> ball, LaplacianKind kind, std::uint64_t seed,
                                  double lambda = 2.0) {
  DisorderSpec spec;
  spec.master_seed = seed;
  const auto v = sample_potential(spec, *ball, 0);
  return assemble(std::move(ball), kind, v, lambda);
}

std::shared_ptr<const TreeBall> ball_of(TreeParams p) { return std::make_shared<const TreeBall>(TreeBall::build(p)); }

}  // namespace

TEST_CASE("hand-computed resolvents") {
  const auto site = std::make_shared<const TreeBall>(TreeBall::line(1));
  const auto h1 = assemble(site, LaplacianKind::adjacency, std::vector<double>{0.0}, 1.0);
  const auto g1 = green_entry(h1, 0, 0, {0.0, 1.0});
  CHECK(g1.real() == doctest::Approx(0.0));
  CHECK(g1.imag() == doctest::Approx(1.0));

  const auto pair = std::make_shared<const TreeBall>(TreeBall::line(2));
  const auto h2 = assemble(pair, LaplacianKind::adjacency, std::vector<double>{0.0, 0.0}, 1.0);
  const auto gaa = green_entry(h2, 0, 0, {0.0, 1.0});
  const auto gab = green_entry(h2, 0, 1, {0.0, 1.0});
  CHECK(gaa.real() == doctest::Approx(0.0));
  CHECK(gaa.imag() == doctest::Approx(0.5));
  CHECK(gab.real() == doctest::Approx(0.5));
  CHECK(gab.imag() == doctest::Approx(0.0));

  const auto h3 = assemble(site, LaplacianKind::adjacency, std::vector<double>{0.7}, 1.0);
  const auto inv = dense_oracle(h3, {0.2, 0.3});
  CHECK(std::abs(inv(0, 0) - 1.0 / (0.7 - Complex(0.2, 0.3))) < 1e-15);
}

TEST_CASE("spectral parameter validation") {
  const auto site = std::make_shared<const TreeBall>(TreeBall::line(1));
  const auto h = assemble(site, LaplacianKind::adjacency, std::vector<double>{0.0}, 1.0);
  CHECK_THROWS_AS(resolvent_column(h, 0, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(resolvent_column(h, 0, {0.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(resolvent_column(h, 0, {0.0, 1e-9}), std::invalid_argument);
  CHECK_NOTHROW(resolvent_column(h, 0, {0.0, 1e-8}));
  CHECK_THROWS_AS(resolvent_column(h, 3, {0.0, 1.0}), std::out_of_range);
  const auto big = random_operator(ball_of({2, 1.0, 11}), LaplacianKind::adjacency, 1);
  CHECK_THROWS_AS(dense_oracle(big, {0.0, 1.0}), std::length_error);
}

TEST_CASE("fast column agrees with the dense inverse") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto kind = i % 2 ? LaplacianKind::graph : LaplacianKind::adjacency;
    const auto ball = ball_of({2 + static_cast<int>(rng() % 2), i % 3 ? 2.0 : 1.0, 3 + static_cast<std::int64_t>(rng() % 3)});
    const auto h = random_operator(ball, kind, rng());
    const SpectralPoint z{-2.0 + 0.2 * i, std::pow(10.0, -3.0 + 0.15 * i)};
    const auto inv = dense_oracle(h, z);
    Eigen::MatrixXcd a = Eigen::MatrixXd(h.to_sparse()).cast<Complex>();
    a.diagonal().array() -= z.z();
    CHECK((a * inv - Eigen::MatrixXcd::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() <= 1e-9);
    for (VertexId y = 0; y < h.size(); ++y) {
      const auto col = resolvent_column(h, y, z);
      double worst = 0.0;
      for (VertexId x = 0; x < h.size(); ++x) worst = std::max(worst, std::abs(col[x] - inv(x, y)));
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("restricted operators give zeros on other components") {
  const auto ball = ball_of({2, 2.0, 8});
  const auto h = random_operator(ball, LaplacianKind::adjacency, 4);
  const Region omega(*ball, {0, 1, 3});
  const auto hr = restrict_dirichlet(h, omega);
  const auto col = resolvent_column(hr, 1, {0.5, 0.1});
  const auto inv = dense_oracle(hr, {0.5, 0.1});
  for (VertexId x = 0; x < ball->size(); ++x) {
    if (!omega.contains(x)) CHECK(col[x] == Complex{});
    CHECK(std::abs(col[x] - inv(x, 1)) <= 1e-12);
  }
}

TEST_CASE("symmetry and Herglotz and the first resolvent identity") {
  const auto ball = ball_of({3, 2.0, 7});
  const auto h = random_operator(ball, LaplacianKind::graph, 8);
  const SpectralPoint z1{0.3, 0.05};
  const SpectralPoint z2{-1.1, 0.4};
  std::mt19937_64 rng(2);
  for (int i = 0; i < 40; ++i) {
    const auto x = static_cast<VertexId>(rng() % ball->size());
    const auto y = static_cast<VertexId>(rng() % ball->size());
    CHECK(std::abs(green_entry(h, x, y, z1) - green_entry(h, y, x, z1)) <= 1e-12);
    CHECK(green_entry(h, x, x, {0.0, 1e-6}).imag() > 0.0);
    CHECK(green_entry(h, x, x, z2).imag() > 0.0);
  }
  const auto g1 = dense_oracle(h, z1);
  const auto g2 = dense_oracle(h, z2);
  const Eigen::MatrixXcd rhs = (z1.z() - z2.z()) * g1 * g2;
  for (VertexId x = 0; x < ball->size(); x += 5) {
    const auto c1 = resolvent_column(h, x, z1);
    const auto c2 = resolvent_column(h, x, z2);
    for (VertexId y = 0; y < ball->size(); ++y) CHECK(std::abs(c1[y] - c2[y] - rhs(y, x)) <= 1e-9);
  }
}

TEST_CASE("double resolvent expansion") {
  const auto ball = ball_of({2, 2.0, 14});
  const auto h = random_operator(ball, LaplacianKind::adjacency, 21, 3.0);
  const auto ray = ball->leftmost_ray();
  const SpectralPoint z{0.1, 0.01};

  const auto r = check_resolvent_identity(h, ray[0], ray[5], ray[12], z);
  CHECK(r.residual <= 1e-9);
  CHECK(std::abs(r.lhs) > 0.0);
  CHECK(r.inner_bonds > 0);
  // w sits below the fattened path on a single branch: only one outer bond reaches it.
  CHECK(r.contributing_outer_bonds == 1);

  // Going up and down again through the root.
  const auto other = *std::ranges::prev(ball->children(0).end());
  const auto deep = path(*ball, other, static_cast<VertexId>(ball->size() - 1));
  const auto r2 = check_resolvent_identity(h, ray[10], ray[1], deep[6], z);
  CHECK(r2.residual <= 1e-9);

  // If L(x, y) is already cut off, both sides vanish.
  const Region line(*ball, path(*ball, ray[0], ray[5]));
  const auto cut = restrict_dirichlet(h, line);
  const auto r3 = check_resolvent_identity(cut, ray[0], ray[5], ray[12], z);
  CHECK(r3.lhs == Complex{});
  CHECK(r3.rhs == Complex{});

  CHECK_THROWS_AS(check_resolvent_identity(h, ray[0], ray[5], ray[6], z), std::invalid_argument);
  CHECK_THROWS_AS(check_resolvent_identity(h, ray[0], other, ray[12], z), std::invalid_argument);
}

TEST_CASE("resolvent column cost is linear") {
  auto time_column = [](std::size_t sites) {
    const auto ball = std::make_shared<const TreeBall>(TreeBall::line(sites));
    const std::vector<double> v(sites, 0.1);
    const auto h = assemble(ball, LaplacianKind::adjacency, v, 1.0);
    std::vector<Complex> out, pivots;
    resolvent_column(h, 0, {0.0, 0.01}, out, pivots);
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      resolvent_column(h, static_cast<VertexId>(sites / 2), {0.0, 0.01}, out, pivots);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  };
  const double small = time_column(100'000);
  const double large = time_column(1'000'000);
  MESSAGE("1e5: " << small << " s, 1e6: " << large << " s");
  CHECK(large / small <= 15.0);
}

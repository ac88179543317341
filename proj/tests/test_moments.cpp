#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sparsetree/moments.hpp"
#include "sparsetree/stats.hpp"

using namespace sparsetree;

namespace {

std::vector<MomentEstimate> synthetic(double q, double a, std::int64_t from, std::int64_t to, double noise = 0.0,
                                      std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  std::vector<MomentEstimate> out;
  for (std::int64_t d = from; d <= to; ++d) {
    out.push_back({static_cast<VertexId>(d), d, a * std::exp(-q * static_cast<double>(d)) * (1.0 + jitter(rng)), 0.0, 1});
  }
  return out;
}

// G_[0,n](0, n; z) of a chain with unit hopping: (-1)^n / det(H - z), det by the three-term recursion.
std::complex<double> chain_corner(const std::vector<double>& diagonal, std::size_t n, std::complex<double> z) {
  std::complex<double> prev = 1.0;
  std::complex<double> cur = diagonal[0] - z;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto next = (diagonal[i] - z) * cur - prev;
    prev = cur;
    cur = next;
  }
  return (n % 2 ? -1.0 : 1.0) / cur;
}

MomentRequest small_request() {
  MomentRequest req;
  req.tree = {2, 2.0, 10};
  req.disorder.lambda = 2.0;
  req.disorder.master_seed = 5;
  req.z = {0.2, 0.05};
  req.samples = 300;
  const auto ball = TreeBall::build(req.tree);
  req.targets = ball.leftmost_ray();
  return req;
}

}  // namespace

TEST_CASE("compensated sums and running statistics") {
  CompensatedSum sum;
  sum.add(1e16);
  sum.add(1.0);
  sum.add(-1e16);
  CHECK(sum.value() == 1.0);

  RunningStats stats;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) stats.add(x);
  CHECK(stats.mean() == doctest::Approx(5.0));
  CHECK(stats.variance() == doctest::Approx(32.0 / 7.0));
  CHECK(stats.standard_error() == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));

  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const auto fit = least_squares(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("decay fit on synthetic data") {
  const auto exact = fit_decay(synthetic(0.1, 1.0, 0, 40));
  CHECK(exact.rate == doctest::Approx(0.1));
  CHECK(exact.prefactor == doctest::Approx(1.0));
  CHECK(exact.r_squared == doctest::Approx(1.0));
  CHECK_FALSE(exact.no_decay);

  const auto flat = fit_decay(synthetic(0.0, 0.3, 0, 20));
  CHECK(flat.rate == doctest::Approx(0.0));
  CHECK(flat.r_squared == 0.0);
  CHECK(flat.no_decay);

  const auto noisy = fit_decay(synthetic(0.2, 2.0, 5, 60, 0.05, 9));
  CHECK(noisy.rate >= 0.18);
  CHECK(noisy.rate <= 0.22);
  CHECK(noisy.min_distance == 5);
  CHECK(noisy.max_distance == 60);

  auto with_zero = synthetic(0.1, 1.0, 0, 10);
  with_zero[3].mean = 0.0;
  const auto dropped = fit_decay(with_zero);
  CHECK(dropped.excluded == 1);
  CHECK(dropped.points_used == 10);

  CHECK_THROWS_AS(fit_decay(synthetic(0.1, 1.0, 0, 1)), std::invalid_argument);
  CHECK(segmentation_decay_rate(5) == doctest::Approx(std::log(2.0) / 30.0));
}

TEST_CASE("request validation") {
  auto req = small_request();
  req.s = 1.0;
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
  req.s = 0.0;
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
  req = small_request();
  req.targets.clear();
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
  req = small_request();
  req.targets.push_back(100000);
  CHECK_THROWS_AS(fractional_moment(req, 1), std::out_of_range);
  req = small_request();
  req.samples = 0;
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
}

TEST_CASE("single site moment is bounded pointwise") {
  MomentRequest req;
  req.tree = {2, 2.0, 0};
  req.targets = {0};
  req.z = {0.0, 1.0};
  req.samples = 1;
  const auto e = fractional_moment(req, 1);
  CHECK(e[0].mean <= 1.0);
  CHECK(e[0].std_error == 0.0);
}

TEST_CASE("estimates match a direct per-realization computation") {
  const auto req = small_request();
  const auto estimates = fractional_moment(req, 3);
  auto ball = std::make_shared<const TreeBall>(TreeBall::build(req.tree));
  std::vector<RunningStats> direct(req.targets.size());
  for (std::size_t m = 0; m < req.samples; ++m) {
    const auto h = assemble(ball, req.kind, sample_potential(req.disorder, *ball, m), req.disorder.lambda);
    const auto inv = dense_oracle(h, req.z);
    for (std::size_t t = 0; t < req.targets.size(); ++t) {
      direct[t].add(std::pow(std::abs(inv(req.source, req.targets[t])), req.s));
    }
  }
  for (std::size_t t = 0; t < req.targets.size(); ++t) {
    CHECK(estimates[t].distance == static_cast<std::int64_t>(t));
    CHECK(estimates[t].mean == doctest::Approx(direct[t].mean()).epsilon(1e-9));
    CHECK(estimates[t].std_error == doctest::Approx(direct[t].standard_error()).epsilon(1e-6));
    CHECK(estimates[t].samples == req.samples);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto req = small_request();
  const auto one = fractional_moment(req, 1);
  for (unsigned workers : {2u, 5u, 8u}) {
    const auto many = fractional_moment(req, workers);
    for (std::size_t t = 0; t < one.size(); ++t) {
      CHECK(one[t].mean == many[t].mean);
      CHECK(one[t].std_error == many[t].std_error);
    }
  }
}

TEST_CASE("exchange symmetry and standard error scaling") {
  auto req = small_request();
  const auto ball = TreeBall::build(req.tree);
  const auto ray = ball.leftmost_ray();
  req.source = ray[0];
  req.targets = {ray[7]};
  const auto forward = fractional_moment(req, 2);
  req.source = ray[7];
  req.targets = {ray[0]};
  const auto backward = fractional_moment(req, 2);
  CHECK(forward[0].mean == doctest::Approx(backward[0].mean).epsilon(1e-12));

  req.samples = 400;
  const auto small = fractional_moment(req, 2)[0];
  req.samples = 1600;
  const auto large = fractional_moment(req, 2)[0];
  CHECK(large.std_error / small.std_error == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("one-dimensional scan matches the determinant recursion") {
  MinamiRequest req;
  req.length = 20;
  req.disorder.lambda = 2.0;
  req.disorder.master_seed = 3;
  req.z = {0.1, 1e-3};
  req.samples = 200;
  for (auto kind : {LaplacianKind::adjacency, LaplacianKind::graph}) {
    req.kind = kind;
    const auto result = minami_scan(req, 4);
    REQUIRE(result.estimates.size() == req.length + 1);
    std::vector<RunningStats> direct(req.length + 1);
    for (std::size_t m = 0; m < req.samples; ++m) {
      auto d = sample_potential(req.disorder, req.length + 1, m);
      for (auto& x : d) x = req.disorder.lambda * x + (kind == LaplacianKind::graph ? -2.0 : 0.0);
      for (std::size_t n = 0; n <= req.length; ++n) {
        direct[n].add(std::pow(std::abs(chain_corner(d, n, req.z.z())), req.s));
      }
    }
    for (std::size_t n = 0; n <= req.length; ++n) {
      CHECK(result.estimates[n].distance == static_cast<std::int64_t>(n));
      CHECK(result.estimates[n].mean == doctest::Approx(direct[n].mean()).epsilon(1e-8));
    }
  }
  req.length = 2;
  CHECK_THROWS_AS(minami_scan(req, 1), std::invalid_argument);
}

TEST_CASE("bound probe") {
  BoundProbeRequest req;
  req.samples = 400;
  req.disorder.master_seed = 12;
  const auto result = bound_probe(req, 4);
  CHECK(result.region.size() == req.region_size);
  CHECK(result.pairs.size() == req.pairs);
  REQUIRE(result.points.size() == req.etas.size());
  CHECK(result.ratio == doctest::Approx(result.points.back().max_mean / result.points.front().max_mean));
  // The region is connected: every vertex but one has its parent inside.
  const auto ball = TreeBall::build(req.tree);
  const Region region(ball, result.region);
  std::size_t roots = 0;
  for (auto x : result.region) {
    const auto p = ball.parent(x);
    roots += (!p || !region.contains(*p)) ? 1 : 0;
  }
  CHECK(roots == 1);
  for (const auto& [x, y] : result.pairs) {
    CHECK(region.contains(x));
    CHECK(region.contains(y));
  }

  BoundProbeRequest site = req;
  site.region_size = 1;
  site.pairs = 1;
  site.samples = 2000;
  for (const auto& point : bound_probe(site, 4).points) {
    CHECK(point.estimates.front().mean <= 2.0 * std::sqrt(2.0) + 3.0 * point.estimates.front().std_error);
  }

  req.etas = {1e-2, 1e-1};
  CHECK_THROWS_AS(bound_probe(req, 1), std::invalid_argument);
}

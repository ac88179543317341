#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "sparsetree/disorder.hpp"
#include "sparsetree/green.hpp"
#include "sparsetree/hamiltonian.hpp"

using namespace sparsetree;

namespace {

std::shared_ptr<const TreeBall> ball_of(TreeParams p) { return std::make_shared<const TreeBall>(TreeBall::build(p)); }

Eigen::MatrixXd dense(const HamiltonianMatrix& h) { return Eigen::MatrixXd(h.to_sparse()); }

HamiltonianMatrix zero_potential(std::shared_ptr<const TreeBall> ball, LaplacianKind kind) {
  const std::vector<double> v(ball->size(), 0.0);
  return assemble(std::move(ball), kind, v, 1.0);
}

}  // namespace

TEST_CASE("assembly examples") {
  CHECK(dense(zero_potential(ball_of({2, 2.0, 0}), LaplacianKind::adjacency)).isZero());

  Eigen::MatrixXd expected(3, 3);
  expected << 0, 1, 1, 1, 0, 0, 1, 0, 0;
  CHECK(dense(zero_potential(ball_of({2, 2.0, 1}), LaplacianKind::adjacency)) == expected);

  const auto g = dense(zero_potential(ball_of({2, 2.0, 1}), LaplacianKind::graph));
  CHECK(g.diagonal() == Eigen::Vector3d(-2, -2, -2));

  // Depth 2 is a junction shell in (2,2): those vertices have degree 3 in the full tree.
  const auto ball = ball_of({2, 2.0, 2});
  const auto h = zero_potential(ball, LaplacianKind::graph);
  for (VertexId x = 0; x < ball->size(); ++x) CHECK(h.diagonal(x) == -ball->full_degree(x));
  CHECK(h.diagonal(3) == -3);

  const std::vector<double> wrong(2, 0.0);
  CHECK_THROWS_AS(assemble(ball, LaplacianKind::adjacency, wrong, 1.0), std::invalid_argument);
}

TEST_CASE("potential is scaled by lambda on the diagonal") {
  const auto ball = ball_of({2, 2.0, 3});
  DisorderSpec spec;
  spec.lambda = 2.5;
  const auto v = sample_potential(spec, *ball, 4);
  const auto adj = assemble(ball, LaplacianKind::adjacency, v, spec.lambda);
  const auto lap = assemble(ball, LaplacianKind::graph, v, spec.lambda);
  for (VertexId x = 0; x < ball->size(); ++x) {
    CHECK(adj.diagonal(x) == doctest::Approx(2.5 * v[x]));
    CHECK(lap.diagonal(x) == doctest::Approx(2.5 * v[x] - ball->full_degree(x)));
  }
}

TEST_CASE("restrictions") {
  const auto ball = ball_of({2, 2.0, 1});
  const auto h = zero_potential(ball, LaplacianKind::adjacency);
  const Region root(*ball, {0});

  CHECK(dense(restrict_dirichlet(h, root)).isZero());
  CHECK(dense(restrict_dirichlet(h, Region::whole(*ball))) == dense(h));
  CHECK(dense(restrict_outside(h, Region::whole(*ball))) == dense(h));
  CHECK(dense(restrict_outside(h, root)).isZero());

  const auto pair = dense(restrict_outside(h, Region(*ball, {0, 1})));
  CHECK(pair(0, 1) == 1.0);
  CHECK(pair(0, 2) == 0.0);

  const Eigen::MatrixXd t(hopping_difference(h, root));
  CHECK((t.array() != 0.0).count() == 4);
  CHECK(t(0, 1) == 1.0);
  CHECK(t(1, 0) == 1.0);
  CHECK(t(0, 2) == 1.0);
  CHECK(t(2, 0) == 1.0);
  CHECK(Eigen::MatrixXd(hopping_difference(h, Region::whole(*ball))).isZero());
}

TEST_CASE("restricted operator plus hopping difference gives H") {
  const auto ball = ball_of({3, 1.5, 12});
  std::mt19937_64 rng(11);
  DisorderSpec spec;
  for (auto kind : {LaplacianKind::adjacency, LaplacianKind::graph}) {
    const auto h = assemble(ball, kind, sample_potential(spec, *ball, 1), 1.7);
    const auto full = dense(h);
    CHECK(full == full.transpose());
    for (int i = 0; i < 40; ++i) {
      std::vector<VertexId> ids;
      for (int j = 0; j < 1 + static_cast<int>(rng() % 30); ++j) ids.push_back(static_cast<VertexId>(rng() % ball->size()));
      const Region omega(*ball, ids);
      const auto hd = dense(restrict_dirichlet(h, omega));
      const Eigen::MatrixXd t(hopping_difference(h, omega));
      CHECK(hd + t == full);
      CHECK(hd == hd.transpose());
      CHECK(t == t.transpose());
      CHECK(t.diagonal().isZero());
      CHECK(t.maxCoeff() <= 1.0);
      const auto ho = dense(restrict_outside(h, omega));
      CHECK(ho.diagonal() == full.diagonal());
      for (Eigen::Index a = 0; a < ho.rows(); ++a) {
        for (Eigen::Index b = 0; b < ho.cols(); ++b) {
          if (a != b && ho(a, b) != 0.0) {
            CHECK(omega.contains(static_cast<VertexId>(a)));
            CHECK(omega.contains(static_cast<VertexId>(b)));
          }
        }
      }
    }
  }
}

TEST_CASE("block structure of the Dirichlet restriction") {
  const auto ball = ball_of({2, 2.0, 10});
  DisorderSpec spec;
  const auto h = assemble(ball, LaplacianKind::adjacency, sample_potential(spec, *ball, 0), 1.0);
  std::mt19937_64 rng(3);
  int checked = 0;
  while (checked < 200) {
    std::vector<VertexId> ids;
    for (int j = 0; j < 12; ++j) ids.push_back(static_cast<VertexId>(rng() % ball->size()));
    const Region omega(*ball, ids);
    const auto x = omega.ids()[rng() % omega.size()];
    const auto y = static_cast<VertexId>(rng() % ball->size());
    if (omega.contains(y)) continue;
    const auto inv = dense_oracle(restrict_dirichlet(h, omega), {0.0, 1.0});
    CHECK(std::abs(inv(x, y)) <= 1e-12);
    ++checked;
  }
}

TEST_CASE("disorder sampling") {
  DisorderSpec spec;
  spec.master_seed = 99;
  const auto a = sample_potential(spec, 100000, 0);
  CHECK(a == sample_potential(spec, 100000, 0));
  CHECK(a != sample_potential(spec, 100000, 1));
  double sum = 0.0;
  for (double v : a) {
    CHECK(v >= -0.5);
    CHECK(v <= 0.5);
    sum += v;
  }
  CHECK(std::abs(sum / a.size()) <= 0.004);

  // Draws do not depend on how many sites are requested.
  const auto prefix = sample_potential(spec, 10, 0);
  CHECK(std::equal(prefix.begin(), prefix.end(), a.begin()));

  spec.distribution = GaussianDisorder{1.0, 2.0};
  const auto g = sample_potential(spec, 100000, 0);
  double m = 0.0, m2 = 0.0;
  for (double v : g) {
    m += v;
    m2 += v * v;
  }
  m /= g.size();
  CHECK(m == doctest::Approx(1.0).epsilon(0.03));
  CHECK(std::sqrt(m2 / g.size() - m * m) == doctest::Approx(2.0).epsilon(0.02));

  spec.distribution = CauchyDisorder{0.0, 1.0};
  auto c = sample_potential(spec, 100001, 0);
  std::nth_element(c.begin(), c.begin() + 50000, c.end());
  CHECK(std::abs(c[50000]) < 0.02);

  spec.lambda = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

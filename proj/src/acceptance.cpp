#include "sparsetree/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "sparsetree/cli.hpp"
#include "sparsetree/diagnostics.hpp"
#include "sparsetree/disorder.hpp"
#include "sparsetree/green.hpp"
#include "sparsetree/moments.hpp"

namespace sparsetree {

namespace {

constexpr std::uint64_t kAcceptanceSeed = 20240611;

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

// ---- 1. counting ------------------------------------------------------------

Outcome counting_exactness(bool quick) {
  const std::int64_t r_max = quick ? 120 : 300;
  const std::vector<std::pair<int, double>> shapes{{2, 2.0}, {2, 1.5}, {3, 2.0}, {4, 3.0}};
  std::size_t checked = 0;
  for (const auto& [k, gamma] : shapes) {
    const TreeParams params{k, gamma, r_max};
    const auto ball = TreeBall::build(params);
    std::vector<std::uint64_t> per_depth(static_cast<std::size_t>(r_max) + 1, 0);
    for (VertexId x = 0; x < ball.size(); ++x) ++per_depth[static_cast<std::size_t>(ball.depth(x))];
    std::uint64_t bfs = 0;
    for (std::int64_t r = 0; r <= r_max; ++r) {
      bfs += per_depth[static_cast<std::size_t>(r)];
      const auto exact = ball_size_exact({k, gamma, r}, r);
      if (exact != bfs) {
        return {false, "(k,gamma)=(" + std::to_string(k) + "," + fmt(gamma) + ") r=" + std::to_string(r) +
                           ": closed form " + std::to_string(exact) + " != BFS " + std::to_string(bfs)};
      }
      ++checked;
    }
    // Building at a smaller radius must give the same count as the prefix.
    for (std::int64_t r : {std::int64_t{0}, std::int64_t{1}, std::int64_t{7}, r_max / 3}) {
      const auto small = TreeBall::build({k, gamma, r});
      if (small.size() != ball_size_exact({k, gamma, r}, r)) {
        return {false, "direct build at r=" + std::to_string(r) + " disagrees with the closed form"};
      }
    }
  }
  return {true, std::to_string(checked) + " (shape, radius) pairs equal, r <= " + std::to_string(r_max)};
}

// ---- 2. dimension -----------------------------------------------------------

Outcome dimension_formula() {
  const TreeParams params{2, 2.0, 0};
  std::vector<double> d;
  for (std::int64_t r : {1'000, 10'000, 100'000, 1'000'000}) d.push_back(dimension_estimate(params, r));
  const bool increasing = std::is_sorted(d.begin(), d.end(), std::less_equal<>()) &&
                          std::adjacent_find(d.begin(), d.end()) == d.end();
  const bool close = std::abs(d.back() - 2.0) <= 0.1;
  return {increasing && close, "d(1e3..1e6) = " + fmt(d[0]) + ", " + fmt(d[1]) + ", " + fmt(d[2]) + ", " +
                                   fmt(d[3]) + (increasing ? "" : " (not increasing)")};
}

// ---- shared random instance helpers -----------------------------------------

struct RandomInstance {
  std::shared_ptr<const TreeBall> ball;
  HamiltonianMatrix h;
  SpectralPoint z;
};

RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_vertices, double eta_low) {
  static const std::vector<std::pair<int, double>> shapes{{2, 2.0}, {2, 1.5}, {3, 2.0}, {3, 1.0}, {2, 1.0}, {4, 3.0}};
  const auto& [k, gamma] = shapes[std::uniform_int_distribution<std::size_t>(0, shapes.size() - 1)(rng)];
  std::int64_t r_max = 0;
  while (ball_size_exact({k, gamma, r_max + 1}, r_max + 1) <= max_vertices) ++r_max;
  const auto r = std::uniform_int_distribution<std::int64_t>(1, r_max)(rng);
  auto ball = std::make_shared<const TreeBall>(TreeBall::build({k, gamma, r}));

  DisorderSpec disorder;
  switch (rng() % 3) {
    case 0: disorder.distribution = UniformDisorder{}; break;
    case 1: disorder.distribution = GaussianDisorder{}; break;
    default: disorder.distribution = CauchyDisorder{}; break;
  }
  disorder.lambda = std::uniform_real_distribution<double>(0.5, 6.0)(rng);
  disorder.master_seed = rng();
  const auto kind = (rng() % 2) ? LaplacianKind::graph : LaplacianKind::adjacency;
  const auto v = sample_potential(disorder, *ball, rng() % 1000);
  auto h = assemble(ball, kind, v, disorder.lambda);

  const double log_eta = std::uniform_real_distribution<double>(std::log(eta_low), 0.0)(rng);
  const SpectralPoint z{std::uniform_real_distribution<double>(-3.5, 3.5)(rng), std::exp(log_eta)};
  return {ball, std::move(h), z};
}

// ---- 3. fast solver vs dense LU ---------------------------------------------

Outcome green_oracle(bool quick) {
  const int instances = quick ? 25 : 100;
  std::mt19937_64 rng(kAcceptanceSeed + 3);
  double worst = 0.0;
  std::size_t largest = 0;
  std::size_t graph_instances = 0;
  for (int i = 0; i < instances; ++i) {
    const auto inst = random_instance(rng, 2000, 1e-3);
    const auto n = static_cast<Eigen::Index>(inst.h.size());
    Eigen::MatrixXcd a = Eigen::MatrixXd(inst.h.to_sparse()).cast<Complex>();
    a.diagonal().array() -= inst.z.z();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    largest = std::max<std::size_t>(largest, inst.h.size());
    graph_instances += inst.h.kind() == LaplacianKind::graph ? 1 : 0;
    for (int c = 0; c < 3; ++c) {
      const auto y = static_cast<VertexId>(rng() % inst.h.size());
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e(y) = 1.0;
      const Eigen::VectorXcd dense = lu.solve(e);
      const auto fast = resolvent_column(inst.h, y, inst.z);
      for (Eigen::Index x = 0; x < n; ++x) worst = std::max(worst, std::abs(dense(x) - fast[static_cast<std::size_t>(x)]));
    }
  }
  return {worst <= 1e-8, std::to_string(instances) + " instances (" + std::to_string(graph_instances) +
                             " graph kind, up to " + std::to_string(largest) +
                             " vertices), max |fast - dense| = " + fmt(worst, 3) + " (tol 1e-8)"};
}

// ---- 4. resolvent expansion -------------------------------------------------

Outcome expansion_identity(bool quick) {
  const int instances = quick ? 30 : 100;
  std::mt19937_64 rng(kAcceptanceSeed + 4);
  double worst = 0.0;
  std::size_t single_outer = 0;
  int done = 0;
  while (done < instances) {
    const auto inst = random_instance(rng, 1500, 1e-3);
    const auto& ball = *inst.ball;
    const auto x = static_cast<VertexId>(rng() % ball.size());
    const auto w = static_cast<VertexId>(rng() % ball.size());
    const auto p = path(ball, x, w);
    if (p.size() < 5) continue;
    // y strictly between x and w with d(y, w) >= 3, so w lies outside L(x,y)++.
    const auto offset = std::uniform_int_distribution<std::size_t>(1, p.size() - 4)(rng);
    const auto result = check_resolvent_identity(inst.h, x, p[offset], w, inst.z);
    const double scale = std::max(1.0, std::abs(result.lhs));
    worst = std::max(worst, result.residual / scale);
    single_outer += result.contributing_outer_bonds == 1 ? 1 : 0;
    ++done;
  }
  return {worst <= 1e-9, std::to_string(instances) + " instances, max residual = " + fmt(worst, 3) +
                             " (tol 1e-9), single contributing outer bond in " + std::to_string(single_outer)};
}

// ---- 5. segmentation fuzz ---------------------------------------------------

Outcome segmentation_fuzz(bool quick) {
  const int instances = quick ? 300 : 1000;
  std::array<int, 4> failures{};
  int malformed = 0;
  int multi_junction = 0;
  std::string first_witness;
  std::int64_t longest = 0;
  for (int i = 0; i < instances; ++i) {
    const auto shape = sample_segmentation_instance(kAcceptanceSeed + 5, static_cast<std::uint64_t>(i));
    const auto line = shape.geometry();
    longest = std::max(longest, line.length);
    const auto result = segment_line(line, shape.L0);
    const auto report = verify_segmentation(line, result);
    malformed += report.well_formed ? 0 : 1;
    multi_junction += report.single_junction ? 0 : 1;
    for (std::size_t p = 0; p < 4; ++p) {
      if (!report.properties[p].passed) {
        ++failures[p];
        if (first_witness.empty()) {
          first_witness = "instance " + std::to_string(i) + " (k=" + std::to_string(shape.tree.k) +
                          ", gamma=" + fmt(shape.tree.gamma) + ", L0=" + std::to_string(shape.L0) +
                          ", d=" + std::to_string(line.length) + "), property " + std::to_string(p + 1) +
                          ": " + report.properties[p].witness;
        }
      }
    }
  }

  // The same construction on materialized balls, through vertex ids.
  int ball_cases = 0;
  for (const auto& [params, L0] : {std::pair{TreeParams{2, 1.6, 120}, 5}, std::pair{TreeParams{3, 2.0, 90}, 5}}) {
    const auto ball = TreeBall::build(params);
    const auto ray = ball.leftmost_ray();
    for (std::size_t start = 0; start + 7 * L0 + 1 < ray.size(); start += 7) {
      try {
        const auto result = segment_path(ball, ray[start], ray.back(), L0);
        const auto report = verify_segmentation(ball, result, ray.back());
        ++ball_cases;
        for (std::size_t p = 0; p < 4; ++p) failures[p] += report.properties[p].passed ? 0 : 1;
        malformed += report.well_formed ? 0 : 1;
      } catch (const SegmentationError&) {
        // start too close to a junction; not an admissible instance
      }
    }
  }

  const int total_failures = failures[0] + failures[1] + failures[2] + failures[3];
  std::string detail = std::to_string(instances) + " path shapes (d up to " + std::to_string(longest) + ") + " +
                       std::to_string(ball_cases) + " ball paths; property failures " +
                       std::to_string(failures[0]) + "/" + std::to_string(failures[1]) + "/" +
                       std::to_string(failures[2]) + "/" + std::to_string(failures[3]) +
                       ", malformed " + std::to_string(malformed) + ", multi-junction pairs " +
                       std::to_string(multi_junction);
  if (!first_witness.empty()) detail += "; first: " + first_witness;
  return {total_failures == 0 && malformed == 0, detail};
}

// ---- 6. decay on the tree ---------------------------------------------------

Outcome tree_decay(bool quick, unsigned workers) {
  // Either Laplacian kind qualifies; both are measured and reported.
  const TreeParams tree{2, 2.0, 60};
  const auto ball = std::make_shared<const TreeBall>(TreeBall::build(tree));
  bool any = false;
  std::string detail;
  for (const auto kind : {LaplacianKind::adjacency, LaplacianKind::graph}) {
    MomentRequest req;
    req.tree = tree;
    req.kind = kind;
    req.disorder.distribution = UniformDisorder{};
    req.disorder.lambda = 3.0;
    req.disorder.master_seed = kAcceptanceSeed + 6;
    req.s = 0.5;
    req.z = {0.0, 1e-3};
    req.samples = quick ? 500 : 2000;
    req.targets = ball->leftmost_ray();
    const auto fit = fit_decay(fractional_moment(ball, req, workers));
    const bool ok = fit.rate > 0.05 && fit.r_squared >= 0.9;
    any = any || ok;
    detail += std::string(to_string(kind)) + ": q = " + fmt(fit.rate) + ", r^2 = " + fmt(fit.r_squared) +
              (ok ? " (meets" : " (misses") + " q > 0.05, r^2 >= 0.9); ";
  }
  detail += "distances 0..60, M = " + std::to_string(quick ? 500 : 2000) +
            "; segmentation rate ln2/(6 L0) at L0=5: " + fmt(segmentation_decay_rate(5));
  return {any, detail};
}

// ---- 7. one-dimensional scan ------------------------------------------------

Outcome minami(bool quick, unsigned workers) {
  MinamiRequest req;
  req.length = 60;
  req.disorder.lambda = 2.0;
  req.disorder.master_seed = kAcceptanceSeed + 7;
  req.s = 0.5;
  req.z = {0.0, 1e-3};
  req.samples = quick ? 500 : 2000;
  const auto result = minami_scan(req, workers);
  const bool ok = result.fit.rate > 0.0 && result.fit.r_squared >= 0.9;
  return {ok, "m = " + fmt(result.fit.rate) + " (need > 0), r^2 = " + fmt(result.fit.r_squared) +
                  " (need >= 0.9), M = " + std::to_string(req.samples)};
}

// ---- 8. boundedness in eta --------------------------------------------------

Outcome boundedness(bool quick, unsigned workers) {
  BoundProbeRequest req;
  req.disorder.master_seed = kAcceptanceSeed + 8;
  req.samples = quick ? 1500 : 5000;
  const auto probe = bound_probe(req, workers);
  const bool ratio_ok = probe.ratio <= 5.0;

  // Single site: H = lambda V, G = 1/(lambda V - z); <|G|^s> stays below 2 sqrt 2 for
  // uniform(-1/2, 1/2), lambda = 1, s = 1/2.
  BoundProbeRequest single = req;
  single.region_size = 1;
  single.pairs = 1;
  const auto site = bound_probe(single, workers);
  const double bound = 2.0 * std::sqrt(2.0);
  bool site_ok = true;
  double worst_margin = -1e300;
  for (const auto& point : site.points) {
    const auto& e = point.estimates.front();
    worst_margin = std::max(worst_margin, e.mean - (bound + 3.0 * e.std_error));
    site_ok = site_ok && e.mean <= bound + 3.0 * e.std_error;
  }
  std::string detail = "ratio eta=1e-4 / eta=1e-1 = " + fmt(probe.ratio) + " (need <= 5), region " +
                       std::to_string(probe.region.size()) + " sites, " + std::to_string(probe.pairs.size()) +
                       " pairs; single site: ";
  for (const auto& point : site.points) {
    detail += fmt(point.estimates.front().mean) + " ";
  }
  detail += "(bound 2 sqrt 2 + 3 stderr, worst margin " + fmt(worst_margin) + ")";
  return {ratio_ok && site_ok, detail};
}

// ---- 9. localization diagnostics --------------------------------------------

Outcome localization(bool quick) {
  const TreeParams params{2, 2.0, quick ? 62 : 88};
  auto ball = std::make_shared<const TreeBall>(TreeBall::build(params));
  DisorderSpec disorder;
  disorder.lambda = 5.0;
  disorder.master_seed = kAcceptanceSeed + 9;
  const auto v = sample_potential(disorder, *ball, 0);
  const auto h = assemble(ball, LaplacianKind::adjacency, v, disorder.lambda);
  const auto dec = spectrum_full(h);
  const auto metrics = eigen_metrics(dec, *ball);
  std::vector<double> ipr;
  for (const auto& m : metrics) ipr.push_back(m.ipr);
  std::sort(ipr.begin(), ipr.end());
  const double median = ipr.size() % 2 ? ipr[ipr.size() / 2] : 0.5 * (ipr[ipr.size() / 2 - 1] + ipr[ipr.size() / 2]);

  const SpectralPoint probe{0.0, 1.0};
  double worst = 0.0;
  std::mt19937_64 rng(kAcceptanceSeed + 9);
  std::vector<VertexId> sites{0, static_cast<VertexId>(ball->size() - 1)};
  for (int i = 0; i < 8; ++i) sites.push_back(static_cast<VertexId>(rng() % ball->size()));
  for (auto x : sites) {
    const auto atoms = spectral_measure(dec, x);
    worst = std::max(worst, std::abs(stieltjes_transform(atoms, probe.z()) - green_entry(h, x, x, probe)));
  }
  return {median >= 0.01 && worst <= 1e-8,
          std::to_string(ball->size()) + " vertices, median IPR = " + fmt(median) + " (need >= 0.01), Stieltjes residual = " +
              fmt(worst, 3) + " over " + std::to_string(sites.size()) + " sites (tol 1e-8)"};
}

// ---- 10. determinism across worker counts -----------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(bool quick) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("sparsetree_determinism_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  std::filesystem::create_directories(dir);
  std::vector<std::string> outputs;
  std::ostringstream sink;
  int codes = 0;
  for (const char* workers : {"1", "8"}) {
    const auto out = (dir / (std::string("moments_w") + workers + ".jsonl")).string();
    const std::vector<std::string> args{"moments", "--k", "2", "--gamma", "2", "--radius", "60",
                                        "--lambda", "3", "--eta", "0.001", "--samples", quick ? "400" : "2000",
                                        "--seed", "77", "--workers", workers, "--output", out};
    codes |= cli::run(args, sink, sink);
    outputs.push_back(slurp(out));
  }
  std::filesystem::remove_all(dir);
  const bool same = codes == 0 && !outputs[0].empty() && outputs[0] == outputs[1];
  return {same, std::string(same ? "identical" : "DIFFERENT") + " records at workers 1 and 8 (" +
                    std::to_string(outputs[0].size()) + " bytes)" + (codes ? ", a run failed" : "")};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;
  std::function<Outcome(const AcceptanceOptions&)> run;
};

}  // namespace

LineGeometry PathShape::geometry() const {
  const std::int64_t branch = start_depth - up;
  const auto depths = junction_depths(tree, start_depth + down);
  auto is_junction = [&](std::int64_t depth) { return std::binary_search(depths.begin(), depths.end(), depth); };
  LineGeometry g;
  g.length = up + down;
  for (std::int64_t i = 0; i <= up; ++i) {
    if (is_junction(start_depth - i)) g.junction_offsets.push_back(i);
  }
  for (std::int64_t j = 1; j <= down; ++j) {
    if (is_junction(branch + j)) g.junction_offsets.push_back(up + j);
  }
  return g;
}

PathShape sample_segmentation_instance(std::uint64_t seed, std::uint64_t index) {
  for (std::uint32_t attempt = 0;; ++attempt) {
    const auto a = uniform_pair(seed, Stream::geometry, index, 4 * attempt);
    const auto b = uniform_pair(seed, Stream::geometry, index, 4 * attempt + 1);
    const auto c = uniform_pair(seed, Stream::geometry, index, 4 * attempt + 2);
    PathShape shape;
    shape.tree.k = 2 + static_cast<int>(a[0] * 3);
    shape.tree.gamma = 1.3 + 1.7 * a[1];
    shape.L0 = 5 + static_cast<int>(b[0] * 8);
    const std::int64_t L = shape.L0;

    // First shell whose stretches are long enough for the gap condition.
    int n0 = 1;
    while (stretch_length(shape.tree.gamma, n0) <= 8 * L) ++n0;
    const int m = n0 - 1 + static_cast<int>(b[1] * 3);
    const std::int64_t base = m == 0 ? 0 : shell_radius(shape.tree, m);
    const std::int64_t span = 40 * L;
    if (c[0] < 0.5) {
      // Straight descent starting somewhere in the stretch below `base`.
      shape.up = 0;
      shape.start_depth = base + 1 + static_cast<std::int64_t>(c[1] * static_cast<double>(stretch_length(shape.tree.gamma, m + 1)));
      shape.down = 7 * L + 1 + static_cast<std::int64_t>(uniform_pair(seed, Stream::geometry, index, 4 * attempt + 3)[0] * span);
    } else {
      // Up to the junction at `base`, then down a different branch.
      const auto d = uniform_pair(seed, Stream::geometry, index, 4 * attempt + 3);
      shape.up = 1 + static_cast<std::int64_t>(c[1] * span / 2);
      shape.down = 1 + static_cast<std::int64_t>(d[0] * span);
      shape.start_depth = base + shape.up;
    }
    shape.tree.radius = shape.start_depth + shape.down;
    try {
      (void)segment_line(shape.geometry(), shape.L0);
      return shape;
    } catch (const SegmentationError&) {
      // resample
    }
  }
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  const std::vector<Criterion> criteria{
      {1, "counting exactness", 10, [](const auto& o) { return counting_exactness(o.quick); }},
      {2, "dimension formula", 1, [](const auto&) { return dimension_formula(); }},
      {3, "Green oracle equivalence", 60, [](const auto& o) { return green_oracle(o.quick); }},
      {4, "resolvent expansion identity", 60, [](const auto& o) { return expansion_identity(o.quick); }},
      {5, "segmentation properties", 30, [](const auto& o) { return segmentation_fuzz(o.quick); }},
      {6, "fractional-moment decay on the tree", 600, [](const auto& o) { return tree_decay(o.quick, o.workers); }},
      {7, "one-dimensional decay", 300, [](const auto& o) { return minami(o.quick, o.workers); }},
      {8, "boundedness in eta", 300, [](const auto& o) { return boundedness(o.quick, o.workers); }},
      {9, "localization diagnostics", 300, [](const auto& o) { return localization(o.quick); }},
      {10, "determinism across worker counts", 120, [](const auto& o) { return determinism(o.quick); }},
  };
  std::vector<CriterionResult> results;
  for (const auto& c : criteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.time_limit = c.time_limit;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto outcome = c.run(options);
      r.passed = outcome.passed;
      r.detail = outcome.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.time_limit) {
      r.passed = false;
      r.detail += "; exceeded time limit";
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "[" << (r.passed ? "PASS" : "FAIL") << "] criterion " << std::setw(2) << r.id << "  " << r.name << " ("
     << std::fixed << std::setprecision(2) << r.seconds << " s / " << std::setprecision(0) << r.time_limit
     << " s): " << r.detail;
  return os.str();
}

}  // namespace sparsetree

#include "sparsetree/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "sparsetree/stats.hpp"

namespace sparsetree {

namespace {

void check_exponent(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("moment exponent s must lie in (0, 1), got " + std::to_string(s));
  }
}

void check_samples(std::size_t samples) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
}

/// Runs fn(m) for m in [0, count) on a pool of threads. fn must only write to slots owned
/// by m. The first exception thrown by any worker is rethrown here.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t m = 0; m < count; ++m) fn(m);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t m = next.fetch_add(1);
          if (m >= count || failed.load()) return;
          try {
            fn(m);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Reduces values[m * width + t] over m, in order of m, for every column t.
std::vector<RunningStats> reduce_columns(const std::vector<double>& values, std::size_t rows,
                                         std::size_t width) {
  std::vector<RunningStats> stats(width);
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t t = 0; t < width; ++t) stats[t].add(values[m * width + t]);
  }
  return stats;
}

}  // namespace

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void MomentRequest::validate() const {
  tree.validate();
  disorder.validate();
  z.validate();
  check_exponent(s);
  check_samples(samples);
  if (targets.empty()) throw std::invalid_argument("moment request needs at least one target");
}

std::vector<MomentEstimate> fractional_moment(const MomentRequest& request, unsigned workers) {
  request.validate();
  auto ball = std::make_shared<const TreeBall>(TreeBall::build(request.tree));
  return fractional_moment(ball, request, workers);
}

std::vector<MomentEstimate> fractional_moment(const std::shared_ptr<const TreeBall>& ball,
                                              const MomentRequest& request, unsigned workers) {
  request.disorder.validate();
  request.z.validate();
  check_exponent(request.s);
  check_samples(request.samples);
  if (request.targets.empty()) throw std::invalid_argument("moment request needs at least one target");
  ball->require(request.source);
  for (auto t : request.targets) ball->require(t);

  const std::size_t width = request.targets.size();
  std::vector<double> values(request.samples * width);
  parallel_for(request.samples, workers, [&](std::size_t m) {
    const auto v = sample_potential(request.disorder, *ball, m);
    const auto h = assemble(ball, request.kind, v, request.disorder.lambda);
    // G(x0, v) = G(v, x0): one column at the source serves every target.
    const auto column = resolvent_column(h, request.source, request.z);
    for (std::size_t t = 0; t < width; ++t) {
      values[m * width + t] = std::pow(std::abs(column[request.targets[t]]), request.s);
    }
  });

  const auto stats = reduce_columns(values, request.samples, width);
  std::vector<MomentEstimate> out(width);
  for (std::size_t t = 0; t < width; ++t) {
    out[t] = {request.targets[t], ball->distance(request.source, request.targets[t]), stats[t].mean(),
              stats[t].standard_error(), request.samples};
  }
  return out;
}

DecayFit fit_decay(std::span<const MomentEstimate> points) {
  std::vector<double> d;
  std::vector<double> log_mean;
  DecayFit fit;
  for (const auto& p : points) {
    if (!(p.mean > 0.0) || !std::isfinite(p.mean)) {
      ++fit.excluded;
      continue;
    }
    d.push_back(static_cast<double>(p.distance));
    log_mean.push_back(std::log(p.mean));
  }
  if (d.size() < 3) {
    throw std::invalid_argument("decay fit needs >= 3 points with a positive mean, got " +
                                std::to_string(d.size()));
  }
  const auto line = least_squares(d, log_mean);
  fit.rate = -line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.min_distance = static_cast<std::int64_t>(*std::min_element(d.begin(), d.end()));
  fit.max_distance = static_cast<std::int64_t>(*std::max_element(d.begin(), d.end()));
  fit.points_used = d.size();
  fit.no_decay = !(fit.rate > 0.0);
  return fit;
}

double segmentation_decay_rate(int L0) {
  if (L0 < 1) throw std::invalid_argument("L0 must be >= 1");
  return std::numbers::ln2 / (6.0 * L0);
}

void MinamiRequest::validate() const {
  disorder.validate();
  z.validate();
  check_exponent(s);
  check_samples(samples);
  if (length < 3) throw std::invalid_argument("minami scan needs length >= 3");
}

MinamiResult minami_scan(const MinamiRequest& request, unsigned workers) {
  request.validate();
  const std::size_t sites = request.length + 1;
  auto ball = std::make_shared<const TreeBall>(TreeBall::line(sites));

  std::vector<double> values(request.samples * sites);
  parallel_for(request.samples, workers, [&](std::size_t m) {
    const auto v = sample_potential(request.disorder, *ball, m);
    const auto h = assemble(ball, request.kind, v, request.disorder.lambda);
    std::vector<VertexId> segment;
    std::vector<Complex> column;
    std::vector<Complex> pivots;
    for (std::size_t n = 0; n < sites; ++n) {
      segment.push_back(static_cast<VertexId>(n));
      const auto h_segment = restrict_outside(h, Region(*ball, segment));
      resolvent_column(h_segment, static_cast<VertexId>(n), request.z, column, pivots);
      values[m * sites + n] = std::pow(std::abs(column[0]), request.s);
    }
  });

  const auto stats = reduce_columns(values, request.samples, sites);
  MinamiResult result;
  result.estimates.resize(sites);
  for (std::size_t n = 0; n < sites; ++n) {
    result.estimates[n] = {static_cast<VertexId>(n), static_cast<std::int64_t>(n), stats[n].mean(),
                           stats[n].standard_error(), request.samples};
  }
  result.fit = fit_decay(result.estimates);
  return result;
}

void BoundProbeRequest::validate() const {
  tree.validate();
  disorder.validate();
  check_exponent(s);
  check_samples(samples);
  if (region_size < 1) throw std::invalid_argument("region size must be >= 1");
  if (pairs < 1) throw std::invalid_argument("bound probe needs at least one pair");
  if (etas.empty()) throw std::invalid_argument("bound probe needs at least one eta");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    SpectralPoint{energy, etas[i]}.validate();
    if (i > 0 && !(etas[i] < etas[i - 1])) {
      throw std::invalid_argument("eta list must be strictly descending");
    }
  }
}

namespace {

std::size_t pick(std::uint64_t seed, std::uint64_t draw, std::size_t n) {
  const double u = uniform_pair(seed, Stream::geometry, draw, 0)[0];
  return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
}

/// Connected region grown from a random vertex by attaching random frontier vertices.
std::vector<VertexId> random_region(const TreeBall& ball, std::size_t size, std::uint64_t seed) {
  if (size > ball.size()) {
    throw std::invalid_argument("region size " + std::to_string(size) + " exceeds the ball (" +
                                std::to_string(ball.size()) + " vertices)");
  }
  std::uint64_t draw = 0;
  std::vector<VertexId> members{static_cast<VertexId>(pick(seed, draw++, ball.size()))};
  while (members.size() < size) {
    std::vector<VertexId> frontier;
    for (auto x : members) {
      for (auto y : ball.neighbors(x)) {
        if (std::find(members.begin(), members.end(), y) == members.end()) frontier.push_back(y);
      }
    }
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    members.push_back(frontier[pick(seed, draw++, frontier.size())]);
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

BoundProbeResult bound_probe(const BoundProbeRequest& request, unsigned workers) {
  request.validate();
  auto ball = std::make_shared<const TreeBall>(TreeBall::build(request.tree));
  const std::uint64_t seed = request.disorder.master_seed;

  BoundProbeResult result;
  result.region = random_region(*ball, request.region_size, seed);
  const Region omega(*ball, result.region);
  for (std::size_t p = 0; p < request.pairs; ++p) {
    const std::uint64_t base = 1'000'000 + 2 * p;
    result.pairs.emplace_back(result.region[pick(seed, base, result.region.size())],
                              result.region[pick(seed, base + 1, result.region.size())]);
  }

  const std::size_t n_eta = request.etas.size();
  const std::size_t width = n_eta * request.pairs;
  std::vector<double> values(request.samples * width);
  parallel_for(request.samples, workers, [&](std::size_t m) {
    const auto v = sample_potential(request.disorder, *ball, m);
    const auto h = restrict_outside(assemble(ball, request.kind, v, request.disorder.lambda), omega);
    std::vector<Complex> column;
    std::vector<Complex> pivots;
    for (std::size_t e = 0; e < n_eta; ++e) {
      const SpectralPoint z{request.energy, request.etas[e]};
      for (std::size_t p = 0; p < request.pairs; ++p) {
        const auto [x, y] = result.pairs[p];
        resolvent_column(h, y, z, column, pivots);
        values[m * width + e * request.pairs + p] = std::pow(std::abs(column[x]), request.s);
      }
    }
  });

  const auto stats = reduce_columns(values, request.samples, width);
  for (std::size_t e = 0; e < n_eta; ++e) {
    BoundProbePoint point;
    point.eta = request.etas[e];
    for (std::size_t p = 0; p < request.pairs; ++p) {
      const auto& st = stats[e * request.pairs + p];
      const auto [x, y] = result.pairs[p];
      point.estimates.push_back({y, ball->distance(x, y), st.mean(), st.standard_error(), request.samples});
      point.max_mean = std::max(point.max_mean, st.mean());
    }
    result.points.push_back(std::move(point));
  }
  result.ratio = result.points.front().max_mean > 0.0
                     ? result.points.back().max_mean / result.points.front().max_mean
                     : 0.0;
  return result;
}

}  // namespace sparsetree

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "sparsetree/disorder.hpp"
#include "sparsetree/green.hpp"
#include "sparsetree/hamiltonian.hpp"
#include "sparsetree/tree.hpp"

namespace sparsetree {

/// Worker count 0 means "all available hardware threads".
unsigned resolve_workers(unsigned requested);

/// Fractional moment <|G^r(x0, v; z)|^s> for every target v, averaged over disorder.
struct MomentRequest {
  TreeParams tree;
  LaplacianKind kind = LaplacianKind::adjacency;
  DisorderSpec disorder;
  VertexId source = 0;
  std::vector<VertexId> targets;
  SpectralPoint z;
  double s = 0.5;
  std::size_t samples = 1000;

  void validate() const;
};

struct MomentEstimate {
  VertexId target = 0;
  std::int64_t distance = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Realization m uses potential substream m. Realizations are spread over `workers`
/// threads and reduced in realization order, so the result does not depend on `workers`.
std::vector<MomentEstimate> fractional_moment(const MomentRequest& request, unsigned workers = 0);

/// Same estimate on an already built ball; targets are checked against it.
std::vector<MomentEstimate> fractional_moment(const std::shared_ptr<const TreeBall>& ball,
                                              const MomentRequest& request, unsigned workers = 0);

/// Least-squares fit of ln(mean) = ln(A) - q d.
struct DecayFit {
  double rate = 0.0;       // q
  double prefactor = 0.0;  // A
  double r_squared = 0.0;
  std::int64_t min_distance = 0;
  std::int64_t max_distance = 0;
  std::size_t points_used = 0;
  std::size_t excluded = 0;  // points dropped for a non-positive mean
  bool no_decay = false;     // rate <= 0
};

/// Needs at least three points with a positive mean.
DecayFit fit_decay(std::span<const MomentEstimate> points);

/// ln 2 / (6 L0), the decay rate produced by the segmentation argument.
double segmentation_decay_rate(int L0);

/// One-dimensional scan: <|G_[0,n](0, n; z)|^s> for n = 0..length, where [0,n] is a segment
/// of Z with Dirichlet ends, so n is always a boundary point of the segment.
struct MinamiRequest {
  std::size_t length = 60;
  LaplacianKind kind = LaplacianKind::adjacency;
  DisorderSpec disorder;
  double s = 0.5;
  SpectralPoint z;
  std::size_t samples = 1000;

  void validate() const;
};

struct MinamiResult {
  std::vector<MomentEstimate> estimates;  // index n, distance n
  DecayFit fit;
};

MinamiResult minami_scan(const MinamiRequest& request, unsigned workers = 0);

/// Boundedness of <|G_Omega(x, y; E + i eta)|^s> as eta decreases, for a random connected
/// region Omega of the ball and random pairs x, y in it. The same disorder realizations are
/// used at every eta.
struct BoundProbeRequest {
  TreeParams tree{2, 2.0, 14};
  LaplacianKind kind = LaplacianKind::adjacency;
  std::size_t region_size = 8;
  DisorderSpec disorder;
  double s = 0.5;
  double energy = 0.0;
  std::vector<double> etas{1e-1, 1e-2, 1e-3, 1e-4};
  std::size_t samples = 5000;
  std::size_t pairs = 4;

  void validate() const;
};

struct BoundProbePoint {
  double eta = 0.0;
  double max_mean = 0.0;                   // largest estimate over the pairs
  std::vector<MomentEstimate> estimates;  // one per pair, target = y
};

struct BoundProbeResult {
  std::vector<VertexId> region;
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::vector<BoundProbePoint> points;  // in the order of request.etas
  /// max_mean at the smallest eta over max_mean at the largest eta.
  double ratio = 0.0;
};

BoundProbeResult bound_probe(const BoundProbeRequest& request, unsigned workers = 0);

}  // namespace sparsetree

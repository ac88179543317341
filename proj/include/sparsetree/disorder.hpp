#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sparsetree/tree.hpp"

namespace sparsetree {

struct UniformDisorder {
  double lower = -0.5;
  double upper = 0.5;
};

struct GaussianDisorder {
  double mean = 0.0;
  double sd = 1.0;
};

struct CauchyDisorder {
  double location = 0.0;
  double scale = 1.0;
};

using Distribution = std::variant<UniformDisorder, GaussianDisorder, CauchyDisorder>;

/// Single-site distribution of the potential, the coupling lambda, and the master seed
/// from which every realization is derived.
struct DisorderSpec {
  Distribution distribution = UniformDisorder{};
  double lambda = 1.0;
  std::uint64_t master_seed = 0;

  void validate() const;
};

std::string distribution_name(const Distribution& d);

/// Independent random substreams. Each draw is addressed by (master seed, stream, realization,
/// vertex) and never depends on which other draws were made or in which order.
enum class Stream : std::uint32_t { potential = 0, geometry = 1 };

/// Two uniform (0,1) draws addressed by the given coordinates.
std::array<double, 2> uniform_pair(std::uint64_t master_seed, Stream stream,
                                   std::uint64_t realization, std::uint32_t index);

/// One i.i.d. draw per site (unscaled; lambda is applied at assembly).
std::vector<double> sample_potential(const DisorderSpec& spec, std::size_t sites,
                                     std::uint64_t realization_index);

inline std::vector<double> sample_potential(const DisorderSpec& spec, const TreeBall& ball,
                                            std::uint64_t realization_index) {
  return sample_potential(spec, ball.size(), realization_index);
}

}  // namespace sparsetree

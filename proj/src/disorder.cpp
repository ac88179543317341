#include "sparsetree/disorder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sparsetree/philox.hpp"

namespace sparsetree {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void DisorderSpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be a finite number > 0, got " + std::to_string(lambda));
  }
  std::visit(overloaded{
                 [](const UniformDisorder& u) {
                   if (!(u.upper > u.lower) || !std::isfinite(u.lower) || !std::isfinite(u.upper)) {
                     throw std::invalid_argument("uniform disorder needs finite a < b");
                   }
                 },
                 [](const GaussianDisorder& g) {
                   if (!(g.sd > 0.0) || !std::isfinite(g.mean) || !std::isfinite(g.sd)) {
                     throw std::invalid_argument("gaussian disorder needs finite mean and sd > 0");
                   }
                 },
                 [](const CauchyDisorder& c) {
                   if (!(c.scale > 0.0) || !std::isfinite(c.location) || !std::isfinite(c.scale)) {
                     throw std::invalid_argument("cauchy disorder needs finite location and scale > 0");
                   }
                 },
             },
             distribution);
}

std::string distribution_name(const Distribution& d) {
  return std::visit(overloaded{
                        [](const UniformDisorder&) { return std::string("uniform"); },
                        [](const GaussianDisorder&) { return std::string("gaussian"); },
                        [](const CauchyDisorder&) { return std::string("cauchy"); },
                    },
                    d);
}

std::array<double, 2> uniform_pair(std::uint64_t master_seed, Stream stream,
                                   std::uint64_t realization, std::uint32_t index) {
  const Philox4x32 gen(master_seed);
  const auto out = gen({index, static_cast<std::uint32_t>(stream),
                        static_cast<std::uint32_t>(realization),
                        static_cast<std::uint32_t>(realization >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {to_unit_open(a), to_unit_open(b)};
}

std::vector<double> sample_potential(const DisorderSpec& spec, std::size_t sites,
                                     std::uint64_t realization_index) {
  if (sites > 0xFFFFFFFFull) throw std::invalid_argument("too many sites for one substream");
  std::vector<double> v(sites);
  const auto draw = [&](auto&& transform) {
    for (std::size_t i = 0; i < sites; ++i) {
      const auto u = uniform_pair(spec.master_seed, Stream::potential, realization_index,
                                  static_cast<std::uint32_t>(i));
      v[i] = transform(u);
    }
  };
  std::visit(overloaded{
                 [&](const UniformDisorder& d) {
                   draw([&](const std::array<double, 2>& u) { return d.lower + (d.upper - d.lower) * u[0]; });
                 },
                 [&](const GaussianDisorder& d) {
                   draw([&](const std::array<double, 2>& u) {
                     return d.mean + d.sd * std::sqrt(-2.0 * std::log(u[0])) *
                                         std::cos(2.0 * std::numbers::pi * u[1]);
                   });
                 },
                 [&](const CauchyDisorder& d) {
                   draw([&](const std::array<double, 2>& u) {
                     return d.location + d.scale * std::tan(std::numbers::pi * (u[0] - 0.5));
                   });
                 },
             },
             spec.distribution);
  return v;
}

}  // namespace sparsetree

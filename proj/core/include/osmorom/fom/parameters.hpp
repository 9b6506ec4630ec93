#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "osmorom/fem/mesh.hpp"

namespace osmorom::fom {

inline constexpr double kGamma = 0.1;
inline constexpr double kUExt = 0.0;

/// mu = (alpha, beta, delta_1..delta_L). gamma and u_ext are model constants.
struct Parameters {
  double alpha = 0.1;
  double beta = 0.1;
  std::vector<double> delta;
  double gamma = kGamma;
  double u_ext = kUExt;

  /// Throws ConfigError unless alpha, beta are finite and positive.
  void validate(std::size_t num_shapes) const;
  std::string to_string() const;
};

/// Box [lo, hi] per parameter axis, ordered alpha, beta, delta_1, delta_2, ...
struct ParameterDomain {
  std::vector<double> lo;
  std::vector<double> hi;

  /// [0.1, 1] x [0.001, 0.1] x [0, 1]^2.
  static ParameterDomain standard();

  int dims() const { return static_cast<int>(lo.size()); }
  Parameters at(const std::vector<double>& coords) const;
};

/// Uniform doubles in [0, 1) with 53 random bits, independent of the
/// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

/// Points drawn uniformly from the domain. Axes with lo == hi stay fixed.
std::vector<Parameters> random_parameters(const ParameterDomain& domain, int count, std::uint64_t seed);

/// Tensor grid with `counts[k]` equidistant points on axis k (a count of 1
/// picks the lower bound). Ordered with the last axis varying fastest.
std::vector<Parameters> parameter_grid(const ParameterDomain& domain, const std::vector<int>& counts);

using Shape = std::function<fem::Point(const fem::Point&)>;

/// Polar angle in (-pi, pi].
double polar_angle(const fem::Point& x);

/// r1(x) = exp(-theta^2) x and r2(x) = 0.1 sin(10 theta) x.
std::vector<Shape> default_shapes();

}  // namespace osmorom::fom

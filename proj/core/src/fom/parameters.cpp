#include "osmorom/fom/parameters.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "osmorom/errors.hpp"

namespace osmorom::fom {

void Parameters::validate(std::size_t num_shapes) const {
  if (!(std::isfinite(alpha) && alpha > 0.0)) throw ConfigError("alpha must be finite and positive");
  if (!(std::isfinite(beta) && beta > 0.0)) throw ConfigError("beta must be finite and positive");
  if (delta.size() != num_shapes) {
    throw ConfigError("expected " + std::to_string(num_shapes) + " shape coefficients, got " +
                      std::to_string(delta.size()));
  }
  for (double d : delta)
    if (!std::isfinite(d)) throw ConfigError("shape coefficient is not finite");
}

std::string Parameters::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "(" << alpha << ", " << beta;
  for (double d : delta) os << ", " << d;
  os << ")";
  return os.str();
}

ParameterDomain ParameterDomain::standard() { return {{0.1, 0.001, 0.0, 0.0}, {1.0, 0.1, 1.0, 1.0}}; }

Parameters ParameterDomain::at(const std::vector<double>& x) const {
  if (x.size() != lo.size() || x.size() < 2) throw ConfigError("parameter coordinate count mismatch");
  Parameters p;
  p.alpha = x[0];
  p.beta = x[1];
  p.delta.assign(x.begin() + 2, x.end());
  return p;
}

std::vector<Parameters> random_parameters(const ParameterDomain& domain, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Parameters> out;
  out.reserve(count);
  std::vector<double> x(domain.dims());
  for (int k = 0; k < count; ++k) {
    for (int a = 0; a < domain.dims(); ++a) x[a] = rng.uniform(domain.lo[a], domain.hi[a]);
    out.push_back(domain.at(x));
  }
  return out;
}

std::vector<Parameters> parameter_grid(const ParameterDomain& domain, const std::vector<int>& counts) {
  if (static_cast<int>(counts.size()) != domain.dims()) throw ConfigError("grid needs one count per axis");
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw ConfigError("grid counts must be positive");
    total *= c;
  }
  std::vector<Parameters> out;
  out.reserve(total);
  std::vector<int> idx(counts.size(), 0);
  std::vector<double> x(counts.size());
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t a = 0; a < counts.size(); ++a) {
      x[a] = counts[a] == 1 ? domain.lo[a]
                            : domain.lo[a] + (domain.hi[a] - domain.lo[a]) * idx[a] / (counts[a] - 1);
    }
    out.push_back(domain.at(x));
    for (int a = static_cast<int>(counts.size()) - 1; a >= 0; --a) {
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

double polar_angle(const fem::Point& x) {
  const double t = std::atan2(x.y(), x.x());
  // atan2 returns -pi for (-1, -0); fold it onto +pi.
  return t <= -std::numbers::pi ? std::numbers::pi : t;
}

std::vector<Shape> default_shapes() {
  return {
      [](const fem::Point& x) -> fem::Point {
        const double t = polar_angle(x);
        return std::exp(-t * t) * x;
      },
      [](const fem::Point& x) -> fem::Point { return 0.1 * std::sin(10.0 * polar_angle(x)) * x; },
  };
}

}  // namespace osmorom::fom

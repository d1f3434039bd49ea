#include "igp/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace igp {

void validate(const Params& p) {
  const std::array<std::pair<const char*, double>, 12> positive{{{"alpha", p.alpha},
                                                                 {"a", p.a},
                                                                 {"b", p.b},
                                                                 {"c", p.c},
                                                                 {"d", p.d},
                                                                 {"gamma", p.gamma},
                                                                 {"beta", p.beta},
                                                                 {"mu", p.mu},
                                                                 {"nu", p.nu},
                                                                 {"d0", p.d0},
                                                                 {"d1", p.d1},
                                                                 {"d2", p.d2}}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(fmt::format("parameter '{}' must be > 0 (got {})", name, value));
    }
  }
  const std::array<std::pair<const char*, double>, 3> nonneg{{{"e1", p.e1}, {"e2", p.e2}, {"q", p.q}}};
  for (const auto& [name, value] : nonneg) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(fmt::format("parameter '{}' must be >= 0 (got {})", name, value));
    }
  }
  if (p.model != Model::ActiveSearch && p.model != Model::ResourceAttraction) {
    throw std::invalid_argument("model id must be 1 or 2");
  }
}

Survivability survivability(const Params& p) {
  return {p.gamma * p.b > p.mu, p.beta * p.c > p.nu};
}

Kinetics reaction(const Params& p, double k, double u, double v, double w) {
  if (std::isnan(k) || std::isnan(u) || std::isnan(v) || std::isnan(w)) {
    throw std::invalid_argument("reaction: NaN input");
  }
  const double meso_uptake = p.b * u * v / (u + p.a);
  const double top_uptake = p.c * v * w / (v + p.d);
  return {
      p.alpha * u * (1.0 - u / k) - meso_uptake,
      p.gamma * meso_uptake - top_uptake - p.mu * v,
      p.beta * top_uptake - p.nu * w,
  };
}

double chi1(const Params& p, double v, double w) { return p.e1 * w - p.e2 * v; }

double chi2(const Params& p, double u, double w) { return p.q * u * w; }

double sensitivity(const Params& p, double u, double v, double w) {
  return p.model == Model::ActiveSearch ? chi1(p, v, w) : chi2(p, u, w);
}

double min_value(const FieldState& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto* f : {&s.u, &s.v, &s.w}) {
    for (double x : *f) m = std::min(m, x);
  }
  return m;
}

bool has_negative(const FieldState& s, double threshold) { return min_value(s) < threshold; }

std::string model_name(Model m) {
  return m == Model::ActiveSearch ? "active-search" : "resource-attraction";
}

}  // namespace igp

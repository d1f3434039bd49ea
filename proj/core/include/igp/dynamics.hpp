#pragma once

// Model constants and pointwise kinetics shared by the ODE and PDE paths.
//
//   u' = d0 Lap u + alpha u (1 - u/K) - b u v / (u + a)
//   v' = d1 Lap v + gamma b u v / (u + a) - c v w / (v + d) - mu v
//   w' = d2 Lap w + beta c v w / (v + d) - nu w - div(chi grad s)
//
// Model::ActiveSearch:       chi = chi1(v, w) = e1 w - e2 v,  s = v
// Model::ResourceAttraction: chi = chi2(u, w) = q u w,        s = u

#include <array>
#include <string>
#include <vector>

namespace igp {

enum class Model { ActiveSearch = 1, ResourceAttraction = 2 };

struct Params {
  double alpha = 5.0;  // resource intrinsic growth
  double a = 2.0;      // resource half-saturation
  double b = 5.0;      // meso predation rate
  double c = 0.1;      // top predation rate
  double d = 2.0;      // meso half-saturation
  double gamma = 1.0;  // meso conversion
  double beta = 1.0;   // top conversion
  double mu = 0.05;    // meso mortality
  double nu = 0.05;    // top mortality
  double d0 = 0.1;
  double d1 = 1.0;
  double d2 = 1.0;
  double e1 = 1.0;
  double e2 = 1.0;
  double q = 0.0;
  Model model = Model::ActiveSearch;

  friend bool operator==(const Params&, const Params&) = default;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const Params& p);

/// gamma b > mu and beta c > nu; without them v (resp. w) cannot persist.
struct Survivability {
  bool meso_can_persist = true;
  bool top_can_persist = true;
};
Survivability survivability(const Params& p);

struct Kinetics {
  double f = 0.0;  // resource
  double g = 0.0;  // mesopredator
  double h = 0.0;  // top predator
};

/// Reaction parts of the three equations. Throws on NaN input.
Kinetics reaction(const Params& p, double k, double u, double v, double w);

double chi1(const Params& p, double v, double w);
double chi2(const Params& p, double u, double w);

/// Sensitivity of the active model at a point.
double sensitivity(const Params& p, double u, double v, double w);

/// Jacobian of the kinetics, row-major [f; g; h] by [u, v, w].
using Mat3 = std::array<std::array<double, 3>, 3>;

struct FieldState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> w;

  std::size_t size() const { return u.size(); }
};

/// Value below which a nodal density is flagged as negative.
inline constexpr double kNegativityThreshold = -1e-8;

/// Smallest nodal value over the three species.
double min_value(const FieldState& s);
bool has_negative(const FieldState& s, double threshold = kNegativityThreshold);

std::string model_name(Model m);

}  // namespace igp

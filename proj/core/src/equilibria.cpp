#include "igp/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace igp {

Stability classify(double max_real_part) {
  if (max_real_part < -kMarginalBand) return Stability::Stable;
  if (max_real_part > kMarginalBand) return Stability::Unstable;
  return Stability::Marginal;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

std::string to_string(SwitchKind k) {
  switch (k) {
    case SwitchKind::Appears: return "appears";
    case SwitchKind::Disappears: return "disappears";
    case SwitchKind::LosesStability: return "loses-stability";
    case SwitchKind::GainsStability: return "gains-stability";
  }
  return "?";
}

State3 ode_rhs(const Params& p, double k, const State3& x) {
  const Kinetics r = reaction(p, k, x[0], x[1], x[2]);
  return {r.f, r.g, r.h};
}

double nullcline_residual(const Params& p, double k, const State3& x) {
  const State3 f = ode_rhs(p, k, x);
  return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
}

Mat3 jacobian(const Params& p, double k, const State3& x) {
  const auto [u, v, w] = x;
  const double ua = u + p.a;
  const double vd = v + p.d;
  Mat3 j{};
  j[0][0] = p.alpha * (1.0 - 2.0 * u / k) - p.b * v * p.a / (ua * ua);
  j[0][1] = -p.b * u / ua;
  j[0][2] = 0.0;
  j[1][0] = p.gamma * p.b * v * p.a / (ua * ua);
  j[1][1] = p.gamma * p.b * u / ua - p.c * w * p.d / (vd * vd) - p.mu;
  j[1][2] = -p.c * v / vd;
  j[2][0] = 0.0;
  j[2][1] = p.beta * p.c * w * p.d / (vd * vd);
  j[2][2] = p.beta * p.c * v / vd - p.nu;
  return j;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(const State3& x) {
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

void analyse(const Params& p, double k, EquilibriumPoint& pt) {
  if (!finite(pt.x)) {
    pt.exists = false;
    pt.max_re = kNaN;
    pt.eigenvalues.fill({kNaN, kNaN});
    pt.stability = Stability::Marginal;
    return;
  }
  pt.eigenvalues = eigen3(jacobian(p, k, pt.x));
  pt.max_re = std::max({pt.eigenvalues[0].real(), pt.eigenvalues[1].real(), pt.eigenvalues[2].real()});
  pt.stability = classify(pt.max_re);
}

}  // namespace

std::vector<EquilibriumPoint> compute_equilibria(const Params& p, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("compute_equilibria: K must be > 0");
  std::vector<EquilibriumPoint> out(5);
  for (std::size_t i = 0; i < 5; ++i) out[i].label = kEquilibriumLabels[i];

  out[0].x = {0.0, 0.0, 0.0};
  out[0].exists = true;
  out[1].x = {k, 0.0, 0.0};
  out[1].exists = true;

  // Predator-free point.
  const double meso_margin = p.b * p.gamma - p.mu;
  if (meso_margin != 0.0) {
    const double u = p.a * p.mu / meso_margin;
    const double v = p.a * p.alpha * p.gamma * (p.b * p.gamma * k - p.mu * (p.a + k)) / (k * meso_margin * meso_margin);
    out[2].x = {u, v, 0.0};
    out[2].exists = u >= 0.0 && v > 0.0;
  } else {
    out[2].x = {kNaN, kNaN, kNaN};
  }

  // Interior points share v* = d nu / (c beta - nu); u* solves the resource
  // nullcline, w* the mesopredator nullcline.
  const double top_margin = p.c * p.beta - p.nu;
  const double disc = top_margin != 0.0
                          ? (p.c * p.alpha * p.beta * (p.a + k) * (p.a + k) -
                             (4.0 * p.b * p.d * k + (p.a + k) * (p.a + k) * p.alpha) * p.nu) /
                                (top_margin * p.alpha)
                          : kNaN;
  if (top_margin != 0.0 && disc >= 0.0) {
    const double v = p.d * p.nu / top_margin;
    const double root = std::sqrt(disc);
    for (int s = 0; s < 2; ++s) {
      const double u = 0.5 * (-p.a + k + (s == 0 ? -root : root));
      const double w = (p.d + v) * (p.b * p.gamma * u - (p.a + u) * p.mu) / (p.c * (p.a + u));
      auto& pt = out[static_cast<std::size_t>(3 + s)];
      pt.x = {u, v, w};
      pt.exists = u > 0.0 && v > 0.0 && w > 0.0;
    }
  } else {
    out[3].x = out[4].x = {kNaN, kNaN, kNaN};
  }

  for (auto& pt : out) {
    analyse(p, k, pt);
    if (!finite(pt.x)) pt.exists = false;
  }
  return out;
}

std::optional<Stability> p2_condition_prediction(const Params& p, double k) {
  const double growth = p.b * k * p.gamma - p.a * p.mu - k * p.mu;
  if (!(growth > 0.0)) return std::nullopt;
  const double lhs = p.b * p.gamma * p.a;
  if (lhs > growth) return Stability::Stable;
  if (lhs < growth) return Stability::Unstable;
  return std::nullopt;
}

namespace {

struct PointState {
  bool exists = false;
  bool stable = false;  // sign of max real part, only meaningful when exists
  bool operator==(const PointState& o) const { return exists == o.exists && (!exists || stable == o.stable); }
};

PointState state_of(const Params& p, double k, std::size_t index) {
  const auto pts = compute_equilibria(p, k);
  const auto& pt = pts[index];
  return {pt.exists, pt.exists && pt.max_re < 0.0};
}

SwitchKind kind_of(const PointState& before, const PointState& after) {
  if (before.exists != after.exists) return after.exists ? SwitchKind::Appears : SwitchKind::Disappears;
  return after.stable ? SwitchKind::GainsStability : SwitchKind::LosesStability;
}

void locate(const Params& p, std::size_t index, double lo, double hi, const ScanOptions& opts,
            std::vector<Threshold>& out, int depth) {
  const PointState s_lo = state_of(p, lo, index);
  const PointState s_hi = state_of(p, hi, index);
  if (s_lo == s_hi || depth > 16) return;
  double a = lo, b = hi;
  while (b - a > opts.bisection_tol * std::max(1.0, std::abs(a))) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (state_of(p, mid, index) == s_lo) {
      a = mid;
    } else {
      b = mid;
    }
  }
  const PointState s_b = state_of(p, b, index);
  out.push_back({kEquilibriumLabels[index], kind_of(s_lo, s_b), 0.5 * (a + b)});
  // A second switch may hide in the same grid interval.
  if (!(s_b == s_hi) && b < hi) locate(p, index, b, hi, opts, out, depth + 1);
}

}  // namespace

ScanReport scan_table1(const Params& p, const std::vector<double>& k_grid, const ScanOptions& opts) {
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (!(k_grid[i] > 0.0) || (i > 0 && !(k_grid[i] > k_grid[i - 1]))) {
      throw std::invalid_argument("scan_table1: K grid must be positive and strictly ascending");
    }
  }
  ScanReport report;
  for (double k : k_grid) {
    for (auto& pt : compute_equilibria(p, k)) report.rows.push_back({k, std::move(pt)});
  }
  for (std::size_t index = 0; index < 5; ++index) {
    for (std::size_t i = 1; i < k_grid.size(); ++i) {
      locate(p, index, k_grid[i - 1], k_grid[i], opts, report.thresholds, 0);
    }
  }
  std::stable_sort(report.thresholds.begin(), report.thresholds.end(),
                   [](const Threshold& x, const Threshold& y) { return x.k < y.k; });
  return report;
}

std::array<double, 3> pde_mode_stability(const Params& p, double k, double mode, const DiffusivityMap& map) {
  if (mode < 0.0) throw std::invalid_argument("pde_mode_stability: mode eigenvalue must be >= 0");
  const std::array<double, 3> diff{p.d0, p.d1, p.d2};
  auto pick = [&](int i) {
    if (i < 0 || i > 2) throw std::invalid_argument("pde_mode_stability: diffusivity index must be 0, 1 or 2");
    return diff[static_cast<std::size_t>(i)];
  };
  return {
      -mode * pick(map.u) - p.alpha,
      -mode * pick(map.v) + p.b * k * p.gamma / (p.a + k) - p.mu,
      -mode * pick(map.w) - p.nu,
  };
}

}  // namespace igp

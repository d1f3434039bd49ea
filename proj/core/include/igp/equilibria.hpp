#pragma once

// Steady states of the spatially homogeneous system, their linear
// stability, and the K-scan of existence/stability switches.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "igp/dynamics.hpp"

namespace igp {

using State3 = std::array<double, 3>;
using Eigenvalues3 = std::array<std::complex<double>, 3>;

/// Roots of det(A - lambda I). Real Cardano/trigonometric roots are
/// Newton-polished on the characteristic cubic; if a root still misses the
/// residual check, one real root is bracketed by bisection and the rest are
/// obtained by deflation to a quadratic.
Eigenvalues3 eigen3(const Mat3& a);

/// Characteristic polynomial coefficients: lambda^3 + c[2] lambda^2 + c[1] lambda + c[0].
std::array<double, 3> characteristic_polynomial(const Mat3& a);

enum class Stability { Stable, Unstable, Marginal };

/// Half-width of the dead zone around zero for the largest real part.
inline constexpr double kMarginalBand = 1e-9;

Stability classify(double max_real_part);
std::string to_string(Stability s);

/// Origin, resource-only (K, 0, 0), predator-free, and the two interior
/// candidates (smaller and larger resource root).
inline constexpr const char* kEquilibriumLabels[5] = {"P0", "P1", "P2", "P3-", "P3+"};

struct EquilibriumPoint {
  std::string label;  // one of kEquilibriumLabels
  State3 x{};
  bool exists = false;
  Eigenvalues3 eigenvalues{};
  double max_re = 0.0;
  Stability stability = Stability::Marginal;
};

/// Right-hand side of the kinetics at constant carrying capacity k.
State3 ode_rhs(const Params& p, double k, const State3& x);
double nullcline_residual(const Params& p, double k, const State3& x);

/// Analytic Jacobian of ode_rhs.
Mat3 jacobian(const Params& p, double k, const State3& x);

/// Always returns five entries in kEquilibriumLabels order. Points whose formulas are
/// undefined (negative discriminant, b gamma = mu, c beta = nu) carry NaN
/// coordinates and exists = false.
std::vector<EquilibriumPoint> compute_equilibria(const Params& p, double k);

/// Closed-form stability test for the predator-free point P2, when it applies:
/// stable if bK gamma - a mu - K mu > 0 and b gamma a > bK gamma - a mu - K mu,
/// unstable if the first holds and the second is reversed.
std::optional<Stability> p2_condition_prediction(const Params& p, double k);

struct ScanRow {
  double k = 0.0;
  EquilibriumPoint point;
};

enum class SwitchKind { Appears, Disappears, LosesStability, GainsStability };
std::string to_string(SwitchKind k);

struct Threshold {
  std::string label;
  SwitchKind kind;
  double k = 0.0;
};

struct ScanOptions {
  double bisection_tol = 1e-10;  // bracket width in K
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::vector<Threshold> thresholds;  // sorted by K
};

/// Classification per grid K plus every existence/stability switch between
/// grid points, refined by bisection. Stability switches use the sign of the
/// largest real part (no dead zone).
ScanReport scan_table1(const Params& p, const std::vector<double>& k_grid, const ScanOptions& opts = {});

/// Which diffusivity (0 -> d0, 1 -> d1, 2 -> d2) multiplies each species' mode.
struct DiffusivityMap {
  int u = 0;
  int v = 1;
  int w = 2;
};

/// Roots of the linearisation at (K, 0, 0) restricted to a Neumann
/// Laplacian eigenmode with eigenvalue mode >= 0.
std::array<double, 3> pde_mode_stability(const Params& p, double k, double mode, const DiffusivityMap& map = {});

}  // namespace igp

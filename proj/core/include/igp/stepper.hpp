#pragma once

// Time integration of the coupled PDE system and runtime diagnostics.
//
// Diffusion is implicit; reaction and taxis are explicit (lagged). Each
// stage with step h and evaluation state x* solves, per species s,
//
//   (M + h d_s S) x_s^new = M (x_s^base + h R_s(x*)) + [s == w] h r(x*)
//
// with r the taxis vector from assemble_taxis. The RK2 scheme is a
// half-step stage from x^m to x^{m+1/2}, then a full step from x^m with
// rates taken at x^{m+1/2}. The Euler scheme is a single full stage with
// rates at x^m.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "igp/dynamics.hpp"
#include "igp/equilibria.hpp"
#include "igp/fem.hpp"
#include "igp/mesh.hpp"
#include "igp/sparse.hpp"

namespace igp {

enum class Scheme { ImexRk2, ImplicitEuler };
std::string to_string(Scheme s);

struct StepperOptions {
  // Lumped: M + h d S is an M-matrix on the right-triangle mesh, so the
  // implicit diffusion solve maps nonnegative data to nonnegative data.
  // The explicit taxis term carries no such guarantee.
  bool lumped_mass = true;
  SolverOptions solver;
};

/// Per-step bookkeeping for the w-equation of the final stage.
struct StepBudget {
  double taxis_sum = 0.0;        // sum_i r_i (largest magnitude over stages)
  double taxis_l1 = 0.0;         // ||r||_1 of the same stage
  double taxis_imbalance = 0.0;  // |sum r| / ||r||_1, max over stages
  double w_before = 0.0;         // 1^T M w^m
  double w_after = 0.0;          // 1^T M w^{m+1}
  double w_reaction = 0.0;       // h 1^T M H(x*)
  double w_taxis = 0.0;          // h sum_i r_i
  double w_solver_slack = 0.0;   // sqrt(n) ||b - A w^{m+1}||_2
};

struct StepOutcome {
  FieldState state;
  StepBudget budget;
  std::array<SolverReport, 3> solver;  // final stage, species u, v, w
};

class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, double t, SolverReport report = {})
      : std::runtime_error(what), t_(t), report_(std::move(report)) {}
  double time() const noexcept { return t_; }
  const SolverReport& report() const noexcept { return report_; }

 private:
  double t_;
  SolverReport report_;
};

/// Holds the cached system matrices for one mesh/parameter set. The mesh
/// and operators must outlive the stepper.
class ImexStepper {
 public:
  ImexStepper(const TriMesh& mesh, const AssembledOperators& ops, const Params& params,
              std::vector<double> k_nodal, StepperOptions opts = {});

  StepOutcome step(const FieldState& s, double dt, Scheme scheme);
  StepOutcome step_rk2(const FieldState& s, double dt) { return step(s, dt, Scheme::ImexRk2); }
  StepOutcome step_euler(const FieldState& s, double dt) { return step(s, dt, Scheme::ImplicitEuler); }

  const Params& params() const { return params_; }
  const TriMesh& mesh() const { return *mesh_; }
  const AssembledOperators& operators() const { return *ops_; }
  std::span<const double> carrying_capacity() const { return k_nodal_; }
  const StepperOptions& options() const { return opts_; }

  /// 1^T M f with the mass matrix in use.
  double integral(std::span<const double> f) const;
  double total_biomass(const FieldState& s) const;

 private:
  struct Stage {
    FieldState next;
    double taxis_sum = 0.0;
    double taxis_l1 = 0.0;
    double w_reaction = 0.0;
    double w_slack = 0.0;
    std::array<SolverReport, 3> solver;
  };

  const std::array<CsrMatrix, 3>& systems(double h);
  void apply_mass(std::span<const double> x, std::span<double> y) const;
  Stage stage(const FieldState& base, const FieldState& eval, double h);

  const TriMesh* mesh_;
  const AssembledOperators* ops_;
  Params params_;
  std::vector<double> k_nodal_;
  StepperOptions opts_;
  CsrMatrix mass_;  // consistent or lumped (diagonal on the same pattern)
  std::map<double, std::array<CsrMatrix, 3>> systems_;
};

FieldState step_imex_rk2(const FieldState& s, const Params& p, const TriMesh& mesh, const AssembledOperators& ops,
                         std::span<const double> k_nodal, double dt, const StepperOptions& opts = {});
FieldState step_implicit_euler(const FieldState& s, const Params& p, const TriMesh& mesh,
                               const AssembledOperators& ops, std::span<const double> k_nodal, double dt,
                               const StepperOptions& opts = {});

/// 1^T M (u + v / gamma + w / (gamma beta)).
double total_biomass(const FieldState& s, const CsrMatrix& mass, const Params& p);

/// K0 = (1/4) K (alpha + mu0)^2 / alpha |Omega| with mu0 = min(mu, nu).
double biomass_constant(const Params& p, double k, double domain_area);
double mu0(const Params& p);

struct DiagnosticsRecord {
  double t = 0.0;
  std::size_t step = 0;
  double total_biomass = 0.0;
  double min_u = 0.0, min_v = 0.0, min_w = 0.0;
  double linf_u = 0.0, linf_v = 0.0, linf_w = 0.0;
  double mean_w = 0.0;
  double bound_k0 = 0.0;
  double bound = 0.0;  // max(W(0), K0 / mu0)
  bool bound_ok = true;
  bool nonneg_ok = true;
  double taxis_imbalance = 0.0;  // max since the previous record
  double w_budget_ratio = 0.0;   // max |dW_w - reaction - taxis| / allowed, since previous record
  std::size_t max_iterations = 0;
};

inline constexpr double kBoundTolerance = 1e-6;

struct RunOptions {
  Scheme scheme = Scheme::ImexRk2;
  double dt = 1e-3;
  double t_final = 0.0;
  std::vector<double> snapshot_times;  // within [0, t_final]
  std::size_t diag_stride = 100;
};

struct RunResult {
  std::vector<FieldState> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;
  std::size_t steps = 0;
  bool bound_ok = true;
  bool nonneg_ok = true;
  double min_value = 0.0;
  double max_biomass = 0.0;
  double max_taxis_imbalance = 0.0;
  double max_w_budget_ratio = 0.0;
};

using SnapshotSink = std::function<void(const FieldState&, std::size_t index)>;

/// Integrates 0 -> t_final. Snapshots are taken at the step nearest each
/// requested time. Diagnostics are recorded at step 0, every diag_stride
/// steps, at snapshot steps and at the final step. Step failures surface as
/// StepError carrying the failing time.
RunResult run(ImexStepper& stepper, FieldState initial, const RunOptions& opts, const SnapshotSink& sink = {},
              bool keep_snapshots = true);

/// Number of steps of size dt in [0, t]; throws unless t is a multiple of dt.
std::size_t step_count(double t, double dt);

struct OdeSample {
  double t = 0.0;
  State3 x{};
};

/// Explicit midpoint RK2 for the kinetics at constant K; samples every
/// stride steps plus the final state.
std::vector<OdeSample> integrate_ode(const Params& p, double k, const State3& x0, double dt, double t_final,
                                     std::size_t stride = 1000);

}  // namespace igp

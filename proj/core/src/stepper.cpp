#include "igp/stepper.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace igp {

std::string to_string(Scheme s) { return s == Scheme::ImexRk2 ? "rk2" : "euler"; }

namespace {

CsrMatrix diagonal_on_pattern(const CsrMatrix& pattern, std::span<const double> diag) {
  CsrMatrix out = CsrMatrix::combine(0.0, pattern, 0.0, pattern);
  for (std::size_t i = 0; i < diag.size(); ++i) out.add(i, i, diag[i]);
  return out;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

ImexStepper::ImexStepper(const TriMesh& mesh, const AssembledOperators& ops, const Params& params,
                         std::vector<double> k_nodal, StepperOptions opts)
    : mesh_(&mesh), ops_(&ops), params_(params), k_nodal_(std::move(k_nodal)), opts_(opts) {
  validate(params_);
  if (k_nodal_.size() != mesh.num_nodes()) {
    throw DimensionError(fmt::format("ImexStepper: {} carrying-capacity values for {} nodes", k_nodal_.size(),
                                     mesh.num_nodes()));
  }
  for (double k : k_nodal_) {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("ImexStepper: K must be positive at every node");
  }
  mass_ = opts_.lumped_mass ? diagonal_on_pattern(ops.stiffness, ops.lumped) : ops.mass;
}

const std::array<CsrMatrix, 3>& ImexStepper::systems(double h) {
  auto it = systems_.find(h);
  if (it != systems_.end()) return it->second;
  const auto& s = ops_->stiffness;
  std::array<CsrMatrix, 3> sys{
      CsrMatrix::combine(1.0, mass_, h * params_.d0, s),
      CsrMatrix::combine(1.0, mass_, h * params_.d1, s),
      CsrMatrix::combine(1.0, mass_, h * params_.d2, s),
  };
  return systems_.emplace(h, std::move(sys)).first->second;
}

void ImexStepper::apply_mass(std::span<const double> x, std::span<double> y) const { matvec(mass_, x, y); }

double ImexStepper::integral(std::span<const double> f) const {
  // 1^T M f = (M 1)^T f; M is symmetric and its row sums are the lumped masses.
  return dot(ops_->lumped, f);
}

double ImexStepper::total_biomass(const FieldState& s) const {
  return integral(s.u) + integral(s.v) / params_.gamma + integral(s.w) / (params_.gamma * params_.beta);
}

ImexStepper::Stage ImexStepper::stage(const FieldState& base, const FieldState& eval, double h) {
  const std::size_t n = mesh_->num_nodes();
  const Params& p = params_;
  std::array<std::vector<double>, 3> rate{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const Kinetics r = reaction(p, k_nodal_[i], eval.u[i], eval.v[i], eval.w[i]);
    rate[0][i] = r.f;
    rate[1][i] = r.g;
    rate[2][i] = r.h;
  }
  const std::vector<double> taxis = assemble_taxis(*mesh_, ops_->geometry, p, eval);

  Stage st;
  st.next.t = base.t + h;
  st.taxis_sum = std::accumulate(taxis.begin(), taxis.end(), 0.0);
  st.taxis_l1 = std::accumulate(taxis.begin(), taxis.end(), 0.0, [](double acc, double x) { return acc + std::abs(x); });
  st.w_reaction = h * integral(rate[2]);

  const auto& sys = systems(h);
  const std::array<const std::vector<double>*, 3> old{&base.u, &base.v, &base.w};
  const std::array<std::vector<double>*, 3> out{&st.next.u, &st.next.v, &st.next.w};
  std::vector<double> shifted(n), rhs(n), resid(n);
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < n; ++i) shifted[i] = (*old[s])[i] + h * rate[s][i];
    apply_mass(shifted, rhs);
    if (s == 2) {
      for (std::size_t i = 0; i < n; ++i) rhs[i] += h * taxis[i];
    }
    // The explicit predictor is exact wherever diffusion and taxis vanish.
    SolveResult sol = solve_cg(sys[s], rhs, opts_.solver, shifted);
    if (!sol.report.converged) {
      throw StepError(fmt::format("linear solve for species {} did not converge at t = {} (residual {}, {} iterations) {}",
                                  "uvw"[s], base.t, sol.report.final_residual, sol.report.iterations, sol.report.message),
                      base.t, sol.report);
    }
    if (!all_finite(sol.x)) throw StepError(fmt::format("non-finite values in species {} at t = {}", "uvw"[s], base.t), base.t);
    if (s == 2) {
      matvec(sys[s], sol.x, resid);
      for (std::size_t i = 0; i < n; ++i) resid[i] = rhs[i] - resid[i];
      st.w_slack = std::sqrt(static_cast<double>(n)) * norm2(resid);
    }
    st.solver[s] = sol.report;
    *out[s] = std::move(sol.x);
  }
  return st;
}

StepOutcome ImexStepper::step(const FieldState& s, double dt, Scheme scheme) {
  const std::size_t n = mesh_->num_nodes();
  if (s.u.size() != n || s.v.size() != n || s.w.size() != n) {
    throw DimensionError("ImexStepper::step: state not aligned with mesh");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("ImexStepper::step: dt must be > 0");
  if (!all_finite(s.u) || !all_finite(s.v) || !all_finite(s.w)) {
    throw StepError(fmt::format("non-finite input state at t = {}", s.t), s.t);
  }

  StepOutcome out;
  Stage final_stage;
  double imbalance = 0.0;
  auto imbalance_of = [](const Stage& st) { return st.taxis_l1 > 0.0 ? std::abs(st.taxis_sum) / st.taxis_l1 : 0.0; };
  if (scheme == Scheme::ImexRk2) {
    Stage half = stage(s, s, 0.5 * dt);
    imbalance = imbalance_of(half);
    final_stage = stage(s, half.next, dt);
  } else {
    final_stage = stage(s, s, dt);
  }
  imbalance = std::max(imbalance, imbalance_of(final_stage));

  out.state = std::move(final_stage.next);
  out.state.t = s.t + dt;
  out.solver = final_stage.solver;
  auto& b = out.budget;
  b.taxis_sum = final_stage.taxis_sum;
  b.taxis_l1 = final_stage.taxis_l1;
  b.taxis_imbalance = imbalance;
  b.w_before = integral(s.w);
  b.w_after = integral(out.state.w);
  b.w_reaction = final_stage.w_reaction;
  b.w_taxis = dt * final_stage.taxis_sum;
  b.w_solver_slack = final_stage.w_slack;
  return out;
}

FieldState step_imex_rk2(const FieldState& s, const Params& p, const TriMesh& mesh, const AssembledOperators& ops,
                         std::span<const double> k_nodal, double dt, const StepperOptions& opts) {
  ImexStepper st(mesh, ops, p, std::vector<double>(k_nodal.begin(), k_nodal.end()), opts);
  return st.step_rk2(s, dt).state;
}

FieldState step_implicit_euler(const FieldState& s, const Params& p, const TriMesh& mesh,
                               const AssembledOperators& ops, std::span<const double> k_nodal, double dt,
                               const StepperOptions& opts) {
  ImexStepper st(mesh, ops, p, std::vector<double>(k_nodal.begin(), k_nodal.end()), opts);
  return st.step_euler(s, dt).state;
}

double total_biomass(const FieldState& s, const CsrMatrix& mass, const Params& p) {
  const std::size_t n = s.size();
  if (mass.rows() != n || mass.cols() != n || s.v.size() != n || s.w.size() != n) {
    throw DimensionError("total_biomass: state and mass matrix sizes differ");
  }
  std::vector<double> weighted(n);
  for (std::size_t i = 0; i < n; ++i) weighted[i] = s.u[i] + s.v[i] / p.gamma + s.w[i] / (p.gamma * p.beta);
  const std::vector<double> mw = matvec(mass, weighted);
  return std::accumulate(mw.begin(), mw.end(), 0.0);
}

double mu0(const Params& p) { return std::min(p.mu, p.nu); }

double biomass_constant(const Params& p, double k, double domain_area) {
  const double m = p.alpha + mu0(p);
  return 0.25 * k * m * m / p.alpha * domain_area;
}

std::size_t step_count(double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_count: dt must be > 0");
  if (t < 0.0) throw std::invalid_argument("step_count: final time must be >= 0");
  const double steps = std::round(t / dt);
  if (std::abs(steps * dt - t) > 1e-9 * std::max(1.0, t)) {
    throw std::invalid_argument(fmt::format("final time {} is not a multiple of dt = {}", t, dt));
  }
  return static_cast<std::size_t>(steps);
}

namespace {

struct Extremes {
  double min = 0.0, max = 0.0;
};

Extremes extremes(const std::vector<double>& f) {
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return {*lo, std::max(std::abs(*lo), std::abs(*hi))};
}

}  // namespace

RunResult run(ImexStepper& stepper, FieldState initial, const RunOptions& opts, const SnapshotSink& sink,
              bool keep_snapshots) {
  const std::size_t nsteps = step_count(opts.t_final, opts.dt);
  const std::size_t stride = std::max<std::size_t>(1, opts.diag_stride);

  std::vector<std::size_t> snap_steps;
  for (double ts : opts.snapshot_times) {
    if (ts < 0.0 || ts > opts.t_final + 1e-12) {
      throw std::invalid_argument(fmt::format("snapshot time {} outside [0, {}]", ts, opts.t_final));
    }
    snap_steps.push_back(static_cast<std::size_t>(std::llround(ts / opts.dt)));
  }
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

  const Params& p = stepper.params();
  const TriMesh& mesh = stepper.mesh();
  const auto kcap = stepper.carrying_capacity();
  const double k_sup = *std::max_element(kcap.begin(), kcap.end());
  const double area = mesh.rect.area();
  const double k0 = biomass_constant(p, k_sup, area);

  RunResult result;
  FieldState state = std::move(initial);
  state.t = 0.0;
  const double w0 = stepper.total_biomass(state);
  const double bound = std::max(w0, k0 / mu0(p));
  const double bound_slack = kBoundTolerance * std::max(1.0, bound);

  double pending_imbalance = 0.0;
  double pending_ratio = 0.0;
  std::size_t pending_iters = 0;
  std::size_t next_snap = 0;
  result.min_value = min_value(state);

  auto record = [&](std::size_t step) {
    DiagnosticsRecord d;
    d.t = state.t;
    d.step = step;
    d.total_biomass = stepper.total_biomass(state);
    const auto eu = extremes(state.u), ev = extremes(state.v), ew = extremes(state.w);
    d.min_u = eu.min;
    d.min_v = ev.min;
    d.min_w = ew.min;
    d.linf_u = eu.max;
    d.linf_v = ev.max;
    d.linf_w = ew.max;
    d.mean_w = stepper.integral(state.w) / area;
    d.bound_k0 = k0;
    d.bound = bound;
    d.bound_ok = d.total_biomass <= bound + bound_slack;
    d.nonneg_ok = std::min({d.min_u, d.min_v, d.min_w}) >= kNegativityThreshold;
    d.taxis_imbalance = pending_imbalance;
    d.w_budget_ratio = pending_ratio;
    d.max_iterations = pending_iters;
    pending_imbalance = pending_ratio = 0.0;
    pending_iters = 0;
    result.bound_ok = result.bound_ok && d.bound_ok;
    result.nonneg_ok = result.nonneg_ok && d.nonneg_ok;
    result.diagnostics.push_back(d);
  };

  auto maybe_snapshot = [&](std::size_t step) {
    if (next_snap < snap_steps.size() && snap_steps[next_snap] == step) {
      if (sink) sink(state, next_snap);
      if (keep_snapshots) result.snapshots.push_back(state);
      ++next_snap;
      return true;
    }
    return false;
  };

  record(0);
  maybe_snapshot(0);
  result.max_biomass = result.diagnostics.back().total_biomass;

  for (std::size_t step = 1; step <= nsteps; ++step) {
    StepOutcome out = stepper.step(state, opts.dt, opts.scheme);
    out.state.t = static_cast<double>(step) * opts.dt;
    const StepBudget& b = out.budget;
    const double budget_err = std::abs((b.w_after - b.w_before) - (b.w_reaction + b.w_taxis));
    const double allowed = b.w_solver_slack + 1e-12 * std::max(1.0, std::abs(b.w_before));
    pending_ratio = std::max(pending_ratio, budget_err / allowed);
    pending_imbalance = std::max(pending_imbalance, b.taxis_imbalance);
    for (const auto& r : out.solver) pending_iters = std::max(pending_iters, r.iterations);
    result.max_taxis_imbalance = std::max(result.max_taxis_imbalance, b.taxis_imbalance);
    result.max_w_budget_ratio = std::max(result.max_w_budget_ratio, budget_err / allowed);
    state = std::move(out.state);
    result.min_value = std::min(result.min_value, min_value(state));
    // Every step is checked against the envelope and the negativity floor,
    // not only the recorded ones.
    const double w_total = stepper.total_biomass(state);
    result.max_biomass = std::max(result.max_biomass, w_total);
    if (w_total > bound + bound_slack) result.bound_ok = false;
    if (min_value(state) < kNegativityThreshold) result.nonneg_ok = false;

    const bool snap = next_snap < snap_steps.size() && snap_steps[next_snap] == step;
    if (step % stride == 0 || step == nsteps || snap) record(step);
    maybe_snapshot(step);
  }
  result.steps = nsteps;
  return result;
}

std::vector<OdeSample> integrate_ode(const Params& p, double k, const State3& x0, double dt, double t_final,
                                     std::size_t stride) {
  const std::size_t nsteps = step_count(t_final, dt);
  stride = std::max<std::size_t>(1, stride);
  std::vector<OdeSample> out{{0.0, x0}};
  State3 x = x0;
  for (std::size_t step = 1; step <= nsteps; ++step) {
    const State3 f0 = ode_rhs(p, k, x);
    State3 mid;
    for (int i = 0; i < 3; ++i) mid[i] = x[i] + 0.5 * dt * f0[i];
    const State3 f1 = ode_rhs(p, k, mid);
    for (int i = 0; i < 3; ++i) x[i] += dt * f1[i];
    if (step % stride == 0 || step == nsteps) out.push_back({static_cast<double>(step) * dt, x});
  }
  return out;
}

}  // namespace igp

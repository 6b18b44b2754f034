// SPDX-License-Identifier: MIT
//
// Time-discrete quasistatic elastoplasticity solver.
//
// Each step solves the incremental problem: project the previous state onto
// the intersection of the pointwise admissible set with the equilibrium slice
// {B Sigma = ell_i}, in the compliance metric.  The algorithm is
// displacement-driven: for a trial displacement update v the stress field is
// the pointwise return map of (sigma_prev + C eps(v), chi_prev), and an outer
// semismooth Newton iteration drives the equilibrium residual
// R(v) = B Sigma(v) - ell to zero, with an elastic-stiffness damped fallback.

#ifndef PLASTLAB_FORWARD_HPP
#define PLASTLAB_FORWARD_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evi.hpp"
#include "model.hpp"
#include "path.hpp"
#include "return_map.hpp"
#include "util.hpp"

namespace plastlab {

// ---------------------------------------------------------------------------
// Load programs: uniform time grid of control coordinates, zero at t = 0.
// ---------------------------------------------------------------------------

struct LoadProgram {
  double T = 1.0;
  std::vector<Eigen::VectorXd> g;  // N+1 nodes, g[0] = 0

  int steps() const { return static_cast<int>(g.size()) - 1; }
  double tau() const { return T / steps(); }
  double time(int i) const { return T * static_cast<double>(i) / steps(); }

  std::vector<double> times() const {
    std::vector<double> t(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t[i] = time(static_cast<int>(i));
    return t;
  }

  // Sample a closed-form control trajectory on the uniform grid.
  static LoadProgram sampled(double horizon, int n,
                             const std::function<Eigen::VectorXd(double)>& fn) {
    if (n < 1) throw std::invalid_argument("LoadProgram: need at least one step");
    if (!(horizon > 0.0)) throw std::invalid_argument("LoadProgram: horizon must be positive");
    LoadProgram p;
    p.T = horizon;
    p.g.resize(n + 1);
    for (int i = 0; i <= n; ++i) p.g[i] = fn(horizon * i / n);
    double scale = 0.0;
    for (const auto& gi : p.g) scale = std::max(scale, gi.norm());
    if (p.g[0].norm() > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("LoadProgram: control must vanish at t = 0");
    p.g[0].setZero();
    return p;
  }

  void validate(const DiscreteModel& m) const {
    if (steps() < 1) throw std::invalid_argument("LoadProgram: need at least one step");
    if (!(T > 0.0)) throw std::invalid_argument("LoadProgram: horizon must be positive");
    for (const auto& gi : g)
      if (gi.size() != m.ncontrols())
        throw std::invalid_argument("LoadProgram: control size mismatch");
    if (g[0].norm() != 0.0)
      throw std::invalid_argument("LoadProgram: control must vanish at t = 0");
  }

  Eigen::VectorXd ell_at(const DiscreteModel& m, int i) const {
    return m.control * g[i];
  }
};

// ---------------------------------------------------------------------------
// Step solver
// ---------------------------------------------------------------------------

struct SolveOptions {
  double tol = 1e-10;          // equilibrium residual tolerance (relative)
  int max_iter = 200;          // outer iterations per step
  double armijo_c = 1e-4;      // sufficient-decrease constant
  double backtrack = 0.5;      // line-search step shrink factor
  int max_backtracks = 40;     // halvings per line search
  int fallback_after = 3;      // failed line searches before elastic fallback
  double drift_tol = 1e-12;    // admissibility drift threshold (relative)
};

namespace detail {

// Pointwise stress response and return data for one trial displacement.
struct LocalResponse {
  GeneralizedStressField state;
  Eigen::VectorXd gamma;            // projection multiplier per point
  std::vector<GeneralizedStress> trial;
  std::vector<bool> plastic;
};

inline LocalResponse local_response(const DiscreteModel& m,
                                    const GeneralizedStressField& base,
                                    const Eigen::VectorXd& v) {
  LocalResponse r;
  r.state = GeneralizedStressField::zero(m);
  r.gamma = Eigen::VectorXd::Zero(m.points());
  r.trial.reserve(m.points());
  r.plastic.assign(m.points(), false);
  const auto eps = strain_of(m, v);
  for (int p = 0; p < m.points(); ++p) {
    GeneralizedStress y{base[p].sigma + m.law.apply_c(eps[p]), base[p].chi};
    const ReturnResult rr = project_pointwise(m.law, y);
    r.state[p] = rr.state;
    r.gamma(p) = rr.gamma;
    r.plastic[p] = rr.gamma > 0.0;
    r.trial.push_back(std::move(y));
  }
  return r;
}

// Derivative of the pointwise return map with respect to the strain update:
// the algorithmically consistent tangent.  Isotropic laws have a closed form;
// general laws use central differences through the return map.
inline Eigen::MatrixXd local_tangent(const MaterialLaw& law,
                                     const GeneralizedStress& trial,
                                     bool plastic) {
  const int c = sym_components(law.dim);
  if (!plastic) return law.c_fwd;
  if (law.isotropic) {
    const Eigen::VectorXd w = frobenius_weights(law.dim);
    const SymTensor z0 = dd(trial);
    const double n0 = frobenius_norm(z0);
    const Eigen::VectorXd n = z0.packed() / n0;
    const double beta = 2.0 * law.mu / (2.0 * law.mu + law.k1);
    const double rho = (n0 - law.yield_radius) / n0;
    const Eigen::MatrixXd ndyad = n * (w.asDiagonal() * n).transpose();
    const Eigen::MatrixXd pd = deviator_matrix(law.dim);
    return law.c_fwd - 2.0 * law.mu * beta * (ndyad + rho * (pd - ndyad));
  }
  Eigen::MatrixXd t(c, c);
  const double h = 1e-7;
  for (int j = 0; j < c; ++j) {
    GeneralizedStress yp = trial, ym = trial;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(c);
    e(j) = h;
    const SymTensor de(law.dim, e);
    yp.sigma = yp.sigma + law.apply_c(de);
    ym.sigma = ym.sigma - law.apply_c(de);
    t.col(j) = (project_pointwise(law, yp).state.sigma.packed() -
                project_pointwise(law, ym).state.sigma.packed()) /
               (2.0 * h);
  }
  return t;
}

// Assemble K = strain^T diag(w_p W T_p) strain for given pointwise tangents.
inline Eigen::MatrixXd assemble_stiffness(
    const DiscreteModel& m, const std::function<Eigen::MatrixXd(int)>& tangent) {
  const int n = m.ndofs();
  const int c = m.ncomp();
  const Eigen::VectorXd w = frobenius_weights(m.dim());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < m.points(); ++p) {
    const Eigen::MatrixXd sp = m.strain.middleRows(p * c, c);
    k.noalias() += sp.transpose() *
                   (m.weights(p) * (w.asDiagonal() * tangent(p))) * sp;
  }
  return 0.5 * (k + k.transpose());
}

inline Eigen::VectorXd solve_spd(const Eigen::MatrixXd& k,
                                 const Eigen::VectorXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd d = ldlt.solve(rhs);
    if (d.allFinite()) return d;
  }
  return k.fullPivLu().solve(rhs);
}

}  // namespace detail

struct ProjectionResult {
  GeneralizedStressField state;  // projected stress field
  Eigen::VectorXd v;             // displacement update certifying stationarity
  Eigen::VectorXd gamma;         // pointwise projection multipliers
  int iterations = 0;
  double residual = 0.0;
  bool fallback_used = false;
};

// Projection of `base` onto {admissible} ∩ {B Sigma = ell} in the compliance
// metric, computed by the displacement-driven outer iteration.
inline ProjectionResult project_to_equilibrium(const DiscreteModel& m,
                                               const GeneralizedStressField& base,
                                               const Eigen::VectorXd& ell,
                                               const SolveOptions& opts = {},
                                               const Eigen::VectorXd* v0 = nullptr) {
  require_field(m, base, "project_to_equilibrium");
  if (ell.size() != m.ndofs())
    throw std::invalid_argument("project_to_equilibrium: load size mismatch");

  const double res_scale = std::max(1.0, ell.norm());
  Eigen::VectorXd v = v0 ? *v0 : Eigen::VectorXd::Zero(m.ndofs());
  if (v.size() != m.ndofs())
    throw std::invalid_argument("project_to_equilibrium: warm start size mismatch");

  detail::LocalResponse resp = detail::local_response(m, base, v);
  Eigen::VectorXd r = apply_B(m, resp.state) - ell;
  double rn = r.norm();

  Eigen::MatrixXd k_elastic;  // lazily assembled for the fallback
  int failed_searches = 0;
  bool fallback = false;
  std::vector<double> history{rn};

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (rn <= opts.tol * res_scale) break;

    Eigen::MatrixXd k;
    if (!fallback) {
      k = detail::assemble_stiffness(m, [&](int p) {
        return detail::local_tangent(m.law, resp.trial[p], resp.plastic[p]);
      });
    } else {
      if (k_elastic.size() == 0)
        k_elastic = detail::assemble_stiffness(
            m, [&](int) { return m.law.c_fwd; });
      k = k_elastic;
    }

    const Eigen::VectorXd dir = detail::solve_spd(k, r);
    double s = 1.0;
    bool accepted = false;
    double best_s = 0.0, best_rn = rn;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      detail::LocalResponse cand = detail::local_response(m, base, v + s * dir);
      Eigen::VectorXd rc = apply_B(m, cand.state) - ell;
      const double rcn = rc.norm();
      const double shrink = fallback ? (1.0 - opts.armijo_c * s)
                                     : (1.0 - 2.0 * opts.armijo_c * s);
      if (rcn * rcn <= shrink * rn * rn) {
        v += s * dir;
        resp = std::move(cand);
        r = std::move(rc);
        rn = rcn;
        accepted = true;
        break;
      }
      if (rcn < best_rn) {
        best_rn = rcn;
        best_s = s;
      }
      s *= opts.backtrack;
    }
    if (!accepted) {
      // Sufficient decrease unreachable: take the best strictly decreasing
      // candidate if any, and switch to the damped elastic direction once
      // this has happened often enough.
      ++failed_searches;
      if (best_s > 0.0) {
        v += best_s * dir;
        resp = detail::local_response(m, base, v);
        r = apply_B(m, resp.state) - ell;
        rn = r.norm();
      }
      if (failed_searches >= opts.fallback_after) {
        if (fallback && best_s == 0.0) {
          history.push_back(rn);
          break;  // stalled even with the damped elastic direction
        }
        fallback = true;
      } else if (best_s == 0.0 && fallback) {
        history.push_back(rn);
        break;
      }
    }
    history.push_back(rn);
  }

  if (rn > opts.tol * res_scale) {
    std::string msg = "equilibrium iteration failed to converge; residuals:";
    const std::size_t from = history.size() > 6 ? history.size() - 6 : 0;
    for (std::size_t i = from; i < history.size(); ++i)
      msg += " " + format_double(history[i]);
    throw std::runtime_error(msg);
  }

  ProjectionResult out;
  out.state = std::move(resp.state);
  out.v = std::move(v);
  out.gamma = std::move(resp.gamma);
  out.iterations = iter;
  out.residual = rn;
  out.fallback_used = fallback;
  return out;
}

struct StepResult {
  GeneralizedStressField Sigma;
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;  // tau-scaled flow multiplier per point
  int iterations = 0;
  double residual = 0.0;
  bool fallback_used = false;
};

// One incremental step: previous state feasible, new load ell; returns the
// projected state, the updated displacement, and the flow multiplier.
inline StepResult solve_step(const DiscreteModel& m,
                             const GeneralizedStressField& Sigma_prev,
                             const Eigen::VectorXd& u_prev,
                             const Eigen::VectorXd& ell, double tau,
                             const SolveOptions& opts = {}) {
  require_field(m, Sigma_prev, "solve_step");
  if (!(tau > 0.0)) throw std::invalid_argument("solve_step: step size must be positive");
  const double feas_scale = 0.5 * m.law.yield_radius * m.law.yield_radius;
  for (int p = 0; p < m.points(); ++p)
    if (yield_phi(Sigma_prev[p], m.law.yield_radius) > 1e-9 * feas_scale)
      throw std::invalid_argument("solve_step: previous state is not admissible");

  ProjectionResult pr = project_to_equilibrium(m, Sigma_prev, ell, opts);
  StepResult st;
  st.Sigma = std::move(pr.state);
  st.u = u_prev + pr.v;
  st.lambda = pr.gamma / tau;
  st.iterations = pr.iterations;
  st.residual = pr.residual;
  st.fallback_used = pr.fallback_used;
  return st;
}

// Representation formula for the flow multiplier from the back-stress
// increment: lambda_p = |H^{-1} (chi_i - chi_prev)_p| / (tau * radius).
inline Eigen::VectorXd recover_multiplier(const DiscreteModel& m,
                                          const GeneralizedStressField& Sigma_i,
                                          const GeneralizedStressField& Sigma_prev,
                                          double tau) {
  require_field(m, Sigma_i, "recover_multiplier");
  require_field(m, Sigma_prev, "recover_multiplier");
  if (!(tau > 0.0))
    throw std::invalid_argument("recover_multiplier: step size must be positive");
  Eigen::VectorXd lam(m.points());
  for (int p = 0; p < m.points(); ++p)
    lam(p) = frobenius_norm(m.law.apply_h_inv(Sigma_i[p].chi - Sigma_prev[p].chi)) /
             (tau * m.law.yield_radius);
  return lam;
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct Trajectory {
  std::vector<double> t;                        // N+1 nodes
  std::vector<GeneralizedStressField> Sigma;    // per node
  std::vector<Eigen::VectorXd> u;               // per node
  std::vector<Eigen::VectorXd> lambda;          // per cell (piecewise constant)
  std::vector<Eigen::VectorXd> load;            // assembled loads per node

  int steps() const { return static_cast<int>(t.size()) - 1; }
  double horizon() const { return t.back(); }
};

struct ForwardReport {
  int total_iterations = 0;
  int fallback_steps = 0;
  int drift_fixes = 0;
  double max_equilibrium_residual = 0.0;  // relative
  double max_yield_excess = 0.0;          // relative to r^2/2
  double max_kinematic_residual = 0.0;    // |C^-1 sigma - eps(u) - H^-1 chi|
  double energy_gap = 0.0;                // telescoping energy identity, relative
  double sigma_h1 = 0.0;                  // discrete H1 norm of the stress path
  double u_h1 = 0.0;                      // discrete H1 norm of the displacement path
  double load_h1 = 0.0;                   // discrete H1 norm of the load path (dual norm)
  double stability_constant = 0.0;        // max(sigma_h1, u_h1) / load_h1
};

struct ForwardRun {
  Trajectory traj;
  ForwardReport report;
};

inline ForwardRun run_forward(const DiscreteModel& m, const LoadProgram& loads,
                              const SolveOptions& opts = {}) {
  loads.validate(m);
  const int n = loads.steps();
  const double tau = loads.tau();
  const double feas_scale = 0.5 * m.law.yield_radius * m.law.yield_radius;

  ForwardRun out;
  Trajectory& tr = out.traj;
  ForwardReport& rep = out.report;
  tr.t = loads.times();
  tr.Sigma.reserve(n + 1);
  tr.u.reserve(n + 1);
  tr.lambda.reserve(n);
  tr.load.reserve(n + 1);
  tr.Sigma.push_back(GeneralizedStressField::zero(m));
  tr.u.push_back(Eigen::VectorXd::Zero(m.ndofs()));
  tr.load.push_back(Eigen::VectorXd::Zero(m.ndofs()));

  for (int i = 1; i <= n; ++i) {
    const Eigen::VectorXd ell = loads.ell_at(m, i);
    StepResult st;
    try {
      st = solve_step(m, tr.Sigma.back(), tr.u.back(), ell, tau, opts);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_forward: step " + std::to_string(i) + " failed: " +
                               e.what());
    }
    // Admissibility drift control: radially shrink the combined deviator of
    // any point pushed past the surface by rounding.
    for (int p = 0; p < m.points(); ++p) {
      const double phi = yield_phi(st.Sigma[p], m.law.yield_radius);
      if (phi > opts.drift_tol * feas_scale) {
        const SymTensor z = dd(st.Sigma[p]);
        const double nz = frobenius_norm(z);
        const double shrink = m.law.yield_radius / nz;
        st.Sigma[p].sigma =
            dev(st.Sigma[p].sigma) * shrink + (st.Sigma[p].sigma - dev(st.Sigma[p].sigma));
        st.Sigma[p].chi =
            dev(st.Sigma[p].chi) * shrink + (st.Sigma[p].chi - dev(st.Sigma[p].chi));
        ++rep.drift_fixes;
      }
    }
    rep.total_iterations += st.iterations;
    rep.fallback_steps += st.fallback_used ? 1 : 0;
    tr.Sigma.push_back(std::move(st.Sigma));
    tr.u.push_back(std::move(st.u));
    tr.lambda.push_back(std::move(st.lambda));
    tr.load.push_back(ell);
  }

  // --- consistency diagnostics -------------------------------------------
  for (int i = 0; i <= n; ++i) {
    const double lscale = std::max(1.0, tr.load[i].norm());
    rep.max_equilibrium_residual =
        std::max(rep.max_equilibrium_residual,
                 (apply_B(m, tr.Sigma[i]) - tr.load[i]).norm() / lscale);
    const auto eps = strain_of(m, tr.u[i]);
    for (int p = 0; p < m.points(); ++p) {
      rep.max_yield_excess =
          std::max(rep.max_yield_excess,
                   yield_phi(tr.Sigma[i][p], m.law.yield_radius) / feas_scale);
      const SymTensor kin = m.law.apply_c_inv(tr.Sigma[i][p].sigma) - eps[p] -
                            m.law.apply_h_inv(tr.Sigma[i][p].chi);
      rep.max_kinematic_residual =
          std::max(rep.max_kinematic_residual, frobenius_norm(kin));
    }
  }

  // Telescoping energy identity for the quadratic stored energy.
  double inc_sum = 0.0, sq_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const GeneralizedStressField d = tr.Sigma[i] - tr.Sigma[i - 1];
    inc_sum += inner_A(m, d, tr.Sigma[i]);
    sq_sum += inner_A(m, d, d);
  }
  const double final_energy = 0.5 * inner_A(m, tr.Sigma[n], tr.Sigma[n]);
  rep.energy_gap = std::abs(final_energy - (inc_sum - 0.5 * sq_sum)) /
                   std::max(1.0, final_energy);

  // Discrete first-order norms of the three trajectories; the reported
  // stability constant tracks the a-priori bound by the load.
  VectorPath sp, up, lp;
  sp.t = up.t = lp.t = tr.t;
  for (int i = 0; i <= n; ++i) {
    sp.x.push_back(tr.Sigma[i].flatten());
    up.x.push_back(tr.u[i]);
    lp.x.push_back(tr.load[i]);
  }
  MatrixIp aip{&m.metric_A};
  MatrixIp vip{&m.gram_V};
  const Eigen::MatrixXd gv_inv = m.gram_V_llt.solve(
      Eigen::MatrixXd::Identity(m.ndofs(), m.ndofs()));
  MatrixIp dip{&gv_inv};
  rep.sigma_h1 = path_h1(sp, aip);
  rep.u_h1 = path_h1(up, vip);
  rep.load_h1 = path_h1(lp, dip);
  rep.stability_constant =
      rep.load_h1 > 0.0 ? std::max(rep.sigma_h1, rep.u_h1) / rep.load_h1 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory queries
// ---------------------------------------------------------------------------

struct ComplementarityReport {
  double min_lambda = 0.0;   // most negative multiplier entry
  double max_phi = 0.0;      // largest yield excess (relative)
  double max_product = 0.0;  // largest |lambda * phi| (relative)
  bool ok(double tol) const {
    return min_lambda >= -tol && max_phi <= tol && max_product <= tol;
  }
};

inline ComplementarityReport check_complementarity(const DiscreteModel& m,
                                                   const Trajectory& tr) {
  ComplementarityReport rep;
  const double feas_scale = 0.5 * m.law.yield_radius * m.law.yield_radius;
  for (int i = 0; i < tr.steps(); ++i) {
    for (int p = 0; p < m.points(); ++p) {
      const double lam = tr.lambda[i](p);
      const double phi = yield_phi(tr.Sigma[i + 1][p], m.law.yield_radius) / feas_scale;
      rep.min_lambda = std::min(rep.min_lambda, lam);
      rep.max_phi = std::max(rep.max_phi, phi);
      rep.max_product = std::max(rep.max_product, std::abs(lam * phi));
    }
  }
  for (int p = 0; p < m.points(); ++p)
    rep.max_phi = std::max(rep.max_phi,
                           yield_phi(tr.Sigma[0][p], m.law.yield_radius) / feas_scale);
  return rep;
}

struct InterpolatedState {
  GeneralizedStressField Sigma;
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
};

// Piecewise-linear evaluation for the nodal fields, piecewise-constant
// (right-open cells) for the multiplier.
inline InterpolatedState interpolate(const Trajectory& tr, double time) {
  const double span = tr.horizon();
  if (time < -1e-12 * span || time > span * (1.0 + 1e-12))
    throw std::invalid_argument("interpolate: time outside the trajectory horizon");
  time = std::min(std::max(time, 0.0), span);
  const std::size_t i = cell_index(tr.t, time);
  const double t0 = tr.t[i], t1 = tr.t[i + 1];
  const double theta = (time - t0) / (t1 - t0);
  InterpolatedState s;
  s.Sigma = tr.Sigma[i] * (1.0 - theta) + tr.Sigma[i + 1] * theta;
  s.u = (1.0 - theta) * tr.u[i] + theta * tr.u[i + 1];
  s.lambda = tr.lambda.empty() ? Eigen::VectorXd() : tr.lambda[i];
  return s;
}

// ---------------------------------------------------------------------------
// Reduced evolution formulation
// ---------------------------------------------------------------------------

// Admissible stress fields in self-equilibrium (B Sigma = 0), used as the
// constraint set of the reduced sweeping process.  Projection is the same
// displacement-driven solve with a zero load target.
class SelfEquilibratedAdmissibleSet final : public evi::ConvexSetOracle {
 public:
  explicit SelfEquilibratedAdmissibleSet(const DiscreteModel& m,
                                         SolveOptions opts = {})
      : model_(m), opts_(opts) {}

  Eigen::VectorXd project(const Eigen::VectorXd& y) const override {
    const GeneralizedStressField w = GeneralizedStressField::unflatten(model_, y);
    return project_to_equilibrium(model_, w, Eigen::VectorXd::Zero(model_.ndofs()),
                                  opts_)
        .state.flatten();
  }

  bool contains(const Eigen::VectorXd& y, double tol) const override {
    const GeneralizedStressField f = GeneralizedStressField::unflatten(model_, y);
    const double feas_scale = 0.5 * model_.law.yield_radius * model_.law.yield_radius;
    for (int p = 0; p < model_.points(); ++p)
      if (yield_phi(f[p], model_.law.yield_radius) > tol * feas_scale) return false;
    return apply_B(model_, f).norm() <= tol * std::max(1.0, norm_A(model_, f));
  }

  std::string describe() const override {
    return "self-equilibrated admissible stress fields";
  }

 private:
  const DiscreteModel& model_;
  SolveOptions opts_;
};

// Run the forward problem through the generic sweeping engine: shift by the
// equilibrated pair of the load, sweep the complement, and shift back.
inline std::vector<GeneralizedStressField> reduced_evi_forward(
    const DiscreteModel& m, const LoadProgram& loads, const SolveOptions& opts = {}) {
  loads.validate(m);
  SelfEquilibratedAdmissibleSet set(m, opts);
  std::vector<GeneralizedStressField> shifts;
  VectorPath input;
  input.t = loads.times();
  for (int i = 0; i <= loads.steps(); ++i) {
    shifts.push_back(bsigma_of_ell(m, loads.ell_at(m, i)));
    input.x.push_back(-shifts.back().flatten());
  }
  const VectorPath z =
      evi::run_stop(set, Eigen::VectorXd::Zero(m.field_size()), input);
  std::vector<GeneralizedStressField> sigma;
  sigma.reserve(z.x.size());
  for (std::size_t i = 0; i < z.x.size(); ++i)
    sigma.push_back(GeneralizedStressField::unflatten(m, z.x[i]) + shifts[i]);
  return sigma;
}

}  // namespace plastlab

#endif  // PLASTLAB_FORWARD_HPP

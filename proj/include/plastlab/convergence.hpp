// SPDX-License-Identifier: MIT
//
// Refinement laboratory: exact Bochner-norm comparison of trajectories
// across nested time grids, observed-order studies for the stress error,
// first-order (H1) Cauchy studies with a per-cell one-sided certificate,
// multiplier-norm identities, and an oscillatory-input probe separating
// weak from strong convergence of the load derivative.

#ifndef PLASTLAB_CONVERGENCE_HPP
#define PLASTLAB_CONVERGENCE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "forward.hpp"
#include "model.hpp"
#include "path.hpp"
#include "util.hpp"

namespace plastlab {

// ---------------------------------------------------------------------------
// Named scalar load profiles on [0, T], all starting at zero.
// ---------------------------------------------------------------------------

// ramp: linear 0 -> 1.  triangle: 0 -> 1 -> 0.  cycle: 0 -> 1 -> -1 -> 0.
// sine: half-wave sin(pi t / T).
inline double waveform_value(const std::string& name, double t, double horizon) {
  const double s = t / horizon;
  if (name == "ramp") return s;
  if (name == "triangle") return s <= 0.5 ? 2.0 * s : 2.0 * (1.0 - s);
  if (name == "cycle") {
    if (s <= 0.25) return 4.0 * s;
    if (s <= 0.75) return 1.0 - 4.0 * (s - 0.25);
    return -1.0 + 4.0 * (s - 0.75);
  }
  if (name == "sine") return std::sin(3.14159265358979323846 * s);
  throw std::invalid_argument("waveform_value: unknown waveform '" + name +
                              "' (known: ramp, triangle, cycle, sine)");
}

inline std::function<Eigen::VectorXd(double)> waveform_control(
    const std::string& name, double horizon, const Eigen::VectorXd& pattern) {
  return [name, horizon, pattern](double t) {
    return (pattern * waveform_value(name, t, horizon)).eval();
  };
}

// ---------------------------------------------------------------------------
// Trajectory views as time paths
// ---------------------------------------------------------------------------

inline VectorPath sigma_path(const Trajectory& tr) {
  VectorPath p;
  p.t = tr.t;
  p.x.reserve(tr.Sigma.size());
  for (const auto& s : tr.Sigma) p.x.push_back(s.flatten());
  return p;
}

inline VectorPath u_path(const Trajectory& tr) {
  VectorPath p;
  p.t = tr.t;
  p.x = tr.u;
  return p;
}

inline VectorPath load_path(const Trajectory& tr) {
  VectorPath p;
  p.t = tr.t;
  p.x = tr.load;
  return p;
}

inline CellPath lambda_cells(const Trajectory& tr) {
  CellPath p;
  p.t = tr.t;
  p.v = tr.lambda;
  return p;
}

// ---------------------------------------------------------------------------
// Cross-grid trajectory distances (exact on the union grid)
// ---------------------------------------------------------------------------

struct TrajectoryDistance {
  double sigma_linf = 0.0, sigma_l2 = 0.0, sigma_h1 = 0.0;
  double u_linf = 0.0, u_l2 = 0.0, u_h1 = 0.0;
  double lambda_l2 = 0.0;
};

inline TrajectoryDistance compare(const DiscreteModel& m, const Trajectory& a,
                                  const Trajectory& b) {
  if (std::abs(a.horizon() - b.horizon()) >
      1e-12 * std::max(a.horizon(), b.horizon()))
    throw std::invalid_argument("compare: trajectories have different horizons");
  TrajectoryDistance d;
  MatrixIp aip{&m.metric_A};
  MatrixIp vip{&m.gram_V};
  DiagIp wip{m.weights};

  const VectorPath ds = diff_on_union(sigma_path(a), sigma_path(b));
  d.sigma_linf = path_linf(ds, aip);
  d.sigma_l2 = path_l2(ds, aip);
  d.sigma_h1 = path_h1(ds, aip);

  const VectorPath du = diff_on_union(u_path(a), u_path(b));
  d.u_linf = path_linf(du, vip);
  d.u_l2 = path_l2(du, vip);
  d.u_h1 = path_h1(du, vip);

  d.lambda_l2 = cellpath_l2(cell_diff_on_union(lambda_cells(a), lambda_cells(b)), wip);
  return d;
}

// ---------------------------------------------------------------------------
// Refinement studies
// ---------------------------------------------------------------------------

struct RefinementStudy {
  double horizon = 1.0;
  std::vector<int> steps_list;          // strictly increasing step counts
  int reference_steps = 0;              // finest grid, used as reference
  std::function<Eigen::VectorXd(double)> control;

  void validate() const {
    if (steps_list.empty()) throw std::invalid_argument("RefinementStudy: empty grid list");
    if (!(horizon > 0.0)) throw std::invalid_argument("RefinementStudy: horizon must be positive");
    for (std::size_t i = 0; i + 1 < steps_list.size(); ++i)
      if (steps_list[i + 1] <= steps_list[i])
        throw std::invalid_argument("RefinementStudy: step counts must increase strictly");
    if (reference_steps < 2 * steps_list.back())
      throw std::invalid_argument("RefinementStudy: reference grid must be finer than all studied grids");
    for (int n : steps_list)
      if (reference_steps % n != 0)
        throw std::invalid_argument("RefinementStudy: grids must nest into the reference");
    if (!control) throw std::invalid_argument("RefinementStudy: missing control function");
  }

  std::vector<double> taus() const {
    std::vector<double> out;
    for (int n : steps_list) out.push_back(horizon / n);
    return out;
  }
};

struct StudyOptions {
  SolveOptions solve;
  int jobs = 1;
};

namespace detail {

inline std::vector<ForwardRun> run_study_grids(const DiscreteModel& m,
                                               const RefinementStudy& study,
                                               const StudyOptions& opts,
                                               ForwardRun& reference) {
  study.validate();
  std::vector<int> all = study.steps_list;
  all.push_back(study.reference_steps);
  std::vector<ForwardRun> runs(all.size());
  parallel_for(all.size(), opts.jobs, [&](std::size_t i) {
    const LoadProgram loads =
        LoadProgram::sampled(study.horizon, all[i], study.control);
    runs[i] = run_forward(m, loads, opts.solve);
  });
  reference = std::move(runs.back());
  runs.pop_back();
  return runs;
}

inline double fitted_order(double e_coarse, double e_fine, double tau_coarse,
                           double tau_fine) {
  const double floor = 1e-300;
  return std::log(std::max(e_coarse, floor) / std::max(e_fine, floor)) /
         std::log(tau_coarse / tau_fine);
}

}  // namespace detail

// Observed order of the uniform-in-time stress error against the reference.
struct RateReport {
  std::vector<double> tau;
  std::vector<double> error;      // L-infinity stress distance to reference
  std::vector<double> order;      // fitted order between successive grids
  double min_order = 0.0;
  bool monotone = true;           // errors nonincreasing within 5% slack
  bool negligible = false;        // all errors at machine scale (exact regime)
};

inline RateReport rate_study_Linfty(const DiscreteModel& m,
                                    const RefinementStudy& study,
                                    const StudyOptions& opts = {}) {
  ForwardRun ref;
  const std::vector<ForwardRun> runs = detail::run_study_grids(m, study, opts, ref);
  RateReport rep;
  rep.tau = study.taus();
  double scale = 1.0;
  for (const auto& s : ref.traj.Sigma) scale = std::max(scale, norm_A(m, s));
  for (const auto& run : runs)
    rep.error.push_back(compare(m, run.traj, ref.traj).sigma_linf);
  rep.negligible = true;
  for (double e : rep.error) rep.negligible = rep.negligible && e <= 1e-12 * scale;
  for (std::size_t i = 0; i + 1 < rep.error.size(); ++i) {
    rep.monotone = rep.monotone && rep.error[i + 1] <= 1.05 * rep.error[i];
    if (!rep.negligible)
      rep.order.push_back(detail::fitted_order(rep.error[i], rep.error[i + 1],
                                               rep.tau[i], rep.tau[i + 1]));
  }
  rep.min_order = rep.order.empty()
                      ? 0.0
                      : *std::min_element(rep.order.begin(), rep.order.end());
  return rep;
}

// First-order Cauchy study with the one-sided per-cell certificate
// || lift(dl) - 2 dSigma ||_A <= || lift(dl) ||_A, a discrete consequence of
// testing the step inequality with the equilibrated shift of the load rate.
struct CauchyH1Report {
  std::vector<double> tau;
  std::vector<double> sigma_h1_error;
  std::vector<double> u_h1_error;
  bool monotone = true;                  // within 5% slack
  double final_ratio_sigma = 0.0;        // finest / coarsest
  double final_ratio_u = 0.0;
  double worst_certificate_excess = 0.0; // signed, <= 0 when certified
  bool certificate_ok = true;
  bool negligible = false;
};

inline double certificate_excess(const DiscreteModel& m, const Trajectory& tr) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= tr.steps(); ++i) {
    const GeneralizedStressField lift =
        bsigma_of_ell(m, tr.load[i] - tr.load[i - 1]);
    const GeneralizedStressField probe =
        lift - (tr.Sigma[i] - tr.Sigma[i - 1]) * 2.0;
    const double lhs = norm_A(m, probe);
    const double rhs = norm_A(m, lift);
    worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
  }
  return worst;
}

inline CauchyH1Report h1_cauchy_study(const DiscreteModel& m,
                                      const RefinementStudy& study,
                                      const StudyOptions& opts = {}) {
  ForwardRun ref;
  const std::vector<ForwardRun> runs = detail::run_study_grids(m, study, opts, ref);
  CauchyH1Report rep;
  rep.tau = study.taus();
  for (const auto& run : runs) {
    const TrajectoryDistance d = compare(m, run.traj, ref.traj);
    rep.sigma_h1_error.push_back(d.sigma_h1);
    rep.u_h1_error.push_back(d.u_h1);
    const double exc = certificate_excess(m, run.traj);
    rep.worst_certificate_excess = std::max(rep.worst_certificate_excess, exc);
    rep.certificate_ok = rep.certificate_ok && exc <= 1e-10;
  }
  {
    const double exc = certificate_excess(m, ref.traj);
    rep.worst_certificate_excess = std::max(rep.worst_certificate_excess, exc);
    rep.certificate_ok = rep.certificate_ok && exc <= 1e-10;
  }
  double scale = 1.0;
  for (const auto& s : ref.traj.Sigma) scale = std::max(scale, norm_A(m, s));
  rep.negligible = true;
  for (double e : rep.sigma_h1_error)
    rep.negligible = rep.negligible && e <= 1e-10 * scale;
  for (std::size_t i = 0; i + 1 < rep.sigma_h1_error.size(); ++i)
    rep.monotone = rep.monotone &&
                   rep.sigma_h1_error[i + 1] <= 1.05 * rep.sigma_h1_error[i] &&
                   rep.u_h1_error[i + 1] <= 1.05 * rep.u_h1_error[i];
  if (!rep.sigma_h1_error.empty() && rep.sigma_h1_error.front() > 0.0)
    rep.final_ratio_sigma = rep.sigma_h1_error.back() / rep.sigma_h1_error.front();
  if (!rep.u_h1_error.empty() && rep.u_h1_error.front() > 0.0)
    rep.final_ratio_u = rep.u_h1_error.back() / rep.u_h1_error.front();
  return rep;
}

// Multiplier norm identity and refinement behavior.  The identity equates the
// time-space L2 norm of the multiplier with the L2 norm of the back-stress
// rate mapped through the hardening compliance, scaled by the yield radius.
struct MultiplierReport {
  std::vector<double> tau;
  std::vector<double> identity_gap;  // relative, per run (including reference)
  std::vector<double> l2_error;      // distance to the reference multiplier
  double max_identity_gap = 0.0;
  double final_ratio = 0.0;
  bool decreasing = true;            // within 5% slack
};

inline double multiplier_identity_gap(const DiscreteModel& m, const Trajectory& tr) {
  DiagIp wip{m.weights};
  const double lhs = cellpath_l2(lambda_cells(tr), wip);
  double acc = 0.0;
  for (int i = 1; i <= tr.steps(); ++i) {
    const double dt = tr.t[i] - tr.t[i - 1];
    double cell = 0.0;
    for (int p = 0; p < m.points(); ++p) {
      const SymTensor rate =
          m.law.apply_h_inv(tr.Sigma[i][p].chi - tr.Sigma[i - 1][p].chi) * (1.0 / dt);
      cell += m.weights(p) * frobenius(rate, rate);
    }
    acc += dt * cell;
  }
  const double rhs = std::sqrt(acc) / m.law.yield_radius;
  return std::abs(lhs - rhs) / std::max(1.0, std::max(lhs, rhs));
}

inline MultiplierReport multiplier_study(const DiscreteModel& m,
                                         const RefinementStudy& study,
                                         const StudyOptions& opts = {}) {
  ForwardRun ref;
  const std::vector<ForwardRun> runs = detail::run_study_grids(m, study, opts, ref);
  MultiplierReport rep;
  rep.tau = study.taus();
  DiagIp wip{m.weights};
  for (const auto& run : runs) {
    rep.identity_gap.push_back(multiplier_identity_gap(m, run.traj));
    rep.l2_error.push_back(cellpath_l2(
        cell_diff_on_union(lambda_cells(run.traj), lambda_cells(ref.traj)), wip));
  }
  rep.identity_gap.push_back(multiplier_identity_gap(m, ref.traj));
  for (double gap : rep.identity_gap)
    rep.max_identity_gap = std::max(rep.max_identity_gap, gap);
  for (std::size_t i = 0; i + 1 < rep.l2_error.size(); ++i)
    rep.decreasing = rep.decreasing && rep.l2_error[i + 1] <= 1.05 * rep.l2_error[i];
  if (!rep.l2_error.empty() && rep.l2_error.front() > 0.0)
    rep.final_ratio = rep.l2_error.back() / rep.l2_error.front();
  return rep;
}

// ---------------------------------------------------------------------------
// Oscillation probe: weakly vanishing input perturbations
// ---------------------------------------------------------------------------

// Adds a per-cell zigzag of nodal amplitude a*tau to the control.  The
// perturbation vanishes uniformly while its time derivative keeps unit-order
// L2 mass, so linear time-integrated observables of the solution converge to
// the unperturbed values although the control derivative does not converge.
struct WeakProbeReport {
  std::vector<double> tau;
  std::vector<double> observable_gap_sigma;
  std::vector<double> observable_gap_u;
  std::vector<double> gdot_l2;       // perturbed control-rate norms
  std::vector<double> base_gdot_l2;  // unperturbed, same grids
  bool gaps_shrink = true;
  double min_rate_excess = 0.0;      // min over grids of gdot - base_gdot
};

inline WeakProbeReport weak_convergence_probe(const DiscreteModel& m,
                                              const RefinementStudy& study,
                                              double amplitude,
                                              const StudyOptions& opts = {}) {
  study.validate();
  WeakProbeReport rep;
  rep.tau = study.taus();

  // Fixed linear observables.
  const GeneralizedStressField t_field =
      bsigma_of_ell(m, m.control * Eigen::VectorXd::Ones(m.ncontrols()));
  const Eigen::VectorXd t_flat = t_field.flatten();
  const Eigen::VectorXd v_test = Eigen::VectorXd::Ones(m.ndofs());
  MatrixIp aip{&m.metric_A};
  MatrixIp vip{&m.gram_V};
  DiagIp uip{m.control_weights};

  std::vector<double> gap_s(study.steps_list.size()),
      gap_u(study.steps_list.size()), gdot(study.steps_list.size()),
      base_gdot(study.steps_list.size());
  parallel_for(study.steps_list.size(), opts.jobs, [&](std::size_t k) {
    const int n = study.steps_list[k];
    const double tau = study.horizon / n;
    LoadProgram base = LoadProgram::sampled(study.horizon, n, study.control);
    LoadProgram osc = base;
    for (int i = 1; i <= n; ++i)
      if (i % 2 == 1)
        osc.g[i] = osc.g[i] +
                   amplitude * tau * Eigen::VectorXd::Ones(m.ncontrols());
    const ForwardRun rb = run_forward(m, base, opts.solve);
    const ForwardRun ro = run_forward(m, osc, opts.solve);
    const double os_b = path_integral_against(sigma_path(rb.traj), t_flat, aip);
    const double os_o = path_integral_against(sigma_path(ro.traj), t_flat, aip);
    const double ou_b = path_integral_against(u_path(rb.traj), v_test, vip);
    const double ou_o = path_integral_against(u_path(ro.traj), v_test, vip);
    gap_s[k] = std::abs(os_o - os_b);
    gap_u[k] = std::abs(ou_o - ou_b);
    VectorPath gp_b, gp_o;
    gp_b.t = gp_o.t = base.times();
    gp_b.x = base.g;
    gp_o.x = osc.g;
    gdot[k] = path_dot_lq(gp_o, 2.0, uip);
    base_gdot[k] = path_dot_lq(gp_b, 2.0, uip);
  });
  rep.observable_gap_sigma = gap_s;
  rep.observable_gap_u = gap_u;
  rep.gdot_l2 = gdot;
  rep.base_gdot_l2 = base_gdot;
  for (std::size_t i = 0; i + 1 < gap_s.size(); ++i)
    rep.gaps_shrink = rep.gaps_shrink &&
                      gap_s[i + 1] <= std::max(1.10 * gap_s[i], 1e-12) &&
                      gap_u[i + 1] <= std::max(1.10 * gap_u[i], 1e-12);
  rep.min_rate_excess = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gdot.size(); ++i)
    rep.min_rate_excess = std::min(rep.min_rate_excess, gdot[i] - base_gdot[i]);
  return rep;
}

// ---------------------------------------------------------------------------
// Forward-map stability probes (reported, not asserted against a constant)
// ---------------------------------------------------------------------------

struct ForwardStabilityReport {
  int pairs = 0;
  double worst_holder_ratio = 0.0;    // ||S1-S2||^2_Linf / ||l1-l2||_L2
  double worst_lipschitz_ratio = 0.0; // ||(S,u)1-(S,u)2||_Linf / ||l1-l2||_W11
};

inline ForwardStabilityReport forward_stability_probe(const DiscreteModel& m,
                                                      int steps, int pairs,
                                                      double amplitude,
                                                      unsigned seed,
                                                      const StudyOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, amplitude);
  ForwardStabilityReport rep;
  rep.pairs = pairs;
  const Eigen::MatrixXd gv_inv = m.gram_V_llt.solve(
      Eigen::MatrixXd::Identity(m.ndofs(), m.ndofs()));
  MatrixIp dip{&gv_inv};
  MatrixIp aip{&m.metric_A};
  MatrixIp vip{&m.gram_V};

  auto random_program = [&]() {
    LoadProgram p;
    p.T = 1.0;
    p.g.assign(steps + 1, Eigen::VectorXd::Zero(m.ncontrols()));
    for (int i = 1; i <= steps; ++i) {
      Eigen::VectorXd dv(m.ncontrols());
      for (int j = 0; j < m.ncontrols(); ++j) dv(j) = gauss(rng) / steps;
      p.g[i] = p.g[i - 1] + dv;
    }
    return p;
  };

  for (int k = 0; k < pairs; ++k) {
    const LoadProgram p1 = random_program();
    const LoadProgram p2 = random_program();
    const ForwardRun r1 = run_forward(m, p1, opts.solve);
    const ForwardRun r2 = run_forward(m, p2, opts.solve);
    const VectorPath dl = diff_on_union(load_path(r1.traj), load_path(r2.traj));
    const VectorPath dsig =
        diff_on_union(sigma_path(r1.traj), sigma_path(r2.traj));
    const VectorPath du = diff_on_union(u_path(r1.traj), u_path(r2.traj));
    const double l_l2 = path_l2(dl, dip);
    const double l_w11 = path_dot_lq(dl, 1.0, dip);
    const double s_linf = path_linf(dsig, aip);
    const double u_linf = path_linf(du, vip);
    if (l_l2 > 0.0)
      rep.worst_holder_ratio =
          std::max(rep.worst_holder_ratio, s_linf * s_linf / l_l2);
    if (l_w11 > 0.0)
      rep.worst_lipschitz_ratio =
          std::max(rep.worst_lipschitz_ratio, (s_linf + u_linf) / l_w11);
  }
  return rep;
}

}  // namespace plastlab

#endif  // PLASTLAB_CONVERGENCE_HPP

// SPDX-License-Identifier: MIT
//
// Batch scenario runner: validates a JSON scenario description, executes one
// of the four experiments (forward, converge, evi-check, control), and
// produces deterministic artifacts (trajectory.json, convergence.csv,
// optimization.csv, summary.json) plus machine-readable error records.

#ifndef PLASTLAB_SCENARIO_HPP
#define PLASTLAB_SCENARIO_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "control.hpp"
#include "convergence.hpp"
#include "evi.hpp"
#include "forward.hpp"
#include "io.hpp"
#include "model.hpp"

namespace plastlab {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Failure modes of a scenario run, each with a process exit code and a
// machine-readable JSON record.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int exit_code, std::string kind, const std::string& message,
                ojson details = ojson::object())
      : std::runtime_error(message),
        exit_code_(exit_code),
        kind_(std::move(kind)),
        details_(std::move(details)) {}

  int exit_code() const { return exit_code_; }
  const std::string& kind() const { return kind_; }

  ojson record() const {
    ojson rec;
    rec["error"]["kind"] = kind_;
    rec["error"]["exit_code"] = exit_code_;
    rec["error"]["message"] = what();
    for (auto it = details_.begin(); it != details_.end(); ++it)
      rec["error"][it.key()] = it.value();
    return rec;
  }

 private:
  int exit_code_;
  std::string kind_;
  ojson details_;
};

inline ScenarioError config_error(const std::string& message) {
  return ScenarioError(2, "config", message);
}
inline ScenarioError solver_error(const std::string& message) {
  return ScenarioError(3, "solver", message);
}
inline ScenarioError check_failure(const std::string& message, ojson details) {
  return ScenarioError(4, "check", message, std::move(details));
}

// ---------------------------------------------------------------------------
// JSON access with schema-style errors
// ---------------------------------------------------------------------------

namespace cfg {

inline void require_known_keys(const ojson& j, const std::string& where,
                               const std::vector<std::string>& known) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw config_error(where + ": unknown key '" + it.key() + "'");
}

inline const ojson& require_object(const ojson& j, const std::string& key,
                                   const std::string& where) {
  if (!j.contains(key))
    throw config_error(where + ": missing required object '" + key + "'");
  if (!j.at(key).is_object())
    throw config_error(where + ": '" + key + "' must be an object");
  return j.at(key);
}

inline std::string require_string(const ojson& j, const std::string& key,
                                  const std::string& where) {
  if (!j.contains(key))
    throw config_error(where + ": missing required string '" + key + "'");
  if (!j.at(key).is_string())
    throw config_error(where + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

inline double number_or(const ojson& j, const std::string& key, double fallback,
                        const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw config_error(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline double require_number(const ojson& j, const std::string& key,
                             const std::string& where) {
  if (!j.contains(key))
    throw config_error(where + ": missing required number '" + key + "'");
  if (!j.at(key).is_number())
    throw config_error(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline int int_or(const ojson& j, const std::string& key, int fallback,
                  const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw config_error(where + ": '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

inline int require_int(const ojson& j, const std::string& key,
                       const std::string& where) {
  if (!j.contains(key))
    throw config_error(where + ": missing required integer '" + key + "'");
  if (!j.at(key).is_number_integer())
    throw config_error(where + ": '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

inline std::string string_or(const ojson& j, const std::string& key,
                             const std::string& fallback,
                             const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw config_error(where + ": '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

inline bool bool_or(const ojson& j, const std::string& key, bool fallback,
                    const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean())
    throw config_error(where + ": '" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

inline std::vector<int> int_list_or(const ojson& j, const std::string& key,
                                    std::vector<int> fallback,
                                    const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array())
    throw config_error(where + ": '" + key + "' must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer())
      throw config_error(where + ": '" + key + "' must be an array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace cfg

// ---------------------------------------------------------------------------
// Parsed scenario
// ---------------------------------------------------------------------------

struct ScenarioConfig {
  std::string model_name;
  ModelParams params;
  std::string waveform;
  double amplitude = 0.0;
  double horizon = 1.0;
  int steps = 1;
  std::string experiment;
  ojson options = ojson::object();
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  static ScenarioConfig parse(const ojson& j) {
    if (!j.is_object()) throw config_error("scenario: top level must be an object");
    cfg::require_known_keys(
        j, "scenario", {"model", "load", "experiment", "options", "output", "seed"});

    ScenarioConfig c;
    const ojson& model = cfg::require_object(j, "model", "scenario");
    cfg::require_known_keys(model, "model",
                            {"name", "mu", "lam", "k1", "sigma0", "mesh"});
    c.model_name = cfg::require_string(model, "name", "model");
    c.params.mu = cfg::number_or(model, "mu", c.params.mu, "model");
    c.params.lam = cfg::number_or(model, "lam", c.params.lam, "model");
    c.params.k1 = cfg::number_or(model, "k1", c.params.k1, "model");
    c.params.sigma0 = cfg::number_or(model, "sigma0", c.params.sigma0, "model");
    c.params.mesh = cfg::int_or(model, "mesh", c.params.mesh, "model");

    const ojson& load = cfg::require_object(j, "load", "scenario");
    cfg::require_known_keys(load, "load",
                            {"waveform", "amplitude", "horizon", "steps"});
    c.waveform = cfg::require_string(load, "waveform", "load");
    c.amplitude = cfg::require_number(load, "amplitude", "load");
    c.horizon = cfg::number_or(load, "horizon", 1.0, "load");
    c.steps = cfg::require_int(load, "steps", "load");
    if (!(c.horizon > 0.0)) throw config_error("load: horizon must be positive");
    if (c.steps < 1) throw config_error("load: steps must be at least 1");

    c.experiment = cfg::require_string(j, "experiment", "scenario");
    if (c.experiment != "forward" && c.experiment != "converge" &&
        c.experiment != "evi-check" && c.experiment != "control")
      throw config_error(
          "scenario: experiment must be one of forward, converge, evi-check, "
          "control (got '" + c.experiment + "')");

    if (j.contains("options")) {
      if (!j.at("options").is_object())
        throw config_error("scenario: 'options' must be an object");
      c.options = j.at("options");
    }
    c.output_dir = cfg::string_or(j, "output", "out", "scenario");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
        throw config_error("scenario: 'seed' must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    return c;
  }
};

// ---------------------------------------------------------------------------
// Check lines
// ---------------------------------------------------------------------------

struct CheckLine {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool at_least = false;  // pass means value >= limit instead of value <= limit
  bool pass = false;
};

inline CheckLine check_at_most(const std::string& name, double value,
                               double limit) {
  return {name, value, limit, false, value <= limit};
}
inline CheckLine check_at_least(const std::string& name, double value,
                                double limit) {
  return {name, value, limit, true, value >= limit};
}
inline CheckLine check_flag(const std::string& name, bool ok) {
  return {name, ok ? 1.0 : 0.0, 1.0, true, ok};
}

inline ojson checks_json(const std::vector<CheckLine>& checks) {
  ojson j = ojson::object();
  for (const auto& c : checks) {
    ojson line;
    line["value"] = c.value;
    line["limit"] = c.limit;
    line["require"] = c.at_least ? ">=" : "<=";
    line["pass"] = c.pass;
    j[c.name] = line;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Experiment implementations
// ---------------------------------------------------------------------------

struct ScenarioRun {
  int exit_code = 0;
  std::vector<std::pair<std::string, std::string>> files;  // name -> bytes
  ojson error = ojson::object();                           // empty when clean
};

namespace detail_scenario {

inline LoadProgram build_program(const DiscreteModel& m, const ScenarioConfig& c) {
  try {
    return LoadProgram::sampled(
        c.horizon, c.steps,
        waveform_control(c.waveform, c.horizon,
                         Eigen::VectorXd::Constant(m.ncontrols(), c.amplitude)));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("load: ") + e.what());
  }
}

inline DiscreteModel build_model(const ScenarioConfig& c) {
  try {
    return builtin_model(c.model_name, c.params);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("model: ") + e.what());
  }
}

inline ForwardRun run_forward_or_solver_error(const DiscreteModel& m,
                                              const LoadProgram& loads,
                                              const SolveOptions& opts) {
  try {
    return run_forward(m, loads, opts);
  } catch (const std::exception& e) {
    throw solver_error(e.what());
  }
}

inline void forward_experiment(const ScenarioConfig& c, const DiscreteModel& m,
                               int /*jobs*/, ScenarioRun& out, ojson& summary,
                               std::vector<CheckLine>& checks) {
  cfg::require_known_keys(c.options, "options",
                          {"newton_tol", "newton_max_iter", "residual_tol",
                           "complementarity_tol", "identity_tol"});
  SolveOptions sopts;
  sopts.tol = cfg::number_or(c.options, "newton_tol", sopts.tol, "options");
  sopts.max_iter =
      cfg::int_or(c.options, "newton_max_iter", sopts.max_iter, "options");
  const double res_tol =
      cfg::number_or(c.options, "residual_tol", 1e-9, "options");
  const double comp_tol =
      cfg::number_or(c.options, "complementarity_tol", 1e-9, "options");
  const double id_tol =
      cfg::number_or(c.options, "identity_tol", 1e-10, "options");

  const LoadProgram loads = build_program(m, c);
  const ForwardRun run = run_forward_or_solver_error(m, loads, sopts);
  const ComplementarityReport comp = check_complementarity(m, run.traj);
  const double identity = multiplier_identity_gap(m, run.traj);
  const double cert = certificate_excess(m, run.traj);

  checks.push_back(check_at_most("equilibrium_residual",
                                 run.report.max_equilibrium_residual, res_tol));
  checks.push_back(check_at_most("kinematic_residual",
                                 run.report.max_kinematic_residual, res_tol));
  checks.push_back(check_at_most("yield_excess", comp.max_phi, comp_tol));
  checks.push_back(
      check_at_most("multiplier_negativity", -comp.min_lambda, comp_tol));
  checks.push_back(
      check_at_most("complementarity_product", comp.max_product, comp_tol));
  checks.push_back(check_at_most("multiplier_identity_gap", identity, id_tol));
  checks.push_back(check_at_most("step_certificate_excess", cert, 1e-10));

  summary["results"]["report"] = forward_report_json(run.report);
  out.files.emplace_back("trajectory.json",
                         trajectory_json(m, run.traj, &loads).dump(2) + "\n");
}

inline void converge_experiment(const ScenarioConfig& c, const DiscreteModel& m,
                                int jobs, ScenarioRun& out, ojson& summary,
                                std::vector<CheckLine>& checks) {
  cfg::require_known_keys(c.options, "options",
                          {"steps_list", "reference_steps", "min_order",
                           "max_h1_ratio", "max_lambda_ratio"});
  RefinementStudy study;
  study.horizon = c.horizon;
  study.steps_list =
      cfg::int_list_or(c.options, "steps_list", {8, 16, 32, 64}, "options");
  study.reference_steps = cfg::int_or(c.options, "reference_steps",
                                      study.steps_list.empty()
                                          ? 0
                                          : 4 * study.steps_list.back(),
                                      "options");
  LoadProgram base;
  {
    ScenarioConfig probe = c;
    probe.steps = std::max(1, study.reference_steps);
    base = build_program(m, probe);  // validates the waveform early
  }
  auto control_fn =
      waveform_control(c.waveform, c.horizon,
                       Eigen::VectorXd::Constant(m.ncontrols(), c.amplitude));
  study.control = control_fn;
  try {
    study.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("options: ") + e.what());
  }
  const double min_order = cfg::number_or(c.options, "min_order", 0.45, "options");

  StudyOptions sopts;
  sopts.jobs = jobs;
  RateReport rate;
  CauchyH1Report cauchy;
  MultiplierReport mult;
  try {
    rate = rate_study_Linfty(m, study, sopts);
    cauchy = h1_cauchy_study(m, study, sopts);
    mult = multiplier_study(m, study, sopts);
  } catch (const std::exception& e) {
    throw solver_error(e.what());
  }

  CsvTable table;
  table.header = {"steps",          "tau",        "sigma_linf_error",
                  "observed_order", "sigma_h1_error", "u_h1_error",
                  "lambda_l2_error", "identity_gap"};
  for (std::size_t i = 0; i < study.steps_list.size(); ++i) {
    auto& row = table.add_row();
    row.push_back(csv_cell(study.steps_list[i]));
    row.push_back(csv_cell(rate.tau[i]));
    row.push_back(csv_cell(rate.error[i]));
    row.push_back(i > 0 && i - 1 < rate.order.size() ? csv_cell(rate.order[i - 1])
                                                     : std::string());
    row.push_back(csv_cell(cauchy.sigma_h1_error[i]));
    row.push_back(csv_cell(cauchy.u_h1_error[i]));
    row.push_back(csv_cell(mult.l2_error[i]));
    row.push_back(csv_cell(mult.identity_gap[i]));
  }
  out.files.emplace_back("convergence.csv", table.to_string());

  summary["results"]["negligible_errors"] = rate.negligible;
  summary["results"]["min_observed_order"] = rate.min_order;
  summary["results"]["h1_final_ratio_sigma"] = cauchy.final_ratio_sigma;
  summary["results"]["h1_final_ratio_u"] = cauchy.final_ratio_u;
  summary["results"]["lambda_final_ratio"] = mult.final_ratio;
  summary["results"]["reference_identity_gap"] = mult.identity_gap.back();

  if (!rate.negligible)
    checks.push_back(check_at_least("observed_order", rate.min_order, min_order));
  checks.push_back(check_flag("errors_monotone", rate.monotone && cauchy.monotone));
  checks.push_back(check_flag("lambda_errors_decreasing", mult.decreasing));
  checks.push_back(check_at_most("step_certificate_excess",
                                 cauchy.worst_certificate_excess, 1e-10));
  checks.push_back(
      check_at_most("multiplier_identity_gap", mult.max_identity_gap, 1e-10));
  if (c.options.contains("max_h1_ratio"))
    checks.push_back(check_at_most(
        "h1_final_ratio", cauchy.final_ratio_sigma,
        cfg::require_number(c.options, "max_h1_ratio", "options")));
  if (c.options.contains("max_lambda_ratio"))
    checks.push_back(check_at_most(
        "lambda_final_ratio", mult.final_ratio,
        cfg::require_number(c.options, "max_lambda_ratio", "options")));
}

inline void evi_experiment(const ScenarioConfig& c, const DiscreteModel& m,
                           int /*jobs*/, ScenarioRun& out, ojson& summary,
                           std::vector<CheckLine>& checks) {
  cfg::require_known_keys(c.options, "options",
                          {"tolerance", "holder_pairs", "holder_scale"});
  const double tol = cfg::number_or(c.options, "tolerance", 1e-8, "options");
  const int pairs = cfg::int_or(c.options, "holder_pairs", 25, "options");
  const double scale = cfg::number_or(c.options, "holder_scale", 2.0, "options");
  if (pairs < 0) throw config_error("options: holder_pairs must be nonnegative");

  const LoadProgram loads = build_program(m, c);
  const ForwardRun run = run_forward_or_solver_error(m, loads, {});
  std::vector<GeneralizedStressField> swept;
  try {
    swept = reduced_evi_forward(m, loads);
  } catch (const std::exception& e) {
    throw solver_error(e.what());
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < swept.size(); ++i) {
    const double dev = norm_A(m, run.traj.Sigma[i] - swept[i]) /
                       std::max(1.0, norm_A(m, run.traj.Sigma[i]));
    worst = std::max(worst, dev);
  }
  checks.push_back(check_at_most("evi_forward_deviation", worst, tol));

  // Per-step projection inequalities of the sweep itself.
  {
    SelfEquilibratedAdmissibleSet set(m);
    evi::Metric metric = evi::Metric::dense(m.metric_A);
    VectorPath input;
    input.t = loads.times();
    for (int i = 0; i <= loads.steps(); ++i)
      input.x.push_back(-bsigma_of_ell(m, loads.ell_at(m, i)).flatten());
    const evi::DissipationReport diss = evi::dissipation_check(
        set, metric, Eigen::VectorXd::Zero(m.field_size()), input);
    checks.push_back(check_flag("sweep_dissipation", diss.ok));
    summary["results"]["dissipation_worst_cross"] = diss.worst_cross;
  }

  // Randomized two-sided stability inequality on the pointwise yield set.
  if (pairs > 0) {
    evi::VonMisesFieldSet set(m);
    evi::Metric metric = evi::Metric::dense(m.metric_A);
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int nsteps = 16;
    double worst_slack = std::numeric_limits<double>::infinity();
    bool all_ok = true;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m.field_size());
    auto random_path = [&]() {
      VectorPath p;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(m.field_size());
      for (int i = 0; i <= nsteps; ++i) {
        p.t.push_back(c.horizon * i / nsteps);
        if (i > 0)
          for (Eigen::Index k = 0; k < x.size(); ++k)
            x(k) += scale / nsteps * gauss(rng);
        p.x.push_back(x);
      }
      return p;
    };
    for (int k = 0; k < pairs; ++k) {
      const VectorPath u1 = random_path();
      const VectorPath u2 = random_path();
      for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        const evi::HolderReport rep = evi::holder_check(set, metric, u1, x0, u2, x0, p);
        all_ok = all_ok && rep.satisfied;
        worst_slack = std::min(worst_slack, rep.slack);
      }
    }
    checks.push_back(check_flag("holder_bound", all_ok));
    summary["results"]["holder_pairs"] = pairs;
    summary["results"]["holder_worst_slack"] = worst_slack;
  }

  summary["results"]["evi_forward_deviation"] = worst;
  summary["results"]["report"] = forward_report_json(run.report);
  out.files.emplace_back("trajectory.json",
                         trajectory_json(m, run.traj, &loads).dump(2) + "\n");
}

inline void control_experiment(const ScenarioConfig& c, const DiscreteModel& m,
                               int jobs, ScenarioRun& out, ojson& summary,
                               std::vector<CheckLine>& checks) {
  cfg::require_known_keys(
      c.options, "options",
      {"objective", "nu", "set", "rho", "target_waveform", "target_amplitude",
       "target_value", "target", "grad_tol", "step_tol", "max_iterations",
       "fd_step", "require_converged"});

  ControlProblem cp;
  cp.model = &m;
  cp.horizon = c.horizon;
  cp.steps = c.steps;

  const std::string objective =
      cfg::string_or(c.options, "objective", "final_displacement", "options");
  cp.objective.nu = cfg::number_or(c.options, "nu", 1.0, "options");
  if (objective == "tracking") {
    cp.objective.kind = Objective::Kind::tracking;
    const std::string wf =
        cfg::string_or(c.options, "target_waveform", "sine", "options");
    const double amp =
        cfg::require_number(c.options, "target_amplitude", "options");
    VectorPath track;
    for (int i = 0; i <= c.steps; ++i) {
      const double t = c.horizon * i / c.steps;
      track.t.push_back(t);
      try {
        track.x.push_back(Eigen::VectorXd::Constant(
            m.ndofs(), amp * waveform_value(wf, t, c.horizon)));
      } catch (const std::invalid_argument& e) {
        throw config_error(std::string("options: ") + e.what());
      }
    }
    cp.objective.track = track;
  } else if (objective == "final_displacement" || objective == "final_strain") {
    cp.objective.kind = objective == "final_displacement"
                            ? Objective::Kind::final_displacement
                            : Objective::Kind::final_strain;
    const int dim = objective == "final_displacement" ? m.ndofs()
                                                      : m.points() * m.ncomp();
    if (c.options.contains("target")) {
      if (!c.options.at("target").is_array())
        throw config_error("options: 'target' must be an array of numbers");
      Eigen::VectorXd tv(c.options.at("target").size());
      Eigen::Index i = 0;
      for (const auto& v : c.options.at("target")) {
        if (!v.is_number())
          throw config_error("options: 'target' must be an array of numbers");
        tv(i++) = v.get<double>();
      }
      cp.objective.final_target = tv;
    } else {
      cp.objective.final_target = Eigen::VectorXd::Constant(
          dim, cfg::require_number(c.options, "target_value", "options"));
    }
  } else {
    throw config_error(
        "options: objective must be one of tracking, final_displacement, "
        "final_strain (got '" + objective + "')");
  }

  const std::string set =
      cfg::string_or(c.options, "set", "pinned_ends", "options");
  if (set == "pinned_ends") {
    cp.admissible.kind = AdmissibleSet::Kind::pinned_ends;
  } else if (set == "node_bound") {
    cp.admissible.kind = AdmissibleSet::Kind::node_bound;
    cp.admissible.rho = cfg::require_number(c.options, "rho", "options");
  } else {
    throw config_error(
        "options: set must be pinned_ends or node_bound (got '" + set + "')");
  }

  DescentOptions dopts;
  dopts.grad_tol = cfg::number_or(c.options, "grad_tol", 1e-6, "options");
  dopts.step_tol = cfg::number_or(c.options, "step_tol", dopts.step_tol, "options");
  dopts.max_iterations =
      cfg::int_or(c.options, "max_iterations", 200, "options");
  dopts.fd_step = cfg::number_or(c.options, "fd_step", dopts.fd_step, "options");
  dopts.jobs = jobs;
  const bool require_converged =
      cfg::bool_or(c.options, "require_converged", true, "options");

  const LoadProgram start = build_program(m, c);
  DescentResult res;
  try {
    cp.validate();
    cp.admissible.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("options: ") + e.what());
  }
  try {
    res = projected_gradient(cp, start, dopts);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("control: ") + e.what());
  } catch (const std::exception& e) {
    throw solver_error(e.what());
  }

  CsvTable table;
  table.header = {"iteration", "objective", "stationarity", "step_norm", "alpha"};
  for (const auto& rec : res.history) {
    auto& row = table.add_row();
    row.push_back(csv_cell(rec.iteration));
    row.push_back(csv_cell(rec.objective));
    row.push_back(csv_cell(rec.grad_norm));
    row.push_back(csv_cell(rec.step_norm));
    row.push_back(csv_cell(rec.alpha));
  }
  out.files.emplace_back("optimization.csv", table.to_string());

  ForwardRun run;
  ObjectiveValue value;
  try {
    value = evaluate_objective(cp, res.g, {}, &run);
  } catch (const std::exception& e) {
    throw solver_error(e.what());
  }
  const ComplementarityReport comp = check_complementarity(m, run.traj);

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < res.history.size(); ++i)
    monotone = monotone && res.history[i + 1].objective <= res.history[i].objective;

  summary["results"]["iterations"] =
      static_cast<int>(res.history.empty() ? 0 : res.history.back().iteration);
  summary["results"]["accepted_steps"] = res.accepted_steps;
  summary["results"]["stop_reason"] = res.stop_reason;
  summary["results"]["objective"] = value.total;
  summary["results"]["misfit"] = value.misfit;
  summary["results"]["tikhonov"] = value.tikhonov;
  summary["results"]["stationarity"] = res.grad_norm;
  summary["results"]["control_h1_norm"] = control_h1_norm(m, res.g);
  summary["results"]["final_displacement"] = to_json(run.traj.u.back());

  checks.push_back(check_flag("iterates_feasible", res.iterates_feasible));
  checks.push_back(check_flag("objective_monotone", monotone));
  if (require_converged) checks.push_back(check_flag("converged", res.converged));
  checks.push_back(
      check_at_most("complementarity_product", comp.max_product, 1e-9));

  out.files.emplace_back("trajectory.json",
                         trajectory_json(m, run.traj, &res.g).dump(2) + "\n");
}

}  // namespace detail_scenario

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

// Executes one scenario document.  Artifact files come back as (name, bytes)
// pairs; nothing is written to disk here.  Config and solver failures throw
// away partial artifacts and report only the error record; check failures
// keep all artifacts so the summary can be inspected.
inline ScenarioRun execute_scenario(const ojson& config, int jobs = 1,
                                    std::optional<std::uint64_t> seed_override = {},
                                    std::optional<std::string> out_override = {}) {
  ScenarioRun out;
  try {
    ScenarioConfig c = ScenarioConfig::parse(config);
    if (seed_override) c.seed = *seed_override;
    if (out_override) c.output_dir = *out_override;
    if (jobs < 1) throw config_error("jobs must be at least 1");
    const DiscreteModel m = detail_scenario::build_model(c);

    ojson summary;
    summary["scenario"] = config;
    summary["effective_seed"] = c.seed;
    summary["results"] = ojson::object();
    std::vector<CheckLine> checks;

    if (c.experiment == "forward")
      detail_scenario::forward_experiment(c, m, jobs, out, summary, checks);
    else if (c.experiment == "converge")
      detail_scenario::converge_experiment(c, m, jobs, out, summary, checks);
    else if (c.experiment == "evi-check")
      detail_scenario::evi_experiment(c, m, jobs, out, summary, checks);
    else
      detail_scenario::control_experiment(c, m, jobs, out, summary, checks);

    bool pass = true;
    std::vector<std::string> failed;
    for (const auto& chk : checks) {
      pass = pass && chk.pass;
      if (!chk.pass) failed.push_back(chk.name);
    }
    summary["checks"] = checks_json(checks);
    summary["pass"] = pass;
    out.files.emplace_back("summary.json", summary.dump(2) + "\n");
    if (!pass) {
      ojson details;
      details["failed_checks"] = failed;
      const ScenarioError err =
          check_failure("scenario checks failed", std::move(details));
      out.exit_code = err.exit_code();
      out.error = err.record();
    }
  } catch (const ScenarioError& e) {
    out.files.clear();
    out.exit_code = e.exit_code();
    out.error = e.record();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

inline std::string describe_entry(const std::string& name) {
  if (name == "uniaxial")
    return "uniaxial: single material point under a fixed uniaxial strain\n"
           "direction with one displacement coordinate and one control.\n"
           "Parameters: mu, lam (elastic moduli), k1 (hardening modulus),\n"
           "sigma0 (uniaxial yield stress).  With the defaults (6, 4, 2, 1)\n"
           "the elastic slope is 16, yielding starts at load 4/3, and the\n"
           "elastoplastic slope is 64/7.\n";
  if (name == "patch2d")
    return "patch2d: plane-strain square patch on a mesh x mesh grid of\n"
           "bilinear elements, clamped on the left edge, with independently\n"
           "controlled boundary tractions on the right edge (2(mesh+1)\n"
           "control coordinates).  Parameters: mu, lam, k1, sigma0, mesh\n"
           "(1..4 subdivisions per side).\n";
  if (name == "forward")
    return "forward: runs the incremental elastoplastic solver on the\n"
           "configured load program and writes the full trajectory.\n"
           "Checks reported in summary.json:\n"
           "  equilibrium_residual    discrete equilibrium holds at every node\n"
           "  kinematic_residual      elastic/plastic strain split is consistent\n"
           "  yield_excess            stresses stay inside the yield surface\n"
           "  multiplier_negativity   plastic multipliers are nonnegative\n"
           "  complementarity_product multiplier and yield gap never both active\n"
           "  multiplier_identity_gap multiplier L2 norm equals the scaled\n"
           "                          back-stress rate norm\n"
           "  step_certificate_excess per-cell contraction bound of the\n"
           "                          increment against the lifted load rate\n"
           "Options: newton_tol, residual_tol, complementarity_tol, identity_tol.\n";
  if (name == "converge")
    return "converge: solves the same load program on a ladder of time grids\n"
           "plus a finer reference, writes convergence.csv (uniform stress\n"
           "error with observed order, first-order stress/displacement\n"
           "distances, multiplier L2 error, norm-identity gap per grid), and\n"
           "checks in summary.json:\n"
           "  observed_order            fitted uniform-error order (skipped\n"
           "                            when errors are at machine scale)\n"
           "  errors_monotone           errors shrink under refinement\n"
           "  lambda_errors_decreasing  multiplier errors shrink\n"
           "  step_certificate_excess   per-cell contraction bound on all runs\n"
           "  multiplier_identity_gap   norm identity on all runs\n"
           "Options: steps_list, reference_steps, min_order, max_h1_ratio,\n"
           "max_lambda_ratio.\n";
  if (name == "evi-check")
    return "evi-check: replays the load program through the generic\n"
           "rate-independent sweeping engine (projection onto the\n"
           "self-equilibrated admissible stress set) and compares against the\n"
           "incremental solver.  Checks in summary.json:\n"
           "  evi_forward_deviation  max nodal energy-norm deviation between\n"
           "                         the two formulations\n"
           "  sweep_dissipation      per-step projection inequalities of the\n"
           "                         sweeping scheme\n"
           "  holder_bound           randomized two-sided stability bound for\n"
           "                         the play operator on the yield set\n"
           "Options: tolerance, holder_pairs, holder_scale.  The RNG seed\n"
           "drives the randomized pairs.\n";
  if (name == "control")
    return "control: minimizes a tracking objective over load programs with\n"
           "projected gradient descent in the discrete H1 metric, starting\n"
           "from the configured load program.  Objectives: tracking (time\n"
           "integral of the displacement misfit), final_displacement,\n"
           "final_strain; Tikhonov weight nu.  Admissible sets: pinned_ends\n"
           "(start and end clamped to zero; exact metric projection) and\n"
           "node_bound (nodewise norm bound rho; radial projection,\n"
           "approximate in the H1 metric).  Checks in summary.json:\n"
           "  iterates_feasible        every accepted iterate stays admissible\n"
           "  objective_monotone       objective history never increases\n"
           "  converged                stationarity reached within budget\n"
           "  complementarity_product  optimality system of the final forward\n"
           "                           run is consistent\n"
           "Options: objective, nu, set, rho, target_waveform,\n"
           "target_amplitude, target_value, target, grad_tol, step_tol,\n"
           "max_iterations, fd_step, require_converged.\n";
  if (name == "config")
    return "config: a scenario is one JSON object with keys\n"
           "  model      {name: uniaxial|patch2d, mu, lam, k1, sigma0, mesh}\n"
           "  load       {waveform: ramp|triangle|cycle|sine, amplitude,\n"
           "              horizon, steps}\n"
           "  experiment forward | converge | evi-check | control\n"
           "  options    experiment-specific settings (see describe <name>)\n"
           "  output     artifact directory (default 'out')\n"
           "  seed       nonnegative integer for randomized checks\n"
           "Artifacts: trajectory.json, convergence.csv, optimization.csv,\n"
           "summary.json as applicable.  Exit codes: 0 all checks pass,\n"
           "2 invalid config, 3 solver failure, 4 check failure.\n";
  throw config_error("unknown describe target '" + name +
                     "' (known: uniaxial, patch2d, forward, converge, "
                     "evi-check, control, config)");
}

}  // namespace plastlab

#endif  // PLASTLAB_SCENARIO_HPP

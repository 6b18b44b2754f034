// SPDX-License-Identifier: MIT
//
// Generic rate-independent stop/play engine on R^k with an SPD metric:
// catching-up time stepping x_i = proj_Z(x_{i-1} + (u_i - u_{i-1})), the
// play xi = u - x, per-step dissipation checks, and the two-sided evaluation
// of the local Hoelder-1/2 stability bound.

#ifndef PLASTLAB_EVI_HPP
#define PLASTLAB_EVI_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "path.hpp"
#include "return_map.hpp"

namespace plastlab {
namespace evi {

// SPD inner product on R^k; an empty matrix means Euclidean.
struct Metric {
  Eigen::MatrixXd m;

  static Metric euclidean() { return {}; }
  static Metric dense(Eigen::MatrixXd mat) { return {std::move(mat)}; }

  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return m.size() == 0 ? a.dot(b) : a.dot(m * b);
  }
  double norm(const Eigen::VectorXd& a) const {
    return std::sqrt(std::max(0.0, inner(a, a)));
  }
};

// Closed convex set with a metric projection; each implementation knows the
// metric its projection minimizes.
class ConvexSetOracle {
 public:
  virtual ~ConvexSetOracle() = default;
  virtual Eigen::VectorXd project(const Eigen::VectorXd& y) const = 0;
  virtual bool contains(const Eigen::VectorXd& y, double tol) const = 0;
  virtual std::string describe() const = 0;
};

class WholeSpace final : public ConvexSetOracle {
 public:
  Eigen::VectorXd project(const Eigen::VectorXd& y) const override { return y; }
  bool contains(const Eigen::VectorXd&, double) const override { return true; }
  std::string describe() const override { return "whole space"; }
};

// Interval [lo, hi] in one dimension; the metric projection is a clamp for
// any positive scalar metric.
class IntervalSet final : public ConvexSetOracle {
 public:
  IntervalSet(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("IntervalSet: requires lo <= hi");
  }
  Eigen::VectorXd project(const Eigen::VectorXd& y) const override {
    check(y);
    Eigen::VectorXd out(1);
    out(0) = std::min(hi_, std::max(lo_, y(0)));
    return out;
  }
  bool contains(const Eigen::VectorXd& y, double tol) const override {
    check(y);
    return y(0) >= lo_ - tol && y(0) <= hi_ + tol;
  }
  std::string describe() const override {
    return "interval [" + std::to_string(lo_) + ", " + std::to_string(hi_) + "]";
  }

 private:
  static void check(const Eigen::VectorXd& y) {
    if (y.size() != 1)
      throw std::invalid_argument("IntervalSet: one-dimensional states only");
  }
  double lo_, hi_;
};

// Metric ball {x : ||x - center||_metric <= radius}; the metric projection
// is the radial rescaling in that same metric.
class BallSet final : public ConvexSetOracle {
 public:
  BallSet(Eigen::VectorXd center, double radius, Metric metric = {})
      : center_(std::move(center)), radius_(radius), metric_(std::move(metric)) {
    if (!(radius > 0.0)) throw std::invalid_argument("BallSet: radius must be positive");
  }
  Eigen::VectorXd project(const Eigen::VectorXd& y) const override {
    const Eigen::VectorXd d = y - center_;
    const double n = metric_.norm(d);
    if (n <= radius_) return y;
    return center_ + d * (radius_ / n);
  }
  bool contains(const Eigen::VectorXd& y, double tol) const override {
    return metric_.norm(y - center_) <= radius_ + tol;
  }
  std::string describe() const override {
    return "metric ball, radius " + std::to_string(radius_);
  }

 private:
  Eigen::VectorXd center_;
  double radius_;
  Metric metric_;
};

// Flattened stress fields inside the pointwise yield set
// {|dev sigma_p + dev chi_p| <= r for all p}; projection in the compliance
// metric decouples into pointwise returns.
class VonMisesFieldSet final : public ConvexSetOracle {
 public:
  explicit VonMisesFieldSet(DiscreteModel model) : model_(std::move(model)) {}

  Eigen::VectorXd project(const Eigen::VectorXd& y) const override {
    GeneralizedStressField f = GeneralizedStressField::unflatten(model_, y);
    for (auto& s : f.pts) s = project_pointwise(model_.law, s).state;
    return f.flatten();
  }
  bool contains(const Eigen::VectorXd& y, double tol) const override {
    GeneralizedStressField f = GeneralizedStressField::unflatten(model_, y);
    const double r = model_.law.yield_radius;
    for (const auto& s : f.pts)
      if (frobenius_norm(dd(s)) > r + tol) return false;
    return true;
  }
  std::string describe() const override {
    return "pointwise yield cylinder, " + std::to_string(model_.points()) +
           " points";
  }
  const DiscreteModel& model() const { return model_; }

 private:
  DiscreteModel model_;
};

// ---------------------------------------------------------------------------
// Catching-up scheme
// ---------------------------------------------------------------------------

inline Eigen::VectorXd stop_step(const ConvexSetOracle& set,
                                 const Eigen::VectorXd& x_prev,
                                 const Eigen::VectorXd& du) {
  return set.project(x_prev + du);
}

// Catching-up states at the input's nodes.  The initial state must be
// admissible.
inline VectorPath run_stop(const ConvexSetOracle& set, const Eigen::VectorXd& x0,
                           const VectorPath& input, double membership_tol = 1e-9) {
  validate_path(input, "run_stop input");
  if (x0.size() != input.x.front().size())
    throw std::invalid_argument("run_stop: state/input size mismatch");
  if (!set.contains(x0, membership_tol))
    throw std::invalid_argument("run_stop: initial state is not admissible");
  VectorPath out;
  out.t = input.t;
  out.x.reserve(input.t.size());
  out.x.push_back(x0);
  for (std::size_t i = 1; i < input.t.size(); ++i)
    out.x.push_back(stop_step(set, out.x.back(), input.x[i] - input.x[i - 1]));
  return out;
}

// Play component xi = u - x of the same evolution.
inline VectorPath run_play(const ConvexSetOracle& set, const Eigen::VectorXd& x0,
                           const VectorPath& input, double membership_tol = 1e-9) {
  VectorPath stop = run_stop(set, x0, input, membership_tol);
  VectorPath out;
  out.t = input.t;
  out.x.reserve(input.t.size());
  for (std::size_t i = 0; i < input.t.size(); ++i)
    out.x.push_back(input.x[i] - stop.x[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

// Per-step projection inequalities: <d_xi, d_x> >= 0, ||d_xi|| <= ||du||,
// ||d_x|| <= ||du|| (all in the projection metric).
struct DissipationReport {
  bool ok = true;
  double worst_cross = 0.0;      // most negative <d_xi, d_x>, relative
  double worst_play_excess = 0.0;
  double worst_state_excess = 0.0;
};

inline DissipationReport dissipation_check(const ConvexSetOracle& set,
                                           const Metric& metric,
                                           const Eigen::VectorXd& x0,
                                           const VectorPath& input,
                                           double tol = 1e-10) {
  const VectorPath x = run_stop(set, x0, input);
  DissipationReport rep;
  for (std::size_t i = 1; i < input.t.size(); ++i) {
    const Eigen::VectorXd du = input.x[i] - input.x[i - 1];
    const Eigen::VectorXd dx = x.x[i] - x.x[i - 1];
    const Eigen::VectorXd dxi = du - dx;
    const double ndu = metric.norm(du);
    const double scale = std::max(1.0, ndu * ndu);
    const double cross = metric.inner(dxi, dx) / scale;
    const double play_excess = (metric.norm(dxi) - ndu) / std::max(1.0, ndu);
    const double state_excess = (metric.norm(dx) - ndu) / std::max(1.0, ndu);
    rep.worst_cross = std::min(rep.worst_cross, cross);
    rep.worst_play_excess = std::max(rep.worst_play_excess, play_excess);
    rep.worst_state_excess = std::max(rep.worst_state_excess, state_excess);
  }
  rep.ok = rep.worst_cross >= -tol && rep.worst_play_excess <= tol &&
           rep.worst_state_excess <= tol;
  return rep;
}

// Two-sided evaluation of the stability bound
//   ||xi1 - xi2||_{Linf}^2 <=
//     2 (||u1'||_{Lq} + ||u2'||_{Lq}) ||u1 - u2||_{Lp} + ||xi1(0) - xi2(0)||^2
// with q the dual exponent of p; norms taken in the projection metric.
struct HolderReport {
  double p = 2.0, q = 2.0;
  double lhs = 0.0;      // ||xi1 - xi2||_{Linf}^2
  double rhs = 0.0;
  double slack = 0.0;    // rhs - lhs
  bool satisfied = false;
};

inline HolderReport holder_check(const ConvexSetOracle& set, const Metric& metric,
                                 const VectorPath& u1, const Eigen::VectorXd& x01,
                                 const VectorPath& u2, const Eigen::VectorXd& x02,
                                 double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("holder_check: p must be in [1, inf]");
  const double q =
      std::isinf(p) ? 1.0
                    : (p == 1.0 ? std::numeric_limits<double>::infinity()
                                : p / (p - 1.0));
  const VectorPath xi1 = run_play(set, x01, u1);
  const VectorPath xi2 = run_play(set, x02, u2);

  MatrixIp mip{&metric.m};
  EuclideanIp eip;
  auto lp_norm = [&](const VectorPath& path, double e) {
    return metric.m.size() == 0 ? path_lp(path, e, eip) : path_lp(path, e, mip);
  };
  auto dot_norm = [&](const VectorPath& path, double e) {
    return metric.m.size() == 0 ? path_dot_lq(path, e, eip) : path_dot_lq(path, e, mip);
  };
  auto linf_norm = [&](const VectorPath& path) {
    return metric.m.size() == 0 ? path_linf(path, eip) : path_linf(path, mip);
  };

  HolderReport rep;
  rep.p = p;
  rep.q = q;
  const VectorPath diff_play = diff_on_union(xi1, xi2);
  const VectorPath diff_input = diff_on_union(u1, u2);
  const double linf = linf_norm(diff_play);
  rep.lhs = linf * linf;
  const double head = metric.norm(xi1.x.front() - xi2.x.front());
  rep.rhs = 2.0 * (dot_norm(u1, q) + dot_norm(u2, q)) * lp_norm(diff_input, p) +
            head * head;
  rep.slack = rep.rhs - rep.lhs;
  rep.satisfied = rep.slack >= -1e-12 * std::max(1.0, rep.rhs);
  return rep;
}

}  // namespace evi
}  // namespace plastlab

#endif  // PLASTLAB_EVI_HPP

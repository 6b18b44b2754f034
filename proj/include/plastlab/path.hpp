// SPDX-License-Identifier: MIT
//
// Piecewise-linear vector trajectories on (possibly nonuniform) time grids
// and exact Bochner-type norms of them.  The space inner product is passed
// as a callable (Euclidean, diagonal, or dense-matrix metric); all cell
// integrals of piecewise-linear data are closed-form, including the L1 norm
// (integral of the square root of a quadratic).

#ifndef PLASTLAB_PATH_HPP
#define PLASTLAB_PATH_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace plastlab {

struct EuclideanIp {
  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(b);
  }
};

struct DiagIp {
  Eigen::VectorXd w;
  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return (a.array() * w.array() * b.array()).sum();
  }
};

struct MatrixIp {
  const Eigen::MatrixXd* m = nullptr;
  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(*m * b);
  }
};

// Nodal values interpreted as a piecewise-linear function of time.
struct VectorPath {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;

  double duration() const { return t.empty() ? 0.0 : t.back(); }
};

inline void validate_path(const VectorPath& p, const char* what = "path") {
  if (p.t.size() != p.x.size() || p.t.empty())
    throw std::invalid_argument(std::string(what) + ": node/value count mismatch");
  if (p.t.front() != 0.0)
    throw std::invalid_argument(std::string(what) + ": grid must start at 0");
  for (std::size_t i = 1; i < p.t.size(); ++i) {
    if (!(p.t[i] > p.t[i - 1]))
      throw std::invalid_argument(std::string(what) + ": grid not strictly increasing");
    if (p.x[i].size() != p.x[0].size())
      throw std::invalid_argument(std::string(what) + ": inconsistent value sizes");
  }
}

// Index of the cell [t_i, t_{i+1}] containing `time` (right-open, last cell
// closed at the end).
inline std::size_t cell_index(const std::vector<double>& t, double time) {
  if (t.size() < 2 || time < t.front() || time > t.back())
    throw std::invalid_argument("cell_index: time outside the grid");
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  std::size_t i = static_cast<std::size_t>(it - t.begin());
  if (i >= t.size()) i = t.size() - 1;  // time == t.back()
  return i - 1;
}

inline Eigen::VectorXd eval_path(const VectorPath& p, double time) {
  if (p.t.size() == 1) {
    if (time != p.t.front())
      throw std::invalid_argument("eval_path: time outside the grid");
    return p.x.front();
  }
  const std::size_t i = cell_index(p.t, time);
  const double dt = p.t[i + 1] - p.t[i];
  const double s = (time - p.t[i]) / dt;
  return (1.0 - s) * p.x[i] + s * p.x[i + 1];
}

// Merge two grids (tolerant deduplication; exact for shared dyadic nodes).
inline std::vector<double> union_times(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  const double span = out.empty() ? 1.0 : std::max(1.0, std::abs(out.back()));
  const double tol = 1e-12 * span;
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double x, double y) { return std::abs(x - y) <= tol; }),
            out.end());
  return out;
}

inline VectorPath resample_path(const VectorPath& p, const std::vector<double>& times) {
  VectorPath out;
  out.t = times;
  out.x.reserve(times.size());
  for (double time : times) out.x.push_back(eval_path(p, time));
  return out;
}

// Difference a - b evaluated on the union grid (exact: both are piecewise
// linear, so the difference is piecewise linear on the union grid).
inline VectorPath diff_on_union(const VectorPath& a, const VectorPath& b) {
  const std::vector<double> times = union_times(a.t, b.t);
  VectorPath out;
  out.t = times;
  out.x.reserve(times.size());
  for (double time : times) out.x.push_back(eval_path(a, time) - eval_path(b, time));
  return out;
}

// ---------------------------------------------------------------------------
// Exact norms of piecewise-linear paths
// ---------------------------------------------------------------------------

// sup-norm in time; the pointwise norm of a linear segment is convex, so the
// maximum sits at a node.
template <class Ip>
double path_linf(const VectorPath& p, const Ip& ip) {
  double best = 0.0;
  for (const auto& v : p.x) best = std::max(best, std::sqrt(std::max(0.0, ip(v, v))));
  return best;
}

// Exact squared L2 norm: cellwise integral of a quadratic.
template <class Ip>
double path_l2_sq(const VectorPath& p, const Ip& ip) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    const double dt = p.t[i + 1] - p.t[i];
    acc += dt / 3.0 *
           (ip(p.x[i], p.x[i]) + ip(p.x[i], p.x[i + 1]) + ip(p.x[i + 1], p.x[i + 1]));
  }
  return acc;
}

template <class Ip>
double path_l2(const VectorPath& p, const Ip& ip) {
  return std::sqrt(std::max(0.0, path_l2_sq(p, ip)));
}

// Exact integral of ||a + (s/dt) (b - a)|| over s in [0, dt]: square root of
// a quadratic, integrated in closed form.
template <class Ip>
double segment_l1(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double dt,
                  const Ip& ip) {
  const Eigen::VectorXd c = (b - a) / dt;
  const double alpha = ip(c, c);
  const double gamma = ip(a, a);
  const double scale = std::max({alpha, gamma, 1e-300});
  if (alpha <= 1e-28 * scale) return dt * std::sqrt(std::max(0.0, gamma));
  const double beta = 2.0 * ip(a, c);
  const double s0 = -beta / (2.0 * alpha);
  const double rho_sq = std::max(0.0, gamma / alpha - s0 * s0);
  const double rho = std::sqrt(rho_sq);
  auto antiderivative = [&](double u) {
    const double r = std::sqrt(u * u + rho_sq);
    if (rho <= 1e-14 * (std::abs(u) + rho)) return 0.5 * u * std::abs(u);
    return 0.5 * (u * r + rho_sq * std::asinh(u / rho));
  };
  return std::sqrt(alpha) * (antiderivative(dt - s0) - antiderivative(-s0));
}

template <class Ip>
double path_l1(const VectorPath& p, const Ip& ip) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i)
    acc += segment_l1(p.x[i], p.x[i + 1], p.t[i + 1] - p.t[i], ip);
  return acc;
}

// L^p norm for p in [1, inf].  Exact for p = 1, 2 and inf; other exponents
// use high-order Gauss-Legendre per cell (the integrand is smooth except at
// isolated zeros).
template <class Ip>
double path_lp(const VectorPath& p, double pexp, const Ip& ip) {
  if (!(pexp >= 1.0)) throw std::invalid_argument("path_lp: exponent must be >= 1");
  if (std::isinf(pexp)) return path_linf(p, ip);
  if (pexp == 1.0) return path_l1(p, ip);
  if (pexp == 2.0) return path_l2(p, ip);
  static const double gl_x[8] = {0.0198550717512319, 0.1016667612931866,
                                 0.2372337950418355, 0.4082826787521751,
                                 0.5917173212478249, 0.7627662049581645,
                                 0.8983332387068134, 0.9801449282487681};
  static const double gl_w[8] = {0.0506142681451881, 0.1111905172266872,
                                 0.1568533229389436, 0.1813418916891810,
                                 0.1813418916891810, 0.1568533229389436,
                                 0.1111905172266872, 0.0506142681451881};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    const double dt = p.t[i + 1] - p.t[i];
    for (int q = 0; q < 8; ++q) {
      const Eigen::VectorXd v = (1.0 - gl_x[q]) * p.x[i] + gl_x[q] * p.x[i + 1];
      acc += dt * gl_w[q] * std::pow(std::sqrt(std::max(0.0, ip(v, v))), pexp);
    }
  }
  return std::pow(acc, 1.0 / pexp);
}

// L^q norm of the (piecewise-constant) time derivative, q in [1, inf].
template <class Ip>
double path_dot_lq(const VectorPath& p, double q, const Ip& ip) {
  if (!(q >= 1.0)) throw std::invalid_argument("path_dot_lq: exponent must be >= 1");
  double acc = 0.0, best = 0.0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    const double dt = p.t[i + 1] - p.t[i];
    const Eigen::VectorXd d = (p.x[i + 1] - p.x[i]) / dt;
    const double nd = std::sqrt(std::max(0.0, ip(d, d)));
    best = std::max(best, nd);
    if (!std::isinf(q)) acc += dt * std::pow(nd, q);
  }
  if (std::isinf(q)) return best;
  return std::pow(acc, 1.0 / q);
}

// Discrete H1 norm: (||x(0)||^2 + ||x'||_{L2}^2)^{1/2}.
template <class Ip>
double path_h1(const VectorPath& p, const Ip& ip) {
  const double head = ip(p.x.front(), p.x.front());
  const double dot = path_dot_lq(p, 2.0, ip);
  return std::sqrt(std::max(0.0, head) + dot * dot);
}

// Exact integral of t -> <x(t), y> (trapezoid rule is exact for linear
// integrands).
template <class Ip>
double path_integral_against(const VectorPath& p, const Eigen::VectorXd& y,
                             const Ip& ip) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i)
    acc += 0.5 * (p.t[i + 1] - p.t[i]) * (ip(p.x[i], y) + ip(p.x[i + 1], y));
  return acc;
}

// ---------------------------------------------------------------------------
// Piecewise-constant cell data (multipliers)
// ---------------------------------------------------------------------------

struct CellPath {
  std::vector<double> t;             // grid of size ncells + 1
  std::vector<Eigen::VectorXd> v;    // one value per cell
};

inline void validate_cellpath(const CellPath& p, const char* what = "cellpath") {
  if (p.t.size() < 2 || p.v.size() + 1 != p.t.size())
    throw std::invalid_argument(std::string(what) + ": cell/grid count mismatch");
  for (std::size_t i = 1; i < p.t.size(); ++i)
    if (!(p.t[i] > p.t[i - 1]))
      throw std::invalid_argument(std::string(what) + ": grid not strictly increasing");
}

inline Eigen::VectorXd eval_cellpath(const CellPath& p, double time) {
  return p.v[cell_index(p.t, time)];
}

template <class Ip>
double cellpath_l2(const CellPath& p, const Ip& ip) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.v.size(); ++i)
    acc += (p.t[i + 1] - p.t[i]) * std::max(0.0, ip(p.v[i], p.v[i]));
  return std::sqrt(acc);
}

inline CellPath cell_diff_on_union(const CellPath& a, const CellPath& b) {
  const std::vector<double> times = union_times(a.t, b.t);
  CellPath out;
  out.t = times;
  out.v.reserve(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double mid = 0.5 * (times[i] + times[i + 1]);
    out.v.push_back(eval_cellpath(a, mid) - eval_cellpath(b, mid));
  }
  return out;
}

// Distances between two piecewise-linear paths, computed exactly on the
// union grid.
struct PathDistance {
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
};

template <class Ip>
PathDistance compare_paths(const VectorPath& a, const VectorPath& b, const Ip& ip) {
  const VectorPath d = diff_on_union(a, b);
  PathDistance out;
  out.linf = path_linf(d, ip);
  out.l2 = path_l2(d, ip);
  out.h1 = path_h1(d, ip);
  return out;
}

}  // namespace plastlab

#endif  // PLASTLAB_PATH_HPP

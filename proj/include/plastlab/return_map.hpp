// SPDX-License-Identifier: MIT
//
// Pointwise projection onto the admissible set {|dev sigma + dev chi| <= r}
// in the compliance metric <(s, x), (t, y)> = s : C^{-1} t + x : H^{-1} y.
//
// The stationarity system of the projection of a trial pair Y is
//   sigma = Y.sigma - gamma * C z,   chi = Y.chi - gamma * H z,
//   z = dev sigma + dev chi,         0 <= gamma  perp  |z| - r <= 0,
// which for isotropic laws collapses to a radial rescaling of the combined
// deviator with a closed-form gamma.  General laws fall back to a scalar
// bisection in gamma; |z(gamma)| is strictly decreasing.

#ifndef PLASTLAB_RETURN_MAP_HPP
#define PLASTLAB_RETURN_MAP_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "material.hpp"
#include "sym_tensor.hpp"

namespace plastlab {

struct ReturnResult {
  GeneralizedStress state;
  double gamma = 0.0;  // projection multiplier (>= 0)
};

inline ReturnResult project_pointwise(const MaterialLaw& law,
                                      const GeneralizedStress& trial,
                                      double tol = 1e-14) {
  const double r = law.yield_radius;
  const SymTensor z0 = dd(trial);
  const double n0 = frobenius_norm(z0);
  if (n0 <= r) return {trial, 0.0};

  if (law.isotropic) {
    const double denom = 2.0 * law.mu + law.k1;
    const double gamma = (n0 - r) / (r * denom);
    const SymTensor n = z0 * (1.0 / n0);
    ReturnResult res;
    res.gamma = gamma;
    res.state.sigma = trial.sigma - n * (2.0 * law.mu * gamma * r);
    res.state.chi = trial.chi - n * (law.k1 * gamma * r);
    return res;
  }

  // General law: |z(gamma)| with (I + gamma P (C + H)) z = z0 is strictly
  // decreasing from |z0| to 0; bracket and bisect.
  const int c = sym_components(law.dim);
  const Eigen::MatrixXd pd = deviator_matrix(law.dim);
  const Eigen::MatrixXd k = pd * (law.c_fwd + law.h_fwd);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(c, c);
  auto z_of = [&](double gamma) {
    return SymTensor(law.dim,
                     (id + gamma * k).partialPivLu().solve(z0.packed()));
  };
  auto excess = [&](double gamma) { return frobenius_norm(z_of(gamma)) - r; };

  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200)
      throw std::runtime_error("project_pointwise: failed to bracket the multiplier");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double gamma = 0.5 * (lo + hi);
  SymTensor z = z_of(gamma);
  // Snap to the surface direction so complementarity holds to tolerance.
  const double nz = frobenius_norm(z);
  if (nz > 0.0 && std::abs(nz - r) > tol * r) z = z * (r / nz);
  ReturnResult res;
  res.gamma = gamma;
  res.state.sigma = trial.sigma - law.apply_c(z) * gamma;
  res.state.chi = trial.chi - law.apply_h(z) * gamma;
  return res;
}

// Worst stationarity/complementarity residual of a projection result; used
// by invariants and the solver's certificates.
inline double return_kkt_residual(const MaterialLaw& law,
                                  const GeneralizedStress& trial,
                                  const ReturnResult& res) {
  const SymTensor z = dd(res.state);
  const SymTensor rs = law.apply_c_inv(res.state.sigma - trial.sigma) + z * res.gamma;
  const SymTensor rx = law.apply_h_inv(res.state.chi - trial.chi) + z * res.gamma;
  const double phi = yield_phi(res.state, law.yield_radius);
  double worst = std::max(frobenius_norm(rs), frobenius_norm(rx));
  worst = std::max(worst, std::max(0.0, phi));           // feasibility
  worst = std::max(worst, std::max(0.0, -res.gamma));    // dual feasibility
  worst = std::max(worst, std::abs(res.gamma * phi));    // complementarity
  return worst;
}

}  // namespace plastlab

#endif  // PLASTLAB_RETURN_MAP_HPP

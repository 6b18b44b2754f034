// SPDX-License-Identifier: MIT
//
// Material data: inverse elasticity C^{-1} and inverse hardening H^{-1} as
// linear maps on packed symmetric tensors, plus the yield radius of the
// admissible set {|dev sigma + dev chi| <= radius}.
//
// A map M on symmetric tensors is represented by the matrix acting on packed
// components.  M is symmetric positive definite for the Frobenius pairing
// exactly when W*M is a symmetric positive definite matrix, where W is the
// diagonal of Frobenius weights.

#ifndef PLASTLAB_MATERIAL_HPP
#define PLASTLAB_MATERIAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "sym_tensor.hpp"

namespace plastlab {

struct MaterialLaw {
  int dim = 0;
  double yield_radius = 0.0;
  Eigen::MatrixXd c_inv;  // inverse elasticity, packed-component matrix
  Eigen::MatrixXd h_inv;  // inverse hardening, packed-component matrix
  Eigen::MatrixXd c_fwd;  // elasticity (inverse of c_inv), cached
  Eigen::MatrixXd h_fwd;  // hardening (inverse of h_inv), cached

  // Set for the isotropic catalog entry; enables closed-form projections.
  bool isotropic = false;
  double mu = 0.0, lam = 0.0, k1 = 0.0;

  SymTensor apply_c_inv(const SymTensor& s) const { return apply(c_inv, s); }
  SymTensor apply_h_inv(const SymTensor& s) const { return apply(h_inv, s); }
  SymTensor apply_c(const SymTensor& s) const { return apply(c_fwd, s); }
  SymTensor apply_h(const SymTensor& s) const { return apply(h_fwd, s); }

  SymTensor apply(const Eigen::MatrixXd& m, const SymTensor& s) const {
    if (s.dim() != dim)
      throw std::invalid_argument("MaterialLaw::apply: tensor dimension mismatch");
    return SymTensor(dim, m * s.packed());
  }
};

namespace detail {

// Checks that W*M is symmetric positive definite; `what` names the operator
// in error messages.
inline void require_spd_for_frobenius(const Eigen::MatrixXd& m, int d,
                                      const char* what) {
  const int c = sym_components(d);
  if (m.rows() != c || m.cols() != c)
    throw std::invalid_argument(std::string(what) + ": wrong packed-matrix size");
  const Eigen::MatrixXd wm = frobenius_weights(d).asDiagonal() * m;
  const double scale = wm.cwiseAbs().maxCoeff();
  if ((wm - wm.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
    throw std::invalid_argument(std::string(what) +
                                ": not symmetric for the Frobenius pairing");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (wm + wm.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument(std::string(what) + ": not positive definite");
}

}  // namespace detail

// Isotropic law:
//   C^{-1} sigma = sigma/(2 mu) - lam/(2 mu (2 mu + d lam)) tr(sigma) I
//   H^{-1} chi   = chi / k1
// with uniaxial yield stress sigma0; the deviator-ball radius is
// sqrt(2/3) * sigma0.  Requires mu > 0, d*lam + 2*mu > 0, k1 > 0, sigma0 > 0.
inline MaterialLaw isotropic_law(double mu, double lam, double k1, double sigma0,
                                 int dim = 3) {
  if (!(mu > 0.0))
    throw std::invalid_argument("isotropic_law: mu must be positive");
  if (!(dim * lam + 2.0 * mu > 0.0))
    throw std::invalid_argument("isotropic_law: need d*lam + 2*mu > 0");
  if (!(k1 > 0.0))
    throw std::invalid_argument("isotropic_law: k1 must be positive");
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("isotropic_law: sigma0 must be positive");

  MaterialLaw law;
  law.dim = dim;
  law.isotropic = true;
  law.mu = mu;
  law.lam = lam;
  law.k1 = k1;
  law.yield_radius = std::sqrt(2.0 / 3.0) * sigma0;

  const int c = sym_components(dim);
  const Eigen::VectorXd one_d = identity_components(dim);
  law.c_inv = Eigen::MatrixXd::Identity(c, c) / (2.0 * mu) -
              (lam / (2.0 * mu * (2.0 * mu + dim * lam))) * one_d * one_d.transpose();
  law.c_fwd = 2.0 * mu * Eigen::MatrixXd::Identity(c, c) +
              lam * one_d * one_d.transpose();
  law.h_inv = Eigen::MatrixXd::Identity(c, c) / k1;
  law.h_fwd = k1 * Eigen::MatrixXd::Identity(c, c);

  detail::require_spd_for_frobenius(law.c_inv, dim, "isotropic_law (c_inv)");
  detail::require_spd_for_frobenius(law.h_inv, dim, "isotropic_law (h_inv)");
  return law;
}

// General law from packed-component compliance matrices; both must be
// symmetric positive definite for the Frobenius pairing.
inline MaterialLaw general_law(int dim, Eigen::MatrixXd c_inv,
                               Eigen::MatrixXd h_inv, double yield_radius) {
  if (!(yield_radius > 0.0))
    throw std::invalid_argument("general_law: yield radius must be positive");
  detail::require_spd_for_frobenius(c_inv, dim, "general_law (c_inv)");
  detail::require_spd_for_frobenius(h_inv, dim, "general_law (h_inv)");
  MaterialLaw law;
  law.dim = dim;
  law.yield_radius = yield_radius;
  law.c_inv = std::move(c_inv);
  law.h_inv = std::move(h_inv);
  law.c_fwd = law.c_inv.inverse();
  law.h_fwd = law.h_inv.inverse();
  return law;
}

}  // namespace plastlab

#endif  // PLASTLAB_MATERIAL_HPP

// SPDX-License-Identifier: MIT
//
// Desk-scale Galerkin surrogate of a quasistatic elastoplastic body:
// a finite set of weighted material points, a strain operator with trivial
// kernel mapping displacement coordinates to pointwise symmetric tensors,
// and a boundary-control operator mapping traction amplitudes to load
// functionals.
//
// Field layout: a generalized stress field flattens to a vector holding the
// packed sigma components of all points first, then the packed chi
// components, point by point.

#ifndef PLASTLAB_MODEL_HPP
#define PLASTLAB_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "material.hpp"
#include "sym_tensor.hpp"

namespace plastlab {

struct DiscreteModel {
  std::string name;
  MaterialLaw law;
  Eigen::VectorXd weights;          // quadrature weight per material point
  Eigen::MatrixXd strain;           // (points * ncomp) x ndofs
  Eigen::MatrixXd control;          // ndofs x ncontrols, load = control * g
  Eigen::VectorXd control_weights;  // lumped boundary weights (U inner product)

  // Derived data, filled by finalize().
  Eigen::VectorXd sigma_metric;     // diagonal of D = weights (x) frobenius weights
  Eigen::MatrixXd gram_V;           // strain^T D strain, the V-norm Gram matrix
  Eigen::LLT<Eigen::MatrixXd> gram_V_llt;
  Eigen::MatrixXd metric_A;         // flattened-field A-metric (dense block diagonal)
  double strain_min_singular = 0.0;

  int dim() const { return law.dim; }
  int ncomp() const { return sym_components(law.dim); }
  int points() const { return static_cast<int>(weights.size()); }
  int ndofs() const { return static_cast<int>(strain.cols()); }
  int ncontrols() const { return static_cast<int>(control.cols()); }
  int field_size() const { return 2 * points() * ncomp(); }

  // Validates shapes, checks the strain operator has trivial kernel, and
  // builds the cached metrics and factorizations.
  void finalize() {
    const int c = ncomp();
    const int p = points();
    if (p < 1) throw std::invalid_argument("DiscreteModel: needs at least one point");
    if (weights.minCoeff() <= 0.0)
      throw std::invalid_argument("DiscreteModel: quadrature weights must be positive");
    if (strain.rows() != p * c)
      throw std::invalid_argument("DiscreteModel: strain row count mismatch");
    if (strain.cols() < 1)
      throw std::invalid_argument("DiscreteModel: needs at least one displacement dof");
    if (control.rows() != strain.cols())
      throw std::invalid_argument("DiscreteModel: control operator row count mismatch");
    if (control_weights.size() != control.cols() || control.cols() < 1)
      throw std::invalid_argument("DiscreteModel: control weight count mismatch");
    if (control_weights.minCoeff() <= 0.0)
      throw std::invalid_argument("DiscreteModel: control weights must be positive");

    const Eigen::VectorXd fw = frobenius_weights(law.dim);
    sigma_metric.resize(p * c);
    for (int q = 0; q < p; ++q) sigma_metric.segment(q * c, c) = weights(q) * fw;

    gram_V = strain.transpose() * sigma_metric.asDiagonal() * strain;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma_metric.cwiseSqrt().asDiagonal() *
                                          strain);
    strain_min_singular = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (strain_min_singular <= 1e-12 * smax)
      throw std::invalid_argument(
          "DiscreteModel: strain operator has a nontrivial kernel");
    gram_V_llt.compute(gram_V);

    metric_A = Eigen::MatrixXd::Zero(field_size(), field_size());
    const Eigen::MatrixXd wc = fw.asDiagonal() * law.c_inv;
    const Eigen::MatrixXd wh = fw.asDiagonal() * law.h_inv;
    for (int q = 0; q < p; ++q) {
      metric_A.block(q * c, q * c, c, c) = weights(q) * wc;
      const int off = p * c;
      metric_A.block(off + q * c, off + q * c, c, c) = weights(q) * wh;
    }
  }
};

// One generalized stress per material point.
struct GeneralizedStressField {
  std::vector<GeneralizedStress> pts;

  static GeneralizedStressField zero(const DiscreteModel& m) {
    GeneralizedStressField f;
    f.pts.assign(m.points(), GeneralizedStress(m.dim()));
    return f;
  }

  int size() const { return static_cast<int>(pts.size()); }
  GeneralizedStress& operator[](int i) { return pts[i]; }
  const GeneralizedStress& operator[](int i) const { return pts[i]; }

  GeneralizedStressField operator+(const GeneralizedStressField& o) const {
    check(o);
    GeneralizedStressField r = *this;
    for (int i = 0; i < size(); ++i) r.pts[i] = r.pts[i] + o.pts[i];
    return r;
  }
  GeneralizedStressField operator-(const GeneralizedStressField& o) const {
    check(o);
    GeneralizedStressField r = *this;
    for (int i = 0; i < size(); ++i) r.pts[i] = r.pts[i] - o.pts[i];
    return r;
  }
  GeneralizedStressField operator*(double a) const {
    GeneralizedStressField r = *this;
    for (auto& s : r.pts) s = s * a;
    return r;
  }

  Eigen::VectorXd flatten() const {
    if (pts.empty()) return {};
    const int d = pts.front().dim();
    const int c = sym_components(d);
    const int p = size();
    Eigen::VectorXd v(2 * p * c);
    for (int i = 0; i < p; ++i) {
      v.segment(i * c, c) = pts[i].sigma.packed();
      v.segment(p * c + i * c, c) = pts[i].chi.packed();
    }
    return v;
  }

  static GeneralizedStressField unflatten(const DiscreteModel& m,
                                          const Eigen::VectorXd& v) {
    if (v.size() != m.field_size())
      throw std::invalid_argument("GeneralizedStressField: flat size mismatch");
    const int c = m.ncomp();
    const int p = m.points();
    GeneralizedStressField f;
    f.pts.reserve(p);
    for (int i = 0; i < p; ++i)
      f.pts.emplace_back(SymTensor(m.dim(), v.segment(i * c, c)),
                         SymTensor(m.dim(), v.segment(p * c + i * c, c)));
    return f;
  }

 private:
  void check(const GeneralizedStressField& o) const {
    if (o.size() != size())
      throw std::invalid_argument("GeneralizedStressField: size mismatch");
  }
};

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

inline void require_field(const DiscreteModel& m, const GeneralizedStressField& f,
                          const char* what) {
  if (f.size() != m.points())
    throw std::invalid_argument(std::string(what) + ": field/point count mismatch");
}

// Pointwise compliance map A Sigma = (C^{-1} sigma, H^{-1} chi).
inline GeneralizedStressField apply_A(const DiscreteModel& m,
                                      const GeneralizedStressField& f) {
  require_field(m, f, "apply_A");
  GeneralizedStressField r = f;
  for (auto& s : r.pts) {
    s.sigma = m.law.apply_c_inv(s.sigma);
    s.chi = m.law.apply_h_inv(s.chi);
  }
  return r;
}

// Energy inner product <A a, b> = sum_p w_p (b.sigma : C^{-1} a.sigma +
// b.chi : H^{-1} a.chi).
inline double inner_A(const DiscreteModel& m, const GeneralizedStressField& a,
                      const GeneralizedStressField& b) {
  require_field(m, a, "inner_A");
  require_field(m, b, "inner_A");
  double acc = 0.0;
  for (int p = 0; p < m.points(); ++p)
    acc += m.weights(p) * (frobenius(b[p].sigma, m.law.apply_c_inv(a[p].sigma)) +
                           frobenius(b[p].chi, m.law.apply_h_inv(a[p].chi)));
  return acc;
}

inline double norm_A(const DiscreteModel& m, const GeneralizedStressField& a) {
  return std::sqrt(inner_A(m, a, a));
}

// Plain weighted inner product on stress fields.
inline double inner_S(const DiscreteModel& m, const GeneralizedStressField& a,
                      const GeneralizedStressField& b) {
  require_field(m, a, "inner_S");
  require_field(m, b, "inner_S");
  double acc = 0.0;
  for (int p = 0; p < m.points(); ++p) acc += m.weights(p) * frobenius(a[p], b[p]);
  return acc;
}

// Pointwise strains of a displacement vector.
inline std::vector<SymTensor> strain_of(const DiscreteModel& m,
                                        const Eigen::VectorXd& u) {
  if (u.size() != m.ndofs())
    throw std::invalid_argument("strain_of: displacement size mismatch");
  const Eigen::VectorXd flat = m.strain * u;
  std::vector<SymTensor> out;
  out.reserve(m.points());
  const int c = m.ncomp();
  for (int p = 0; p < m.points(); ++p)
    out.emplace_back(m.dim(), flat.segment(p * c, c));
  return out;
}

// Equilibrium operator <B Sigma, v> = -sum_p w_p sigma_p : strain_p(v).
inline Eigen::VectorXd apply_B(const DiscreteModel& m,
                               const GeneralizedStressField& f) {
  require_field(m, f, "apply_B");
  const int c = m.ncomp();
  Eigen::VectorXd sigma_flat(m.points() * c);
  for (int p = 0; p < m.points(); ++p)
    sigma_flat.segment(p * c, c) = f[p].sigma.packed();
  return -m.strain.transpose() * (m.sigma_metric.asDiagonal() * sigma_flat);
}

// Adjoint: B* v = (-strain(v), 0).
inline GeneralizedStressField apply_B_star(const DiscreteModel& m,
                                           const Eigen::VectorXd& v) {
  GeneralizedStressField f = GeneralizedStressField::zero(m);
  auto eps = strain_of(m, v);
  for (int p = 0; p < m.points(); ++p) f[p].sigma = eps[p] * (-1.0);
  return f;
}

// Minimum-norm stress lift: the unique sigma-field minimizing the weighted
// Frobenius norm subject to B (sigma, 0) = ell.  Reduces to
// sigma_flat = -strain * gram_V^{-1} ell via the cached factorization.
inline GeneralizedStressField sigma_of_ell(const DiscreteModel& m,
                                           const Eigen::VectorXd& ell) {
  if (ell.size() != m.ndofs())
    throw std::invalid_argument("sigma_of_ell: load size mismatch");
  const Eigen::VectorXd y = m.gram_V_llt.solve(ell);
  const Eigen::VectorXd sigma_flat = -m.strain * y;
  GeneralizedStressField f = GeneralizedStressField::zero(m);
  const int c = m.ncomp();
  for (int p = 0; p < m.points(); ++p)
    f[p].sigma = SymTensor(m.dim(), sigma_flat.segment(p * c, c));
  return f;
}

// Equilibrated pair (sigma_ell, -sigma_ell); feasible for the yield set at
// any load because its combined deviator vanishes.
inline GeneralizedStressField bsigma_of_ell(const DiscreteModel& m,
                                            const Eigen::VectorXd& ell) {
  GeneralizedStressField f = sigma_of_ell(m, ell);
  for (auto& s : f.pts) s.chi = s.sigma * (-1.0);
  return f;
}

// Displacement norm induced by the weighted strains (discrete Korn norm).
inline double norm_V(const DiscreteModel& m, const Eigen::VectorXd& u) {
  if (u.size() != m.ndofs())
    throw std::invalid_argument("norm_V: displacement size mismatch");
  return std::sqrt(u.dot(m.gram_V * u));
}

// Dual norm of a load functional with respect to the V-norm.
inline double dual_norm_load(const DiscreteModel& m, const Eigen::VectorXd& ell) {
  if (ell.size() != m.ndofs())
    throw std::invalid_argument("dual_norm_load: load size mismatch");
  return std::sqrt(ell.dot(m.gram_V_llt.solve(ell)));
}

// Lumped boundary inner product on control amplitudes.
inline double inner_U(const DiscreteModel& m, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
  if (a.size() != m.ncontrols() || b.size() != m.ncontrols())
    throw std::invalid_argument("inner_U: control size mismatch");
  return (a.array() * m.control_weights.array() * b.array()).sum();
}

inline double norm_U(const DiscreteModel& m, const Eigen::VectorXd& g) {
  return std::sqrt(inner_U(m, g, g));
}

// ---------------------------------------------------------------------------
// Builtin models
// ---------------------------------------------------------------------------

struct ModelParams {
  double mu = 6.0;
  double lam = 4.0;
  double k1 = 2.0;
  double sigma0 = 1.0;
  int mesh = 4;  // patch2d subdivisions per side (1..4)
};

// Single material point under a fixed uniaxial strain direction, one
// displacement coordinate, one control coordinate.  The strain direction is
// the unit tensor e = diag(1, 0, 0); the control enters with weight one and
// the standard sign flip, so equilibrium reads sigma : e = g.
inline DiscreteModel uniaxial_model(const ModelParams& par = {}) {
  DiscreteModel m;
  m.name = "uniaxial";
  m.law = isotropic_law(par.mu, par.lam, par.k1, par.sigma0, 3);
  m.weights = Eigen::VectorXd::Ones(1);
  m.strain = Eigen::MatrixXd::Zero(sym_components(3), 1);
  m.strain(0, 0) = 1.0;  // e = diag(1, 0, 0)
  m.control = Eigen::MatrixXd::Constant(1, 1, -1.0);
  m.control_weights = Eigen::VectorXd::Ones(1);
  m.finalize();
  return m;
}

// Plane elastoplastic patch: unit square, mesh x mesh cells split into two
// linear triangles each, one-point quadrature at centroids, clamped along
// x = 0, lumped traction controls (two components per node) along x = 1.
inline DiscreteModel patch2d_model(const ModelParams& par = {}) {
  const int k = par.mesh;
  if (k < 1 || k > 4)
    throw std::invalid_argument("patch2d_model: mesh must be in 1..4 (at most 32 elements)");

  DiscreteModel m;
  m.name = "patch2d";
  m.law = isotropic_law(par.mu, par.lam, par.k1, par.sigma0, 2);

  const int nn = (k + 1) * (k + 1);
  const double h = 1.0 / k;
  auto node_id = [&](int i, int j) { return j * (k + 1) + i; };

  // Displacement dofs: two per node, skipping the clamped edge x = 0.
  std::vector<int> dof_of(2 * nn, -1);
  int n = 0;
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= k; ++i) {
      if (i == 0) continue;
      dof_of[2 * node_id(i, j)] = n++;
      dof_of[2 * node_id(i, j) + 1] = n++;
    }

  struct Tri { int v[3]; };
  std::vector<Tri> tris;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      const int v00 = node_id(i, j), v10 = node_id(i + 1, j);
      const int v01 = node_id(i, j + 1), v11 = node_id(i + 1, j + 1);
      tris.push_back({{v00, v10, v11}});
      tris.push_back({{v00, v11, v01}});
    }

  const int np = static_cast<int>(tris.size());
  m.weights.resize(np);
  m.strain = Eigen::MatrixXd::Zero(np * 3, n);

  auto coord = [&](int v) {
    return Eigen::Vector2d((v % (k + 1)) * h, (v / (k + 1)) * h);
  };

  for (int p = 0; p < np; ++p) {
    const Eigen::Vector2d x0 = coord(tris[p].v[0]);
    const Eigen::Vector2d x1 = coord(tris[p].v[1]);
    const Eigen::Vector2d x2 = coord(tris[p].v[2]);
    const double det = (x1.x() - x0.x()) * (x2.y() - x0.y()) -
                       (x2.x() - x0.x()) * (x1.y() - x0.y());
    const double area = 0.5 * det;
    m.weights(p) = area;
    // Gradients of the linear shape functions.
    const double gx[3] = {(x1.y() - x2.y()) / det, (x2.y() - x0.y()) / det,
                          (x0.y() - x1.y()) / det};
    const double gy[3] = {(x2.x() - x1.x()) / det, (x0.x() - x2.x()) / det,
                          (x1.x() - x0.x()) / det};
    for (int a = 0; a < 3; ++a) {
      const int dx = dof_of[2 * tris[p].v[a]];
      const int dy = dof_of[2 * tris[p].v[a] + 1];
      // Packed components (eps_xx, eps_yy, eps_xy).
      if (dx >= 0) {
        m.strain(3 * p + 0, dx) += gx[a];
        m.strain(3 * p + 2, dx) += 0.5 * gy[a];
      }
      if (dy >= 0) {
        m.strain(3 * p + 1, dy) += gy[a];
        m.strain(3 * p + 2, dy) += 0.5 * gx[a];
      }
    }
  }

  // Lumped traction controls on the edge x = 1 (nodes ordered by height).
  const int mb = 2 * (k + 1);
  m.control = Eigen::MatrixXd::Zero(n, mb);
  m.control_weights.resize(mb);
  for (int j = 0; j <= k; ++j) {
    const double wb = (j == 0 || j == k) ? 0.5 * h : h;
    for (int comp = 0; comp < 2; ++comp) {
      const int col = 2 * j + comp;
      const int dof = dof_of[2 * node_id(k, j) + comp];
      m.control_weights(col) = wb;
      m.control(dof, col) = -wb;
    }
  }

  m.finalize();
  return m;
}

struct CatalogEntry {
  std::string name;
  std::string summary;
};

inline std::vector<CatalogEntry> model_catalog() {
  return {
      {"uniaxial",
       "single material point, unit uniaxial strain direction, one displacement"
       " and one control coordinate; parameters mu, lambda, k1, sigma0"},
      {"patch2d",
       "plane unit-square patch, mesh x mesh cells split into 2 linear"
       " triangles (at most 32), clamped at x=0, lumped traction controls at"
       " x=1; parameters mu, lambda, k1, sigma0, mesh"},
  };
}

inline DiscreteModel builtin_model(const std::string& name,
                                   const ModelParams& par = {}) {
  if (name == "uniaxial") return uniaxial_model(par);
  if (name == "patch2d") return patch2d_model(par);
  std::string known;
  for (const auto& e : model_catalog()) known += " " + e.name;
  throw std::invalid_argument("builtin_model: unknown name '" + name +
                              "'; known:" + known);
}

}  // namespace plastlab

#endif  // PLASTLAB_MODEL_HPP

// SPDX-License-Identifier: MIT
//
// Packed symmetric d x d tensors (d >= 2 at runtime), generalized
// stress/backstress pairs, the deviator, and the associated yield function.
//
// Storage convention: the d diagonal entries first, then the strict upper
// triangle (i < j) in row-major order.  The Frobenius inner product weights
// off-diagonal components by 2, so packed vectors carry each independent
// component exactly once.

#ifndef PLASTLAB_SYM_TENSOR_HPP
#define PLASTLAB_SYM_TENSOR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace plastlab {

// Number of independent components of a symmetric d x d tensor.
inline int sym_components(int d) {
  if (d < 2) throw std::invalid_argument("sym_components: dimension must be >= 2");
  return d * (d + 1) / 2;
}

// Frobenius weights for packed components: 1 on the diagonal block, 2 on the
// off-diagonal block.
inline Eigen::VectorXd frobenius_weights(int d) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(sym_components(d), 2.0);
  w.head(d).setOnes();
  return w;
}

// Indicator of the diagonal components (the packed representation of the
// identity tensor).
inline Eigen::VectorXd identity_components(int d) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(sym_components(d));
  e.head(d).setOnes();
  return e;
}

// Packed-component matrix of the deviatoric projector s -> s - tr(s)/d * I.
inline Eigen::MatrixXd deviator_matrix(int d) {
  const int c = sym_components(d);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(c, c);
  p.topLeftCorner(d, d).array() -= 1.0 / static_cast<double>(d);
  return p;
}

class SymTensor {
 public:
  SymTensor() = default;

  explicit SymTensor(int d) : d_(d), c_(Eigen::VectorXd::Zero(sym_components(d))) {}

  SymTensor(int d, Eigen::VectorXd components) : d_(d), c_(std::move(components)) {
    if (c_.size() != sym_components(d))
      throw std::invalid_argument("SymTensor: component count does not match dimension");
  }

  static SymTensor identity(int d) { return SymTensor(d, identity_components(d)); }

  static SymTensor from_matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
      throw std::invalid_argument("SymTensor::from_matrix: need a square matrix, d >= 2");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("SymTensor::from_matrix: matrix is not symmetric");
    const int d = static_cast<int>(m.rows());
    SymTensor s(d);
    for (int i = 0; i < d; ++i) s.c_(i) = m(i, i);
    int k = d;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) s.c_(k++) = 0.5 * (m(i, j) + m(j, i));
    return s;
  }

  Eigen::MatrixXd to_matrix() const {
    Eigen::MatrixXd m(d_, d_);
    for (int i = 0; i < d_; ++i) m(i, i) = c_(i);
    int k = d_;
    for (int i = 0; i < d_; ++i)
      for (int j = i + 1; j < d_; ++j) {
        m(i, j) = c_(k);
        m(j, i) = c_(k);
        ++k;
      }
    return m;
  }

  int dim() const { return d_; }
  int components() const { return static_cast<int>(c_.size()); }
  const Eigen::VectorXd& packed() const { return c_; }
  Eigen::VectorXd& packed() { return c_; }

  double trace() const { return c_.head(d_).sum(); }

  SymTensor operator+(const SymTensor& o) const { return SymTensor(d_, c_ + o.c_); }
  SymTensor operator-(const SymTensor& o) const { return SymTensor(d_, c_ - o.c_); }
  SymTensor operator*(double a) const { return SymTensor(d_, a * c_); }
  SymTensor& operator+=(const SymTensor& o) { c_ += o.c_; return *this; }
  SymTensor& operator-=(const SymTensor& o) { c_ -= o.c_; return *this; }

 private:
  int d_ = 0;
  Eigen::VectorXd c_;
};

inline SymTensor operator*(double a, const SymTensor& s) { return s * a; }

// Frobenius inner product a : b (off-diagonal components count twice).
inline double frobenius(const SymTensor& a, const SymTensor& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("frobenius: dimension mismatch");
  const Eigen::VectorXd w = frobenius_weights(a.dim());
  return (a.packed().array() * w.array() * b.packed().array()).sum();
}

inline double frobenius_norm(const SymTensor& a) {
  return std::sqrt(frobenius(a, a));
}

// Trace-free part: dev(s) = s - tr(s)/d * I.
inline SymTensor dev(const SymTensor& s) {
  SymTensor out = s;
  out.packed().head(s.dim()).array() -= s.trace() / static_cast<double>(s.dim());
  return out;
}

// Stress/backstress pair (sigma, chi).
struct GeneralizedStress {
  SymTensor sigma;
  SymTensor chi;

  GeneralizedStress() = default;
  explicit GeneralizedStress(int d) : sigma(d), chi(d) {}
  GeneralizedStress(SymTensor s, SymTensor x) : sigma(std::move(s)), chi(std::move(x)) {
    if (sigma.dim() != chi.dim())
      throw std::invalid_argument("GeneralizedStress: mixed dimensions");
  }

  int dim() const { return sigma.dim(); }

  GeneralizedStress operator+(const GeneralizedStress& o) const {
    return {sigma + o.sigma, chi + o.chi};
  }
  GeneralizedStress operator-(const GeneralizedStress& o) const {
    return {sigma - o.sigma, chi - o.chi};
  }
  GeneralizedStress operator*(double a) const { return {sigma * a, chi * a}; }
};

inline GeneralizedStress operator*(double a, const GeneralizedStress& s) { return s * a; }

// Pairwise Frobenius inner product on stress/backstress pairs.
inline double frobenius(const GeneralizedStress& a, const GeneralizedStress& b) {
  return frobenius(a.sigma, b.sigma) + frobenius(a.chi, b.chi);
}

inline double frobenius_norm(const GeneralizedStress& a) {
  return std::sqrt(frobenius(a, a));
}

// Combined deviator dd(Sigma) = dev(sigma) + dev(chi).
inline SymTensor dd(const GeneralizedStress& s) { return dev(s.sigma) + dev(s.chi); }

// Adjoint of the combined deviator: tau -> (dev tau, dev tau).
inline GeneralizedStress dd_adjoint(const SymTensor& tau) {
  SymTensor t = dev(tau);
  return {t, t};
}

// Yield function phi(Sigma) = (|dd(Sigma)|^2 - radius^2) / 2; the admissible
// set is {phi <= 0}.
inline double yield_phi(const GeneralizedStress& s, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("yield_phi: radius must be positive");
  const SymTensor z = dd(s);
  return 0.5 * (frobenius(z, z) - radius * radius);
}

}  // namespace plastlab

#endif  // PLASTLAB_SYM_TENSOR_HPP

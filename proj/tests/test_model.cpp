// SPDX-License-Identifier: MIT

#include <catch2/catch_amalgamated.hpp>
#include <plastlab/model.hpp>

#include <random>

using Catch::Approx;
using namespace plastlab;

namespace {

SymTensor random_sym(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd c(sym_components(d));
  for (int i = 0; i < c.size(); ++i) c(i) = gauss(rng);
  return SymTensor(d, c);
}

GeneralizedStressField random_field(const DiscreteModel& m, std::mt19937_64& rng) {
  GeneralizedStressField f = GeneralizedStressField::zero(m);
  for (auto& s : f.pts) s = {random_sym(m.dim(), rng), random_sym(m.dim(), rng)};
  return f;
}

Eigen::VectorXd random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

// Independent minimum-norm lift through an explicit SVD pseudo-inverse in
// the weighted coordinates.
Eigen::VectorXd pinv_lift(const DiscreteModel& m, const Eigen::VectorXd& ell) {
  const Eigen::VectorXd droot = m.sigma_metric.cwiseSqrt();
  const Eigen::MatrixXd bmat =
      -m.strain.transpose() * m.sigma_metric.asDiagonal().toDenseMatrix();
  const Eigen::MatrixXd a = bmat * droot.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd y = svd.solve(ell);
  return droot.cwiseInverse().asDiagonal() * y;
}

}  // namespace

TEST_CASE("isotropic compliance inverts the closed-form stiffness") {
  std::mt19937_64 rng(101);
  for (int d : {2, 3}) {
    MaterialLaw law = isotropic_law(6.0, 4.0, 2.0, 1.0, d);
    // Dense numerical inverse as the reference.
    const Eigen::MatrixXd c_num = law.c_inv.inverse();
    REQUIRE((c_num - law.c_fwd).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = 0; k < 20; ++k) {
      SymTensor eps = random_sym(d, rng);
      SymTensor round = law.apply_c_inv(law.apply_c(eps));
      REQUIRE((round.packed() - eps.packed()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  REQUIRE(isotropic_law(6, 4, 2, 1, 3).yield_radius ==
          Approx(std::sqrt(2.0 / 3.0)).margin(1e-15));
  REQUIRE_THROWS_AS(isotropic_law(0.0, 4, 2, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(isotropic_law(1.0, -1.0, 2, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(isotropic_law(6, 4, 0.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(isotropic_law(6, 4, 2, -2.0), std::invalid_argument);
  // lam may be negative while d*lam + 2*mu stays positive.
  REQUIRE_NOTHROW(isotropic_law(6.0, -1.0, 2.0, 1.0, 3));
}

TEST_CASE("general law rejects non-spd packed matrices") {
  const int c = sym_components(2);
  Eigen::MatrixXd good = Eigen::MatrixXd::Identity(c, c);
  REQUIRE_NOTHROW(general_law(2, good, good, 1.0));
  Eigen::MatrixXd indefinite = good;
  indefinite(0, 0) = -1.0;
  REQUIRE_THROWS_AS(general_law(2, indefinite, good, 1.0), std::invalid_argument);
  Eigen::MatrixXd asym = good;
  asym(0, 1) = 0.3;  // W*asym not symmetric
  REQUIRE_THROWS_AS(general_law(2, asym, good, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(general_law(2, good, good, 0.0), std::invalid_argument);
}

TEST_CASE("builtin catalog and shape validation") {
  DiscreteModel uni = uniaxial_model();
  REQUIRE(uni.points() == 1);
  REQUIRE(uni.ndofs() == 1);
  REQUIRE(uni.ncontrols() == 1);

  DiscreteModel patch = patch2d_model();
  REQUIRE(patch.points() == 32);
  REQUIRE(patch.ndofs() == 40);
  REQUIRE(patch.ncontrols() == 10);
  REQUIRE(patch.weights.sum() == Approx(1.0).margin(1e-12));
  REQUIRE(patch.strain_min_singular > 0.0);

  REQUIRE_THROWS_AS(builtin_model("nope"), std::invalid_argument);
  ModelParams par;
  par.mesh = 5;
  REQUIRE_THROWS_AS(patch2d_model(par), std::invalid_argument);
}

TEST_CASE("patch model reproduces constant strains from linear displacements") {
  const int k = 3;
  ModelParams par;
  par.mesh = k;
  DiscreteModel m = patch2d_model(par);

  // u(x, y) = (a x, b x) vanishes on the clamped edge and has constant strain
  // (a, 0, b/2) on every element.
  const double a = 0.7, b = -0.4;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.ndofs());
  int dof = 0;
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= k; ++i) {
      if (i == 0) continue;
      const double x = static_cast<double>(i) / k;
      u(dof++) = a * x;
      u(dof++) = b * x;
    }
  auto eps = strain_of(m, u);
  for (const auto& e : eps) {
    REQUIRE(e.packed()(0) == Approx(a).margin(1e-12));
    REQUIRE(e.packed()(1) == Approx(0.0).margin(1e-12));
    REQUIRE(e.packed()(2) == Approx(b / 2).margin(1e-12));
  }
}

TEST_CASE("equilibrium operator and its adjoint satisfy the pairing identity") {
  std::mt19937_64 rng(103);
  for (const char* name : {"uniaxial", "patch2d"}) {
    DiscreteModel m = builtin_model(name);
    for (int k = 0; k < 10; ++k) {
      GeneralizedStressField f = random_field(m, rng);
      Eigen::VectorXd v = random_vec(m.ndofs(), rng);
      const double lhs = apply_B(m, f).dot(v);
      const double rhs = inner_S(m, f, apply_B_star(m, v));
      REQUIRE(lhs == Approx(rhs).margin(1e-10 * (1.0 + std::abs(lhs))));
    }
  }
}

TEST_CASE("uniaxial equilibrium reduces to the resolved stress") {
  DiscreteModel m = uniaxial_model();
  GeneralizedStressField f = GeneralizedStressField::zero(m);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  s(0, 0) = 2.5;
  s(1, 1) = -0.3;
  f[0].sigma = SymTensor::from_matrix(s);
  // <B Sigma, v> = -w sigma : e with e = diag(1,0,0).
  REQUIRE(apply_B(m, f)(0) == Approx(-2.5).margin(1e-14));
  // Control acts with the matching sign flip: ell = -g, so B Sigma = ell
  // reads sigma : e = g.
  REQUIRE(m.control(0, 0) == Approx(-1.0));
}

TEST_CASE("energy inner product agrees with the flattened metric") {
  std::mt19937_64 rng(107);
  for (const char* name : {"uniaxial", "patch2d"}) {
    DiscreteModel m = builtin_model(name);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.metric_A);
    REQUIRE(es.eigenvalues().minCoeff() > 0.0);
    for (int k = 0; k < 10; ++k) {
      GeneralizedStressField a = random_field(m, rng);
      GeneralizedStressField b = random_field(m, rng);
      const double direct = inner_A(m, a, b);
      const double flat = a.flatten().dot(m.metric_A * b.flatten());
      REQUIRE(direct == Approx(flat).margin(1e-10 * (1.0 + std::abs(direct))));
      REQUIRE(inner_A(m, a, b) ==
              Approx(inner_A(m, b, a)).margin(1e-10 * (1.0 + std::abs(direct))));
    }
    GeneralizedStressField a = random_field(m, rng);
    REQUIRE(inner_A(m, a, a) > 0.0);
  }
}

TEST_CASE("identity law reduces the energy product to the plain one") {
  DiscreteModel m = uniaxial_model();
  const int c = sym_components(3);
  m.law = general_law(3, Eigen::MatrixXd::Identity(c, c),
                      Eigen::MatrixXd::Identity(c, c), 1.0);
  m.finalize();
  std::mt19937_64 rng(109);
  for (int k = 0; k < 10; ++k) {
    GeneralizedStressField a = random_field(m, rng);
    GeneralizedStressField b = random_field(m, rng);
    REQUIRE(inner_A(m, a, b) == Approx(inner_S(m, a, b)).margin(1e-12));
  }
}

TEST_CASE("minimum-norm stress lift matches the pseudo-inverse oracle") {
  std::mt19937_64 rng(113);
  for (const char* name : {"uniaxial", "patch2d"}) {
    DiscreteModel m = builtin_model(name);
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd ell = random_vec(m.ndofs(), rng);
      GeneralizedStressField f = sigma_of_ell(m, ell);

      // Equilibrium residual.
      REQUIRE((apply_B(m, f) - ell).norm() < 1e-10 * (1.0 + ell.norm()));

      // Against the SVD pseudo-inverse computed independently.
      const Eigen::VectorXd oracle = pinv_lift(m, ell);
      const int c = m.ncomp();
      for (int p = 0; p < m.points(); ++p)
        REQUIRE((f[p].sigma.packed() - oracle.segment(p * c, c))
                    .cwiseAbs()
                    .maxCoeff() < 1e-9 * (1.0 + oracle.cwiseAbs().maxCoeff()));

      // Linearity.
      Eigen::VectorXd ell2 = random_vec(m.ndofs(), rng);
      GeneralizedStressField sum = sigma_of_ell(m, ell + 2.0 * ell2);
      GeneralizedStressField lin = sigma_of_ell(m, ell) + sigma_of_ell(m, ell2) * 2.0;
      for (int p = 0; p < m.points(); ++p)
        REQUIRE(frobenius_norm(sum[p] - lin[p]) < 1e-10 * (1.0 + ell.norm()));
    }

    // The equilibrated pair has vanishing combined deviator, hence sits at
    // the yield-function minimum regardless of the load.
    Eigen::VectorXd ell = random_vec(m.ndofs(), rng);
    GeneralizedStressField pair = bsigma_of_ell(m, ell);
    const double r = m.law.yield_radius;
    REQUIRE((apply_B(m, pair) - ell).norm() < 1e-10 * (1.0 + ell.norm()));
    for (int p = 0; p < m.points(); ++p)
      REQUIRE(yield_phi(pair[p], r) == Approx(-0.5 * r * r).margin(1e-12));
  }
}

TEST_CASE("model and field size validation") {
  DiscreteModel m = uniaxial_model();
  GeneralizedStressField wrong;
  wrong.pts.assign(3, GeneralizedStress(3));
  REQUIRE_THROWS_AS(apply_A(m, wrong), std::invalid_argument);
  REQUIRE_THROWS_AS(apply_B(m, wrong), std::invalid_argument);
  REQUIRE_THROWS_AS(strain_of(m, Eigen::VectorXd::Zero(4)), std::invalid_argument);
  REQUIRE_THROWS_AS(sigma_of_ell(m, Eigen::VectorXd::Zero(2)), std::invalid_argument);

  DiscreteModel bad = uniaxial_model();
  bad.weights(0) = -1.0;
  REQUIRE_THROWS_AS(bad.finalize(), std::invalid_argument);

  // A strain operator with nontrivial kernel must be rejected.
  DiscreteModel degenerate = uniaxial_model();
  degenerate.strain = Eigen::MatrixXd::Zero(sym_components(3), 2);
  degenerate.strain(0, 0) = 1.0;  // second column identically zero
  degenerate.control = Eigen::MatrixXd::Constant(2, 1, -1.0);
  REQUIRE_THROWS_AS(degenerate.finalize(), std::invalid_argument);
}

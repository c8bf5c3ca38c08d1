#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>

#include "tbdde/branch.hpp"
#include "tbdde/errors.hpp"
#include "tbdde/euler.hpp"
#include "tbdde/model.hpp"
#include "tbdde/nf_engine.hpp"
#include "tbdde/tb_continuous.hpp"

namespace tbdde {

/// Coefficients of the reduced planar map at a specific parameter value:
///   x1 -> x1 + x2
///   x2 -> x2 + kappa1 x1 + kappa2 x2 + a x1^2 + b x1 x2.
struct ReducedMapCoefficients {
  double kappa1 = 0.0, kappa2 = 0.0;
  double a = 0.0, b = 0.0;
  double eps = 0.0;
  double nu = std::numeric_limits<double>::quiet_NaN();
};

/// Parameter-independent data of the reduced map: the alpha-linear forms of
/// kappa1, kappa2 plus the quadratic coefficients. The overall scale of
/// (pi_eps, a, b) depends on the normalization convention of the underlying
/// eigenvector quadruple; b/a ratios and branch lines do not.
struct ReducedMapFamily {
  Eigen::Matrix2d pi_eps = Eigen::Matrix2d::Zero();  // (kappa1; kappa2) = pi_eps alpha
  double a = 0.0, b = 0.0;
  double eps = 0.0;
  double nu = std::numeric_limits<double>::quiet_NaN();
  bool ab_degenerate = false;

  double b_over_a() const {
    if (a == 0.0) throw PreconditionError("b/a undefined for a = 0");
    return b / a;
  }
  ReducedMapCoefficients at(const Eigen::Vector2d& alpha) const {
    const Eigen::Vector2d k = pi_eps * alpha;
    return ReducedMapCoefficients{k[0], k[1], a, b, eps, nu};
  }
};

/// Direct evaluation of the coefficient scalings
///   kappa1_eps = (eps^2/nu) kappa1,  kappa2_eps = (eps/nu) kappa2,
///   a_eps = (eps^3/nu) a,            b_eps = (eps^2/nu) b,
/// with nu = 1 - 1/2 psi2 B phi1. Note b_eps/a_eps = b/(eps a) exactly.
inline ReducedMapFamily coefficients_direct_family(const TBCoefficients& c,
                                                   const TBEigendata& e,
                                                   const LinearData& lin, double eps) {
  const double nu = 1.0 - 0.5 * double(e.psi2 * lin.B * e.phi1);
  if (nu == 0.0) throw PreconditionError("normalization 1 - 1/2 psi2 B phi1 vanishes");
  ReducedMapFamily f;
  f.eps = eps;
  f.nu = nu;
  f.pi_eps.row(0) = (eps * eps / nu) * c.Pi.row(0);
  f.pi_eps.row(1) = (eps / nu) * c.Pi.row(1);
  f.a = (eps * eps * eps / nu) * c.a;
  f.b = (eps * eps / nu) * c.b;
  f.ab_degenerate = (c.a * c.b == 0.0);
  return f;
}

inline ReducedMapCoefficients coefficients_direct(const TBCoefficients& c,
                                                  const TBEigendata& e, const LinearData& lin,
                                                  double eps, const Eigen::Vector2d& alpha) {
  return coefficients_direct_family(c, e, lin, eps).at(alpha);
}

/// Independent route through the normal-form engine: assembles the quadratic
/// part of the reduced map from the discrete eigenvector quadruple and the
/// model's second-order tensors, projects onto the resonant complement, and
/// reads the coefficients off the second component. Throws
/// StructureViolation if the projection leaves mass outside the expected
/// monomials x1^2, x1 x2, x1 a_k, x2 a_k.
inline ReducedMapFamily coefficients_via_engine(const DDEModel& model, const TBEigendata& tb,
                                                int m) {
  const int n = model.dim();
  const double eps = 1.0 / m;
  const EulerScheme scheme(model, m, Eigen::Vector2d::Zero());
  const DiscreteEigendata ed = build_discrete_eigendata(scheme, tb);
  const QuadraticData quad = extract_quadratic(model);

  // head/tail blocks of the center basis and the head blocks of its dual
  Eigen::MatrixXd P(n, 2), Pd(n, 2);
  P.col(0) = ed.phi1.head(n);
  P.col(1) = ed.phi2.head(n);
  Pd.col(0) = ed.phi1.tail(n);
  Pd.col(1) = ed.phi2.tail(n);
  Eigen::MatrixXd Psi(2, n);
  Psi.row(0) = ed.psi1.head(n);
  Psi.row(1) = ed.psi2.head(n);

  const MonomialBasis basis = enumerate_basis(2, 2, 2);
  PolyVec f = PolyVec::zero(basis);
  auto add = [&](std::vector<int> exps, const Eigen::Vector2d& v) {
    for (int comp = 0; comp < 2; ++comp) f.at(exps, comp) += v[comp];
  };

  // alpha_k (A_k z + B_k w) with z = P x, w = Pd x
  const Eigen::MatrixXd* Aab[2] = {&quad.A1, &quad.A2};
  const Eigen::MatrixXd* Bab[2] = {&quad.B1, &quad.B2};
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      const Eigen::Vector2d v =
          eps * (Psi * ((*Aab[k]) * P.col(j) + (*Bab[k]) * Pd.col(j)));
      std::vector<int> exps(4, 0);
      exps[j] = 1;
      exps[2 + k] = 1;
      add(exps, v);
    }
  // sum_i E_i z_i w + F_i z_i z + G_i w_i w, expanded over x_j x_k
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i)
        acc += P(i, j) * (quad.E[i] * Pd.col(k)) + P(i, j) * (quad.F[i] * P.col(k)) +
               Pd(i, j) * (quad.G[i] * Pd.col(k));
      const Eigen::Vector2d v = eps * (Psi * acc);
      std::vector<int> exps(4, 0);
      exps[j] += 1;
      exps[k] += 1;
      add(exps, v);
    }

  Eigen::Matrix2d J;
  J << 1, 1, 0, 1;
  const HomologicalOperator op(J, basis);
  const ImageSplit split = split_image(op);
  const PolyVec g = project_resonant(split, f);

  ReducedMapFamily fam;
  fam.eps = eps;
  fam.a = g.get({2, 0, 0, 0}, 1);
  fam.b = g.get({1, 1, 0, 0}, 1);
  fam.pi_eps(0, 0) = g.get({1, 0, 1, 0}, 1);
  fam.pi_eps(0, 1) = g.get({1, 0, 0, 1}, 1);
  fam.pi_eps(1, 0) = g.get({0, 1, 1, 0}, 1);
  fam.pi_eps(1, 1) = g.get({0, 1, 0, 1}, 1);
  fam.ab_degenerate = (fam.a * fam.b == 0.0);

  PolyVec expected = PolyVec::zero(basis);
  expected.at({2, 0, 0, 0}, 1) = fam.a;
  expected.at({1, 1, 0, 0}, 1) = fam.b;
  expected.at({1, 0, 1, 0}, 1) = fam.pi_eps(0, 0);
  expected.at({1, 0, 0, 1}, 1) = fam.pi_eps(0, 1);
  expected.at({0, 1, 1, 0}, 1) = fam.pi_eps(1, 0);
  expected.at({0, 1, 0, 1}, 1) = fam.pi_eps(1, 1);
  if ((g.coeffs - expected.coeffs).lpNorm<Eigen::Infinity>() > 1e-9)
    throw StructureViolation("projection has support outside the resonant monomials");
  return fam;
}

enum class PlanarVariant { Truncated, Transformed };

struct PlanarMapState {
  double x1 = 0.0, x2 = 0.0;
  PlanarVariant variant = PlanarVariant::Truncated;
};

/// One application of the truncated reduced map or of its affine conjugate
///   y1 = a (x1 + kappa1/(2a)),  y2 = a x2,
/// which carries unit quadratic coefficient.
inline PlanarMapState iterate_planar(const ReducedMapCoefficients& c, const PlanarMapState& s) {
  PlanarMapState out = s;
  if (s.variant == PlanarVariant::Truncated) {
    out.x1 = s.x1 + s.x2;
    out.x2 = s.x2 + c.kappa1 * s.x1 + c.kappa2 * s.x2 + c.a * s.x1 * s.x1 +
             c.b * s.x1 * s.x2;
  } else {
    if (c.a == 0.0) throw PreconditionError("transformed variant needs a != 0");
    const double boa = c.b / c.a;
    out.x1 = s.x1 + s.x2;
    out.x2 = s.x2 - 0.25 * c.kappa1 * c.kappa1 +
             (c.kappa2 - 0.5 * boa * c.kappa1) * s.x2 + s.x1 * s.x1 + boa * s.x1 * s.x2;
  }
  if (!std::isfinite(out.x1) || !std::isfinite(out.x2))
    throw OverflowDiverged("planar map diverged");
  return out;
}

/// Affine change taking the truncated variant to the transformed one.
inline PlanarMapState to_transformed(const ReducedMapCoefficients& c, const PlanarMapState& s) {
  if (c.a == 0.0) throw PreconditionError("transformation needs a != 0");
  return PlanarMapState{c.a * s.x1 + 0.5 * c.kappa1, c.a * s.x2, PlanarVariant::Transformed};
}

enum class PlanarFixedPoint { Origin, Interior };

/// Multiplier modulus at the interior fixed point (-kappa1/a, 0):
///   |lambda| = sqrt(1 + kappa2 - (b/a) kappa1 + kappa1),
/// valid while the pair is complex. Also returns the 2x2 Jacobian
/// eigenvalues at the requested fixed point for comparison.
struct NSModulusResult {
  double modulus = 0.0;
  double radicand = 0.0;
  std::complex<double> lambda1, lambda2;
};

inline NSModulusResult ns_modulus(const ReducedMapCoefficients& c,
                                  PlanarFixedPoint at = PlanarFixedPoint::Interior) {
  if (c.a == 0.0) throw PreconditionError("interior fixed point needs a != 0");
  const double boa = c.b / c.a;
  Eigen::Matrix2d Jac;
  if (at == PlanarFixedPoint::Interior)
    Jac << 1, 1, -c.kappa1, 1 + c.kappa2 - boa * c.kappa1;
  else
    Jac << 1, 1, c.kappa1, 1 + c.kappa2;
  const Eigen::Vector2cd ev = Jac.eigenvalues();
  NSModulusResult r;
  r.lambda1 = ev[0];
  r.lambda2 = ev[1];
  r.radicand = 1.0 + c.kappa2 - boa * c.kappa1 + c.kappa1;
  if (at == PlanarFixedPoint::Interior) {
    if (r.radicand < 0.0)
      throw PreconditionError("complex-pair modulus undefined: radicand is negative");
    r.modulus = std::sqrt(r.radicand);
  } else {
    r.modulus = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

namespace detail {

inline BranchLine discrete_branch(const ReducedMapFamily& f, double slope_shift,
                                  BranchKind kind) {
  // kappa2 - slope * kappa1 = 0 in the family's own scaling
  const Eigen::Vector2d raw =
      f.pi_eps.row(1).transpose() - slope_shift * f.pi_eps.row(0).transpose();
  BranchLine l;
  l.kind = kind;
  l.coeffs = normalize_line(raw);
  l.domain_normal = f.pi_eps.row(0).transpose().normalized();
  l.kappa1_row = f.pi_eps.row(0).transpose();
  l.kappa1_cap = 2.0;
  return l;
}

}  // namespace detail

/// Neimark-Sacker branch of the discretization:
///   kappa2_eps - (b_eps/a_eps) kappa1_eps + kappa1_eps = 0,
/// equivalently kappa2 - (b/a) kappa1 + eps kappa1 = 0 in the continuous
/// scaling. Valid on 0 < kappa1_eps < 2.
inline BranchLine branch_lh_eps(const ReducedMapFamily& f) {
  return detail::discrete_branch(f, f.b_over_a() - 1.0, BranchKind::NeimarkSacker);
}

/// Homoclinic branch of the discretization:
///   kappa2_eps - (6/7)(b_eps/a_eps) kappa1_eps + (5/7) kappa1_eps = 0,
/// with the O(kappa1_eps^{3/2}) remainder dropped.
inline BranchLine branch_linf_eps(const ReducedMapFamily& f) {
  return detail::discrete_branch(f, (6.0 / 7.0) * f.b_over_a() - 5.0 / 7.0,
                                 BranchKind::DiscreteHomoclinic);
}

}  // namespace tbdde

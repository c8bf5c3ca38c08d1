#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "tbdde/branch.hpp"
#include "tbdde/errors.hpp"
#include "tbdde/model.hpp"

namespace tbdde {

/// Right/left generalized eigenvectors of the double-zero root of the
/// characteristic function, normalized by the two scalar conditions of the
/// Takens-Bogdanov eigenvector system:
///   (1) (A+B) phi1 = 0                (2) (A+B) phi2 = (B+I) phi1
///   (3) psi2 (A+B) = 0                (4) psi1 (A+B) = psi2 (B+I)
///   (5) psi2 phi2 - 1/2 psi2 B phi1 + psi2 B phi2 = 1
///   (6) psi1 phi2 - 1/2 psi1 B phi1 + psi1 B phi2
///         + 1/6 psi2 B phi1 - 1/2 psi2 B phi2 = 0
struct TBEigendata {
  Eigen::VectorXd phi1, phi2;
  Eigen::RowVectorXd psi1, psi2;
};

/// Residuals of the six defining relations above.
struct TBResiduals {
  double r1, r2, r3, r4, r5, r6;
  double max() const { return std::max({r1, r2, r3, r4, r5, r6}); }
};

inline TBResiduals tb_residuals(const LinearData& lin, const TBEigendata& e) {
  const Eigen::MatrixXd M = lin.A + lin.B;
  const Eigen::MatrixXd& B = lin.B;
  const int n = static_cast<int>(M.rows());
  const Eigen::MatrixXd BI = B + Eigen::MatrixXd::Identity(n, n);
  TBResiduals r{};
  r.r1 = (M * e.phi1).norm();
  r.r2 = (M * e.phi2 - BI * e.phi1).norm();
  r.r3 = (e.psi2 * M).norm();
  r.r4 = (e.psi1 * M - e.psi2 * BI).norm();
  const double c5 =
      e.psi2 * e.phi2 - 0.5 * e.psi2 * B * e.phi1 + e.psi2 * B * e.phi2;
  const double c6 = e.psi1 * e.phi2 - 0.5 * e.psi1 * B * e.phi1 +
                    e.psi1 * B * e.phi2 + (1.0 / 6.0) * e.psi2 * B * e.phi1 -
                    0.5 * e.psi2 * B * e.phi2;
  r.r5 = std::abs(c5 - 1.0);
  r.r6 = std::abs(c6);
  return r;
}

/// Deterministic solve of the eigenvector system. Gauge fixing: phi1 is the
/// unit-norm kernel vector with positive leading entry; phi2 the
/// minimum-norm particular solution; psi2 scaled by relation (5); psi1 the
/// minimum-norm solution of (4) shifted by s psi2, where s is the unique
/// scalar zeroing relation (6) (the shift moves (6) with unit slope by (5)).
inline TBEigendata solve_tb_eigendata(const LinearData& lin) {
  const int n = static_cast<int>(lin.A.rows());
  if (lin.A.cols() != n || lin.B.rows() != n || lin.B.cols() != n)
    throw DimensionError("A and B must be square of equal size");
  const Eigen::MatrixXd M = lin.A + lin.B;
  const Eigen::MatrixXd& B = lin.B;
  const Eigen::MatrixXd BI = B + Eigen::MatrixXd::Identity(n, n);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = n > 0 ? svd.singularValues()[0] : 0.0;
  const double tol = 1e-9 * std::max(smax, 1.0);
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  if (rank != n - 1)
    throw NotTBCandidate("A+B must be rank-deficient by exactly 1 (rank " +
                         std::to_string(rank) + " of " + std::to_string(n) + ")");

  TBEigendata e;
  e.phi1 = svd.matrixV().col(n - 1);
  for (int i = 0; i < n; ++i) {
    if (std::abs(e.phi1[i]) > 1e-9) {
      if (e.phi1[i] < 0) e.phi1 = -e.phi1;
      break;
    }
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  const Eigen::VectorXd rhs2 = BI * e.phi1;
  e.phi2 = cod.solve(rhs2);
  if ((M * e.phi2 - rhs2).norm() > 1e-9 * std::max(1.0, rhs2.norm()))
    throw NotTBCandidate("(B+I) phi1 is not in the range of A+B");

  Eigen::RowVectorXd psi2u = svd.matrixU().col(n - 1).transpose();
  const double d5 = psi2u * e.phi2 - 0.5 * psi2u * B * e.phi1 + psi2u * B * e.phi2;
  if (std::abs(d5) < 1e-10 * std::max(1.0, B.cwiseAbs().maxCoeff()))
    throw NotTBCandidate("normalization relation degenerates (root multiplicity > 2?)");
  e.psi2 = psi2u / d5;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> codT(M.transpose());
  const Eigen::RowVectorXd rhs4 = e.psi2 * BI;
  e.psi1 = codT.solve(rhs4.transpose()).transpose();
  if ((e.psi1 * M - rhs4).norm() > 1e-9 * std::max(1.0, rhs4.norm()))
    throw NotTBCandidate("psi2 (B+I) is not in the row range of A+B");

  const double lhs6 = e.psi1 * e.phi2 - 0.5 * e.psi1 * B * e.phi1 + e.psi1 * B * e.phi2 +
                      (1.0 / 6.0) * e.psi2 * B * e.phi1 - 0.5 * e.psi2 * B * e.phi2;
  e.psi1 -= lhs6 * e.psi2;

  if (tb_residuals(lin, e).max() > 1e-10)
    throw NumericalError("eigenvector system residuals exceed tolerance");
  return e;
}

/// Quadratic normal-form coefficients
///   a = psi2 sum_i (E_i + F_i + G_i) phi1_i phi1
///   b = 2 psi1 sum_i (E_i + F_i + G_i) phi1_i phi1
///       + psi2 { sum_i (E_i + F_i + G_i)(phi2_i phi1 + phi1_i phi2)
///                - sum_i (E_i + 2 G_i) phi1_i phi1 }.
inline std::pair<double, double> compute_ab(const TBEigendata& e, const QuadraticData& q) {
  const int n = static_cast<int>(e.phi1.size());
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(n);    // sum (E+F+G) phi1_i phi1
  Eigen::VectorXd s12 = Eigen::VectorXd::Zero(n);   // mixed phi1/phi2 sum
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd EFG = q.E[i] + q.F[i] + q.G[i];
    s1 += EFG * (e.phi1[i] * e.phi1);
    s12 += EFG * (e.phi2[i] * e.phi1 + e.phi1[i] * e.phi2) -
           (q.E[i] + 2.0 * q.G[i]) * (e.phi1[i] * e.phi1);
  }
  const double a = e.psi2 * s1;
  const double b = 2.0 * (e.psi1 * s1) + e.psi2 * s12;
  return {a, b};
}

/// Parameter transform kappa = Pi alpha.
inline Eigen::Matrix2d compute_pi(const TBEigendata& e, const QuadraticData& q) {
  const Eigen::MatrixXd AB1 = q.A1 + q.B1;
  const Eigen::MatrixXd AB2 = q.A2 + q.B2;
  Eigen::Matrix2d pi;
  pi(0, 0) = e.psi2 * AB1 * e.phi1;
  pi(0, 1) = e.psi2 * AB2 * e.phi1;
  pi(1, 0) = e.psi1 * AB1 * e.phi1 + e.psi2 * (AB1 * e.phi2 - q.B1 * e.phi1);
  pi(1, 1) = e.psi1 * AB2 * e.phi1 + e.psi2 * (AB2 * e.phi2 - q.B2 * e.phi1);
  return pi;
}

struct TBCoefficients {
  double a = 0.0, b = 0.0;
  Eigen::Matrix2d Pi = Eigen::Matrix2d::Zero();
  double det_pi = 0.0;
  bool det_nonzero = false;
  bool ab_nonzero = false;

  Eigen::Vector2d kappa(const Eigen::Vector2d& alpha) const { return Pi * alpha; }
};

inline TBCoefficients tb_coefficients(const TBEigendata& e, const QuadraticData& q) {
  TBCoefficients c;
  std::tie(c.a, c.b) = compute_ab(e, q);
  c.Pi = compute_pi(e, q);
  c.det_pi = c.Pi.determinant();
  c.det_nonzero = std::abs(c.det_pi) > 1e-12;
  c.ab_nonzero = std::abs(c.a * c.b) > 1e-12;
  return c;
}

/// Hopf branch: kappa2(alpha) - (b/a) kappa1(alpha) = 0 on kappa1 > 0,
/// higher-order terms dropped.
inline BranchLine branch_lh(const TBCoefficients& c) {
  if (c.a == 0.0) throw PreconditionError("branch line undefined for a = 0");
  BranchLine l;
  l.kind = BranchKind::Hopf;
  l.coeffs = normalize_line(c.Pi.row(1).transpose() - (c.b / c.a) * c.Pi.row(0).transpose());
  l.domain_normal = c.Pi.row(0).transpose().normalized();
  return l;
}

/// Homoclinic branch: kappa2(alpha) - (6/7)(b/a) kappa1(alpha) = 0 on
/// kappa1 > 0; the parameter dependence of the slope beyond its value at the
/// origin is dropped with the other higher-order terms.
inline BranchLine branch_linf(const TBCoefficients& c) {
  if (c.a == 0.0) throw PreconditionError("branch line undefined for a = 0");
  BranchLine l;
  l.kind = BranchKind::Homoclinic;
  l.coeffs = normalize_line(c.Pi.row(1).transpose() -
                            (6.0 / 7.0) * (c.b / c.a) * c.Pi.row(0).transpose());
  l.domain_normal = c.Pi.row(0).transpose().normalized();
  return l;
}

/// Characteristic function Delta(mu) = det(mu I - A - B e^{-mu}).
inline std::complex<double> char_delta(const LinearData& lin, std::complex<double> mu) {
  const int n = static_cast<int>(lin.A.rows());
  Eigen::MatrixXcd M = mu * Eigen::MatrixXcd::Identity(n, n) - lin.A.cast<std::complex<double>>() -
                       std::exp(-mu) * lin.B.cast<std::complex<double>>();
  return M.determinant();
}

inline double char_delta_real(const LinearData& lin, double mu) {
  const int n = static_cast<int>(lin.A.rows());
  Eigen::MatrixXd M =
      mu * Eigen::MatrixXd::Identity(n, n) - lin.A - std::exp(-mu) * lin.B;
  return M.determinant();
}

/// Sampled diagnostic for the double-zero assumption: Delta and its first
/// two derivatives at 0 (central differences), plus a scan of |Delta(i w)|
/// on a grid excluding w = 0. Heuristic, not a proof.
struct AssumptionAReport {
  double delta0 = 0.0;
  double dprime = 0.0;
  double dsecond = 0.0;
  double axis_min = 0.0;
  double axis_min_omega = 0.0;
  double omega_max = 0.0;
  int grid_points = 0;
  double tol = 0.0;
  bool root_ok = false, derivative_ok = false, second_ok = false, axis_ok = false;
  bool verdict = false;
};

inline AssumptionAReport check_assumption_A(const LinearData& lin, double omega_max = 50.0,
                                            int grid_points = 10000, double tol = 1e-6,
                                            double h = 1e-5) {
  AssumptionAReport r;
  r.omega_max = omega_max;
  r.grid_points = grid_points;
  r.tol = tol;
  const double fp = char_delta_real(lin, h);
  const double fm = char_delta_real(lin, -h);
  r.delta0 = char_delta_real(lin, 0.0);
  r.dprime = (fp - fm) / (2.0 * h);
  r.dsecond = (fp - 2.0 * r.delta0 + fm) / (h * h);
  r.axis_min = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= grid_points; ++k) {
    const double w = omega_max * k / grid_points;
    const double v = std::abs(char_delta(lin, std::complex<double>(0.0, w)));
    if (v < r.axis_min) {
      r.axis_min = v;
      r.axis_min_omega = w;
    }
  }
  r.root_ok = std::abs(r.delta0) < tol;
  r.derivative_ok = std::abs(r.dprime) < tol;
  r.second_ok = std::abs(r.dsecond) > tol;
  r.axis_ok = r.axis_min > tol;
  r.verdict = r.root_ok && r.derivative_ok && r.second_ok && r.axis_ok;
  return r;
}

}  // namespace tbdde

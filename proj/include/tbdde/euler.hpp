#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "tbdde/errors.hpp"
#include "tbdde/model.hpp"
#include "tbdde/tb_continuous.hpp"

namespace tbdde {

/// Forward Euler discretization of the model with step eps = 1/m. The state
/// window u_k = (z_k, z_{k-1}, ..., z_{k-m}) is stored newest-first. The
/// step count m is the ground truth; eps is always derived from it.
class EulerScheme {
 public:
  EulerScheme(const DDEModel& model, int m, const Eigen::Vector2d& alpha)
      : model_(&model), m_(m), alpha_(alpha) {
    if (m < 2) throw PreconditionError("step count m must be at least 2");
  }

  const DDEModel& model() const { return *model_; }
  int m() const { return m_; }
  double eps() const { return 1.0 / m_; }
  const Eigen::Vector2d& alpha() const { return alpha_; }
  int block_dim() const { return model_->dim(); }
  int dim() const { return (m_ + 1) * model_->dim(); }

 private:
  const DDEModel* model_;
  int m_;
  Eigen::Vector2d alpha_;
};

/// Linearization of the Euler map at a fixed point: block row
/// [I + eps A', 0, ..., 0, eps B'] over a shift-identity subdiagonal, where
/// A', B' are the state/delay Jacobians of f at (z*, z*, alpha).
struct CompanionMatrix {
  int n = 0, m = 0;
  double eps = 0.0;
  Eigen::MatrixXd top_state;  // I + eps A'
  Eigen::MatrixXd top_delay;  // eps B'

  Eigen::MatrixXd dense() const {
    const int N = (m + 1) * n;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
    C.topLeftCorner(n, n) = top_state;
    C.topRightCorner(n, n) = top_delay;
    for (int j = 0; j < m; ++j) C.block((j + 1) * n, j * n, n, n).setIdentity();
    return C;
  }
};

inline CompanionMatrix build_companion(const EulerScheme& s, const Eigen::VectorXd& at_point) {
  const int n = s.block_dim();
  if (at_point.size() != n) throw DimensionError("fixed point has wrong dimension");
  CompanionMatrix c;
  c.n = n;
  c.m = s.m();
  c.eps = s.eps();
  c.top_state = Eigen::MatrixXd::Identity(n, n) +
                c.eps * s.model().jacobian_state(at_point, at_point, s.alpha());
  c.top_delay = c.eps * s.model().jacobian_delay(at_point, at_point, s.alpha());
  return c;
}

/// Reduced characteristic value det(l^m (l-1) I - l^m eps A' - eps B').
/// Vanishes exactly where det(l I - C) does; at l = 0 falls back to the
/// dense determinant.
inline std::complex<double> reduced_char(const EulerScheme& s, std::complex<double> lambda,
                                         const Eigen::VectorXd& at_point) {
  const CompanionMatrix c = build_companion(s, at_point);
  const int n = c.n;
  if (lambda == 0.0) {
    Eigen::MatrixXcd M = -c.dense().cast<std::complex<double>>();
    return M.determinant();
  }
  std::complex<double> lm = 1.0;
  for (int k = 0; k < c.m; ++k) lm *= lambda;
  const Eigen::MatrixXcd A = (c.top_state - Eigen::MatrixXd::Identity(n, n))
                                 .cast<std::complex<double>>();  // eps A'
  const Eigen::MatrixXcd B = c.top_delay.cast<std::complex<double>>();  // eps B'
  Eigen::MatrixXcd M = lm * (lambda - 1.0) * Eigen::MatrixXcd::Identity(n, n) - lm * A - B;
  return M.determinant();
}

/// All (m+1)n eigenvalues of the dense companion matrix, sorted by
/// descending modulus (ties by real part, then imaginary part).
inline std::vector<std::complex<double>> spectrum(const EulerScheme& s,
                                                  const Eigen::VectorXd& at_point,
                                                  long cap = 2048) {
  if (s.dim() > cap)
    throw CapExceeded("dense eigensolve dimension " + std::to_string(s.dim()) +
                      " exceeds cap " + std::to_string(cap));
  const Eigen::MatrixXd C = build_companion(s, at_point).dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return ev;
}

/// One forward Euler step on the window (z_k, ..., z_{k-m}); returns the
/// shifted window with the new head.
inline Eigen::VectorXd euler_step(const EulerScheme& s, const Eigen::VectorXd& window) {
  const int n = s.block_dim();
  if (window.size() != s.dim()) throw DimensionError("window has wrong dimension");
  const Eigen::VectorXd z = window.head(n);
  const Eigen::VectorXd w = window.tail(n);
  Eigen::VectorXd out(window.size());
  out.head(n) = z + s.eps() * s.model().eval(z, w, s.alpha());
  out.tail(s.m() * n) = window.head(s.m() * n);
  if (!out.head(n).allFinite()) throw OverflowDiverged("euler step produced nonfinite state");
  return out;
}

/// Generalized eigenvectors of the companion matrix at the 1:1 resonance:
///   (C-I) phi1 = 0,  (C-I) phi2 = phi1,
///   psi2 (C-I) = 0,  psi1 (C-I) = psi2,
/// normalized to psi1 phi1 = psi2 phi2 = 1, psi2 phi1 = psi1 phi2 = 0.
struct DiscreteEigendata {
  Eigen::VectorXd phi1, phi2;
  Eigen::RowVectorXd psi1, psi2;
  enum class Path { ClosedForm, DirectSolve } path = Path::ClosedForm;
};

struct DiscreteResiduals {
  double chain_phi1, chain_phi2, chain_psi2, chain_psi1;
  double n11, n22, n21, n12;
  double max() const {
    return std::max({chain_phi1, chain_phi2, chain_psi2, chain_psi1, n11, n22, n21, n12});
  }
};

inline DiscreteResiduals discrete_residuals(const Eigen::MatrixXd& C,
                                            const DiscreteEigendata& e) {
  const Eigen::MatrixXd K = C - Eigen::MatrixXd::Identity(C.rows(), C.cols());
  DiscreteResiduals r{};
  r.chain_phi1 = (K * e.phi1).norm();
  r.chain_phi2 = (K * e.phi2 - e.phi1).norm();
  r.chain_psi2 = (e.psi2 * K).norm();
  r.chain_psi1 = (e.psi1 * K - e.psi2).norm();
  r.n11 = std::abs(double(e.psi1 * e.phi1) - 1.0);
  r.n22 = std::abs(double(e.psi2 * e.phi2) - 1.0);
  r.n21 = std::abs(double(e.psi2 * e.phi1));
  r.n12 = std::abs(double(e.psi1 * e.phi2));
  return r;
}

namespace detail {

// Closed-form candidate quadruple assembled from the continuous eigendata.
// The common prefactor equals 1/(psi2_hat . phi2); the candidate psi1 is a
// valid chain vector but generally violates psi1 phi2 = 0.
inline DiscreteEigendata assemble_closed_form(const EulerScheme& s, const TBEigendata& tb,
                                              const LinearData& lin) {
  const int n = s.block_dim();
  const int m = s.m();
  const double eps = s.eps();
  DiscreteEigendata e;
  e.phi1.resize((m + 1) * n);
  e.phi2.resize((m + 1) * n);
  e.psi1.resize((m + 1) * n);
  e.psi2.resize((m + 1) * n);
  const Eigen::RowVectorXd p1B = tb.psi1 * lin.B;
  const Eigen::RowVectorXd p2B = tb.psi2 * lin.B;
  for (int j = 0; j <= m; ++j) {
    e.phi1.segment(j * n, n) = eps * tb.phi1;
    e.phi2.segment(j * n, n) = eps * (m * tb.phi2 - j * tb.phi1);
    if (j == 0) {
      e.psi2.segment(0, n) = tb.psi2;
      e.psi1.segment(0, n) = m * tb.psi1;
    } else {
      e.psi2.segment(j * n, n) = eps * p2B;
      e.psi1.segment(j * n, n) = p1B - (m - j + 1) * eps * p2B;
    }
  }
  const double pref = 1.0 - (0.5 / m) * double(tb.psi2 * lin.B * tb.phi1);
  if (pref == 0.0) throw PreconditionError("closed-form normalization factor vanishes");
  e.psi1 /= pref;
  e.psi2 /= pref;
  e.path = DiscreteEigendata::Path::ClosedForm;
  return e;
}

inline Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& K) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  lu.setThreshold(1e-9);
  if (lu.dimensionOfKernel() != 1)
    throw NotTBCandidate("eigenvalue 1 must have geometric multiplicity 1 (kernel dim " +
                         std::to_string(lu.dimensionOfKernel()) + ")");
  Eigen::VectorXd v = lu.kernel().col(0).normalized();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-9) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

}  // namespace detail

/// Builds the resonant quadruple at alpha = 0. The closed-form candidate is
/// assembled first and kept when it already satisfies all eight conditions;
/// otherwise the chain systems are solved directly (minimum-norm) and
/// normalized against (psi_i, phi_j) = delta_ij.
inline DiscreteEigendata build_discrete_eigendata(const EulerScheme& s, const TBEigendata& tb,
                                                  double tol = 1e-10) {
  if (s.alpha().norm() != 0.0)
    throw PreconditionError("discrete eigendata is defined at alpha = 0");
  const LinearData lin = extract_linear(s.model());
  const Eigen::MatrixXd C =
      build_companion(s, Eigen::VectorXd::Zero(s.block_dim())).dense();

  DiscreteEigendata e = detail::assemble_closed_form(s, tb, lin);
  if (discrete_residuals(C, e).max() <= tol) return e;

  const Eigen::MatrixXd K = C - Eigen::MatrixXd::Identity(C.rows(), C.cols());
  e.phi1 = detail::kernel_vector(K);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
  e.phi2 = cod.solve(e.phi1);
  if ((K * e.phi2 - e.phi1).norm() > 1e-9)
    throw NotTBCandidate("no length-2 chain at eigenvalue 1");
  Eigen::RowVectorXd psi2u = detail::kernel_vector(K.transpose()).transpose();
  const double s2 = psi2u * e.phi2;
  if (std::abs(s2) < 1e-12)
    throw NotTBCandidate("left and right chains are degenerate (multiplicity > 2?)");
  e.psi2 = psi2u / s2;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> codT(K.transpose());
  e.psi1 = codT.solve(e.psi2.transpose()).transpose();
  if ((e.psi1 * K - e.psi2).norm() > 1e-9)
    throw NotTBCandidate("no length-2 left chain at eigenvalue 1");
  e.psi1 -= double(e.psi1 * e.phi2) * e.psi2;
  e.path = DiscreteEigendata::Path::DirectSolve;

  if (discrete_residuals(C, e).max() > tol)
    throw NumericalError("resonant quadruple residuals exceed tolerance");
  return e;
}

/// Spectral verdict at a fixed point: a 1:1 resonance shows exactly two
/// multipliers within pair_tol of 1 while every other multiplier keeps
/// | |lambda| - 1 | above margin_tol.
struct ResonanceReport {
  int near_unit_count = 0;
  double pair_gap = 0.0;        // max |lambda - 1| over the two nearest 1
  double others_margin = 0.0;   // min | |lambda|-1 | over the rest
  double min_gap_to_one = 0.0;  // min |lambda - 1| over the rest
  double pair_tol = 0.0, margin_tol = 0.0;
  bool verdict = false;
};

inline ResonanceReport resonance_report(const EulerScheme& s, const Eigen::VectorXd& at_point,
                                        double pair_tol = 1e-6, double margin_tol = 1e-4,
                                        long cap = 2048) {
  const auto ev = spectrum(s, at_point, cap);
  std::vector<double> dist;
  dist.reserve(ev.size());
  for (const auto& l : ev) dist.push_back(std::abs(l - 1.0));
  std::vector<std::size_t> order(ev.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return dist[i] < dist[j]; });

  ResonanceReport r;
  r.pair_tol = pair_tol;
  r.margin_tol = margin_tol;
  for (double d : dist) r.near_unit_count += (d < pair_tol) ? 1 : 0;
  r.pair_gap = ev.size() >= 2 ? std::max(dist[order[0]], dist[order[1]]) : 0.0;
  r.others_margin = std::numeric_limits<double>::infinity();
  r.min_gap_to_one = std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k < order.size(); ++k) {
    r.others_margin = std::min(r.others_margin, std::abs(std::abs(ev[order[k]]) - 1.0));
    r.min_gap_to_one = std::min(r.min_gap_to_one, dist[order[k]]);
  }
  r.verdict = (r.near_unit_count == 2) && (r.others_margin > margin_tol);
  return r;
}

}  // namespace tbdde

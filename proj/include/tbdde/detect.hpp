#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tbdde/errors.hpp"
#include "tbdde/euler.hpp"
#include "tbdde/model.hpp"
#include "tbdde/tb_continuous.hpp"

namespace tbdde {

/// Sampled Euler orbit. Row k of `z` holds z_k; row k of `dz` holds the
/// difference quotient (z_{k+1} - z_k)/eps, computed bit-exactly from the
/// stored samples. A diverged run keeps the samples up to the offending
/// step.
struct Trajectory {
  int m = 0, n = 0;
  Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
  Eigen::MatrixXd z;   // (K+1) x n
  Eigen::MatrixXd dz;  // K x n
  enum class Status { Completed, Diverged } status = Status::Completed;
  long diverged_step = -1;

  double eps() const { return 1.0 / m; }
  long steps() const { return z.rows() - 1; }
};

/// Runs the Euler scheme from a constant history for `steps` steps, or until
/// the state norm exceeds escape_radius (status Diverged).
inline Trajectory simulate(const EulerScheme& s, const Eigen::VectorXd& history,
                           long steps, double escape_radius) {
  const int n = s.block_dim();
  if (history.size() != n) throw DimensionError("history value has wrong dimension");
  if (steps < 1) throw PreconditionError("need at least one step");

  Trajectory t;
  t.m = s.m();
  t.n = n;
  t.alpha = s.alpha();
  t.z.resize(steps + 1, n);
  Eigen::VectorXd window(s.dim());
  for (int j = 0; j <= s.m(); ++j) window.segment(j * n, n) = history;
  t.z.row(0) = history.transpose();
  long k = 0;
  for (; k < steps; ++k) {
    try {
      window = euler_step(s, window);
    } catch (const OverflowDiverged&) {
      t.status = Trajectory::Status::Diverged;
      t.diverged_step = k + 1;
      break;
    }
    t.z.row(k + 1) = window.head(n).transpose();
    if (window.head(n).norm() > escape_radius) {
      t.status = Trajectory::Status::Diverged;
      t.diverged_step = k + 1;
      ++k;
      break;
    }
  }
  t.z.conservativeResize(k + 1, n);
  t.dz.resize(std::max<long>(k, 0), n);
  for (long i = 0; i < t.dz.rows(); ++i)
    t.dz.row(i) = (t.z.row(i + 1) - t.z.row(i)) * static_cast<double>(t.m);
  return t;
}

/// Damped Newton solve of f(z, z, alpha) = 0 to residual norm < 1e-12.
inline Eigen::VectorXd find_fixed_point(const DDEModel& model, const Eigen::Vector2d& alpha,
                                        const Eigen::VectorXd& guess, int max_iter = 100) {
  Eigen::VectorXd z = guess;
  Eigen::VectorXd f = model.eval(z, z, alpha);
  for (int it = 0; it < max_iter; ++it) {
    if (f.norm() < 1e-12) return z;
    const Eigen::MatrixXd J =
        model.jacobian_state(z, z, alpha) + model.jacobian_delay(z, z, alpha);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible())
      throw ConvergenceError("singular Jacobian in fixed-point Newton iteration");
    const Eigen::VectorXd step = lu.solve(-f);
    double damp = 1.0;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd cand = z + damp * step;
      const Eigen::VectorXd fc = model.eval(cand, cand, alpha);
      if (fc.norm() <= f.norm() || damp < 1e-12) {
        z = cand;
        f = fc;
        break;
      }
      damp *= 0.5;
    }
  }
  if (f.norm() < 1e-12) return z;
  throw ConvergenceError("fixed-point Newton did not converge in " +
                         std::to_string(max_iter) + " iterations");
}

/// Normal-form-informed starting guess for the interior fixed point:
/// z ~ -(kappa1(alpha)/a) phi1.
inline Eigen::VectorXd interior_fixed_point_guess(const TBCoefficients& c,
                                                  const TBEigendata& e,
                                                  const Eigen::Vector2d& alpha) {
  if (c.a == 0.0) throw PreconditionError("interior fixed point guess needs a != 0");
  return -(c.kappa(alpha)[0] / c.a) * e.phi1;
}

struct DetectionResult {
  double alpha2 = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double alpha1 = 0.0;
  double residual = 0.0;  // final bracket width
  int iterations = 0;
  std::string criterion;
};

namespace detail {

// Bisection on a sign predicate; returns midpoint once width < tol.
inline DetectionResult bisect_sign(const std::function<int(double)>& sign_of, double lo,
                                   double hi, double tol, const std::string& criterion) {
  if (!(lo < hi)) throw PreconditionError("bracket must satisfy lo < hi");
  int slo = sign_of(lo);
  int shi = sign_of(hi);
  if (slo == shi)
    throw NoSignChange("bracket endpoints classify identically; " + criterion);
  DetectionResult r;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const int sm = sign_of(mid);
    ++r.iterations;
    if (sm == slo)
      lo = mid;
    else
      hi = mid;
    if (r.iterations > 200) throw ConvergenceError("bisection exceeded 200 iterations");
  }
  r.alpha1 = 0.5 * (lo + hi);
  r.residual = hi - lo;
  r.criterion = criterion;
  return r;
}

}  // namespace detail

struct NSDetectOptions {
  long eigen_cap = 2048;
  double imag_tol = 1e-9;  // eigenvalues with |Im| above this count as complex
};

/// Modulus of the complex multiplier pair of the companion matrix at the
/// interior fixed point, nearest to the unit circle.
inline double ns_pair_modulus(const DDEModel& model, int m, const Eigen::Vector2d& alpha,
                              const TBCoefficients& coef, const TBEigendata& eig,
                              const NSDetectOptions& opt = {}) {
  const Eigen::VectorXd guess = interior_fixed_point_guess(coef, eig, alpha);
  const Eigen::VectorXd zstar = find_fixed_point(model, alpha, guess);
  const EulerScheme scheme(model, m, alpha);
  const auto ev = spectrum(scheme, zstar, opt.eigen_cap);
  double best = std::numeric_limits<double>::infinity();
  double modulus = std::numeric_limits<double>::quiet_NaN();
  for (const auto& l : ev) {
    if (std::abs(l.imag()) <= opt.imag_tol) continue;
    const double d = std::abs(std::abs(l) - 1.0);
    if (d < best) {
      best = d;
      modulus = std::abs(l);
    }
  }
  if (!std::isfinite(modulus))
    throw PreconditionError("no complex multiplier pair at the fixed point");
  return modulus;
}

/// Bisection on (pair modulus - 1) over alpha1 at fixed alpha2: locates the
/// Neimark-Sacker crossing of the interior fixed point.
inline DetectionResult detect_ns(const DDEModel& model, int m, double alpha2,
                                 double bracket_lo, double bracket_hi, double tol,
                                 const NSDetectOptions& opt = {}) {
  const LinearData lin = extract_linear(model);
  const TBEigendata eig = solve_tb_eigendata(lin);
  const TBCoefficients coef = tb_coefficients(eig, extract_quadratic(model));
  auto sign_of = [&](double a1) {
    const double g =
        ns_pair_modulus(model, m, Eigen::Vector2d(a1, alpha2), coef, eig, opt) - 1.0;
    return g >= 0.0 ? 1 : -1;
  };
  std::ostringstream label;
  label << "ns-modulus-bisection; complex pair nearest |lambda|=1; m=" << m
        << "; tol=" << tol;
  DetectionResult r = detail::bisect_sign(sign_of, bracket_lo, bracket_hi, tol, label.str());
  r.alpha2 = alpha2;
  return r;
}

struct ShootOptions {
  double delta_rel = 1e-3;      // initial offset: delta_rel * z*
  long steps_per_m = 200;       // N_max = steps_per_m * m
  double escape_factor = 1e3;   // R = escape_factor * max(1, |z*|)
};

/// Bounded/escaping predicate: start a constant history at delta_rel * z*
/// (near the saddle at the origin, displaced toward the interior fixed
/// point) and integrate N_max steps.
inline bool orbit_escapes(const DDEModel& model, int m, const Eigen::Vector2d& alpha,
                          const TBCoefficients& coef, const TBEigendata& eig,
                          const ShootOptions& opt) {
  const Eigen::VectorXd guess = interior_fixed_point_guess(coef, eig, alpha);
  const Eigen::VectorXd zstar = find_fixed_point(model, alpha, guess);
  const EulerScheme scheme(model, m, alpha);
  const Eigen::VectorXd start = opt.delta_rel * zstar;
  const double radius = opt.escape_factor * std::max(1.0, zstar.norm());
  const Trajectory t = simulate(scheme, start, opt.steps_per_m * m, radius);
  return t.status == Trajectory::Status::Diverged;
}

/// Bisection on the bounded/escaping transition over alpha1 at fixed
/// alpha2: locates the homoclinic parameter where the invariant circle
/// collides with the saddle and orbits begin to escape.
inline DetectionResult shoot_homoclinic(const DDEModel& model, int m, double alpha2,
                                        double bracket_lo, double bracket_hi, double tol,
                                        const ShootOptions& opt = {}) {
  const LinearData lin = extract_linear(model);
  const TBEigendata eig = solve_tb_eigendata(lin);
  const TBCoefficients coef = tb_coefficients(eig, extract_quadratic(model));
  auto sign_of = [&](double a1) {
    return orbit_escapes(model, m, Eigen::Vector2d(a1, alpha2), coef, eig, opt) ? 1 : -1;
  };
  std::ostringstream label;
  label << "bounded-escape shooting; delta=" << opt.delta_rel
        << "*z_star; N_max=" << opt.steps_per_m * m
        << "; R_escape=" << opt.escape_factor << "*max(1,|z_star|); tol=" << tol;
  DetectionResult r;
  try {
    r = detail::bisect_sign(sign_of, bracket_lo, bracket_hi, tol, label.str());
  } catch (const NoSignChange&) {
    throw NoSignChange(
        "both bracket endpoints give the same bounded/escaping class; widen the "
        "bracket around the discrete homoclinic line prediction");
  }
  r.alpha2 = alpha2;
  return r;
}

enum class TrajectoryClass { Focus, InvariantCurve, Escape, Undetermined };

inline std::string to_string(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::Focus: return "focus";
    case TrajectoryClass::InvariantCurve: return "invariant-curve";
    case TrajectoryClass::Escape: return "escape";
    case TrajectoryClass::Undetermined: return "undetermined";
  }
  return "?";
}

/// Envelope heuristic: compares the peak distance from the fixed point over
/// the last quarter of the run against the middle quarter. Decaying
/// envelope (ratio < 0.5) is a focus; a settled envelope (ratio in
/// [0.8, 1.25]) an invariant curve; anything else is reported Undetermined
/// (usually a sign that a longer run is needed).
inline TrajectoryClass classify(const Trajectory& t, const Eigen::VectorXd& fixed_point) {
  if (t.status == Trajectory::Status::Diverged) return TrajectoryClass::Escape;
  const long len = t.z.rows();
  if (len < 10L * t.m + 1)
    throw PreconditionError("trajectory shorter than 10 delay intervals");
  auto peak = [&](long lo, long hi) {
    double p = 0.0;
    for (long k = lo; k < hi; ++k)
      p = std::max(p, (t.z.row(k).transpose() - fixed_point).norm());
    return p;
  };
  const double mid = peak(static_cast<long>(0.375 * len), static_cast<long>(0.625 * len));
  const double last = peak(static_cast<long>(0.75 * len), len);
  if (mid < 1e-300) return TrajectoryClass::Focus;
  const double ratio = last / mid;
  if (ratio < 0.5) return TrajectoryClass::Focus;
  if (ratio >= 0.8 && ratio <= 1.25) return TrajectoryClass::InvariantCurve;
  return TrajectoryClass::Undetermined;
}

}  // namespace tbdde

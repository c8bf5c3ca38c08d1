#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>

#include "tbdde/errors.hpp"

namespace tbdde {

enum class BranchKind { Hopf, Homoclinic, NeimarkSacker, DiscreteHomoclinic };

inline std::string to_string(BranchKind k) {
  switch (k) {
    case BranchKind::Hopf: return "hopf";
    case BranchKind::Homoclinic: return "homoclinic";
    case BranchKind::NeimarkSacker: return "neimark-sacker";
    case BranchKind::DiscreteHomoclinic: return "discrete-homoclinic";
  }
  return "?";
}

/// A bifurcation branch through the origin of the (a1, a2) parameter plane,
/// truncated to first order: the line coeffs . alpha = 0 restricted to the
/// half-plane domain_normal . alpha > 0 (the kappa_1 > 0 side).
///
/// coeffs is unit norm with coeffs[0] >= 0 (and coeffs[1] > 0 when
/// coeffs[0] = 0); domain_normal is unit norm with its orientation kept.
struct BranchLine {
  BranchKind kind = BranchKind::Hopf;
  Eigen::Vector2d coeffs = Eigen::Vector2d::Zero();
  Eigen::Vector2d domain_normal = Eigen::Vector2d::Zero();
  // Discrete branches additionally record the validity cap on kappa1_eps:
  // kappa1_row . alpha must stay below kappa1_cap.
  Eigen::Vector2d kappa1_row = Eigen::Vector2d::Zero();
  double kappa1_cap = std::numeric_limits<double>::infinity();

  double value(const Eigen::Vector2d& alpha) const { return coeffs.dot(alpha); }
  bool in_domain(const Eigen::Vector2d& alpha) const {
    return domain_normal.dot(alpha) > 0.0 && kappa1_row.dot(alpha) < kappa1_cap;
  }
  /// alpha1 on the line for fixed alpha2 (coeffs[0] must be nonzero).
  double alpha1_at(double alpha2) const {
    if (coeffs[0] == 0.0) throw PreconditionError("branch line is horizontal");
    return -coeffs[1] * alpha2 / coeffs[0];
  }
};

/// Unit-norm representative of the linear form with the sign convention
/// c1 >= 0, and c2 > 0 when c1 vanishes.
inline Eigen::Vector2d normalize_line(const Eigen::Vector2d& v) {
  const double n = v.norm();
  if (n == 0.0) throw PreconditionError("zero linear form has no direction");
  Eigen::Vector2d u = v / n;
  if (u[0] < 0.0 || (u[0] == 0.0 && u[1] < 0.0)) u = -u;
  return u;
}

}  // namespace tbdde

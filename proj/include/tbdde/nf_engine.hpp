#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tbdde/errors.hpp"

namespace tbdde {

/// Canonical basis of V_j^{c+p}(R^c): homogeneous degree-j polynomials in
/// c center variables x_1..x_c and p parameters a_1..a_p with values in R^c.
/// Monomials are ordered graded-lexicographically (x_1 exponent first,
/// descending), components fastest within a monomial.
struct MonomialBasis {
  int degree = 0;
  int center_dim = 0;
  int param_count = 0;
  std::vector<std::vector<int>> monomials;

  int var_count() const { return center_dim + param_count; }
  int monomial_count() const { return static_cast<int>(monomials.size()); }
  int dim() const { return monomial_count() * center_dim; }
  int flat_index(int mono, int comp) const { return mono * center_dim + comp; }

  int monomial_index(const std::vector<int>& exps) const {
    auto it = index_.find(exps);
    if (it == index_.end()) throw DimensionError("monomial not in basis");
    return it->second;
  }

  void build_index() {
    index_.clear();
    for (int i = 0; i < monomial_count(); ++i) index_[monomials[i]] = i;
  }

 private:
  std::map<std::vector<int>, int> index_;
};

namespace detail {

inline void enumerate_rec(int remaining, int var, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
  const int nvars = static_cast<int>(cur.size());
  if (var == nvars - 1) {
    cur[var] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[var] = e;
    enumerate_rec(remaining - e, var + 1, cur, out);
  }
}

inline long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

inline MonomialBasis enumerate_basis(int degree, int center_dim, int param_count,
                                     long long cap = 1'000'000) {
  if (degree < 2 || center_dim < 1 || param_count < 0)
    throw PreconditionError("enumerate_basis requires j >= 2, c >= 1, p >= 0");
  const long long count =
      detail::binom(degree + center_dim + param_count - 1, degree);
  if (count * center_dim > cap)
    throw CapExceeded("polynomial space dimension " +
                      std::to_string(count * center_dim) + " exceeds cap");
  MonomialBasis b;
  b.degree = degree;
  b.center_dim = center_dim;
  b.param_count = param_count;
  std::vector<int> cur(center_dim + param_count, 0);
  detail::enumerate_rec(degree, 0, cur, b.monomials);
  b.build_index();
  return b;
}

/// Element of V_j^{c+p}(R^c) in the canonical basis.
struct PolyVec {
  MonomialBasis basis;
  Eigen::VectorXd coeffs;

  static PolyVec zero(const MonomialBasis& b) {
    return PolyVec{b, Eigen::VectorXd::Zero(b.dim())};
  }
  double& at(const std::vector<int>& exps, int comp) {
    return coeffs[basis.flat_index(basis.monomial_index(exps), comp)];
  }
  double get(const std::vector<int>& exps, int comp) const {
    return coeffs[basis.flat_index(basis.monomial_index(exps), comp)];
  }
  double norm1() const { return coeffs.template lpNorm<1>(); }
};

namespace detail {

using ExpMap = std::map<std::vector<int>, double>;

// Multiply a polynomial over the x-variables by the linear form row.x.
inline ExpMap mul_linear(const ExpMap& poly, const Eigen::VectorXd& row) {
  ExpMap out;
  for (const auto& [exps, coef] : poly)
    for (int k = 0; k < row.size(); ++k) {
      if (row[k] == 0.0) continue;
      std::vector<int> e = exps;
      ++e[k];
      out[e] += coef * row[k];
    }
  return out;
}

}  // namespace detail

/// Direct evaluation of p(Jx, a) - J p(x, a) by exact polynomial
/// substitution. J acts on the x-variables only; the parameters substitute
/// identically.
inline PolyVec apply_homological_direct(const Eigen::MatrixXd& J, const PolyVec& poly) {
  const MonomialBasis& b = poly.basis;
  const int c = b.center_dim;
  if (J.rows() != c || J.cols() != c)
    throw DimensionError("J must be square of the center dimension");
  PolyVec out = PolyVec::zero(b);
  for (int mono = 0; mono < b.monomial_count(); ++mono) {
    for (int comp = 0; comp < c; ++comp) {
      const double coef = poly.coeffs[b.flat_index(mono, comp)];
      if (coef == 0.0) continue;
      const std::vector<int>& q = b.monomials[mono];
      // expand prod_i (J.row(i) . x)^{q_i} over the x variables
      detail::ExpMap xpart{{std::vector<int>(c, 0), 1.0}};
      for (int i = 0; i < c; ++i)
        for (int rep = 0; rep < q[i]; ++rep)
          xpart = detail::mul_linear(xpart, J.row(i).transpose());
      for (const auto& [xexps, xcoef] : xpart) {
        std::vector<int> full(b.var_count());
        for (int i = 0; i < c; ++i) full[i] = xexps[i];
        for (int k = 0; k < b.param_count; ++k) full[c + k] = q[c + k];
        out.coeffs[b.flat_index(b.monomial_index(full), comp)] += coef * xcoef;
      }
      // subtract J p(x, a): e_comp maps to J.col(comp) in component space
      for (int comp2 = 0; comp2 < c; ++comp2)
        out.coeffs[b.flat_index(mono, comp2)] -= J(comp2, comp) * coef;
    }
  }
  return out;
}

/// Matrix representation of the homological operator
///     (M p)(x, a) = p(Jx, a) - J p(x, a)
/// on V_j^{c+p}(R^c) in the canonical basis.
class HomologicalOperator {
 public:
  HomologicalOperator(Eigen::MatrixXd J, MonomialBasis basis)
      : J_(std::move(J)), basis_(std::move(basis)) {
    const int N = basis_.dim();
    matrix_.resize(N, N);
    for (int mono = 0; mono < basis_.monomial_count(); ++mono)
      for (int comp = 0; comp < basis_.center_dim; ++comp) {
        PolyVec e = PolyVec::zero(basis_);
        e.coeffs[basis_.flat_index(mono, comp)] = 1.0;
        matrix_.col(basis_.flat_index(mono, comp)) =
            apply_homological_direct(J_, e).coeffs;
      }
  }

  const Eigen::MatrixXd& J() const { return J_; }
  const MonomialBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  PolyVec apply(const PolyVec& poly) const {
    if (poly.coeffs.size() != matrix_.cols())
      throw DimensionError("polynomial degree does not match operator");
    return PolyVec{basis_, matrix_ * poly.coeffs};
  }

 private:
  Eigen::MatrixXd J_;
  MonomialBasis basis_;
  Eigen::MatrixXd matrix_;
};

/// Decomposition V = Im(M) (+) span of canonical complement directions.
///
/// The complement is chosen greedily from the canonical basis directions,
/// scanning the last component first (then monomials in basis order). For a
/// single Jordan block the resonant directions all sit in the last
/// component, so this scan yields the conventional complement.
struct ImageSplit {
  MonomialBasis basis;
  Eigen::MatrixXd image_basis;          // N x r, orthonormal columns
  std::vector<int> complement;          // flat canonical indices, size N - r
  Eigen::PartialPivLU<Eigen::MatrixXd> mixing;  // LU of [image_basis | E]
  int rank = 0;
};

inline ImageSplit split_image(const HomologicalOperator& op, double pivot_tol = 1e-9) {
  const Eigen::MatrixXd& M = op.matrix();
  const int N = static_cast<int>(M.rows());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(pivot_tol);
  const int r = static_cast<int>(qr.rank());

  ImageSplit split;
  split.basis = op.basis();
  split.rank = r;
  split.image_basis = qr.householderQ() * Eigen::MatrixXd::Identity(N, r);

  Eigen::MatrixXd ortho(N, N);
  int ncols = r;
  ortho.leftCols(r) = split.image_basis;
  const int c = split.basis.center_dim;
  for (int comp = c - 1; comp >= 0 && ncols < N; --comp)
    for (int mono = 0; mono < split.basis.monomial_count() && ncols < N; ++mono) {
      const int idx = split.basis.flat_index(mono, comp);
      Eigen::VectorXd v = Eigen::VectorXd::Unit(N, idx);
      v -= ortho.leftCols(ncols) * (ortho.leftCols(ncols).transpose() * v);
      v -= ortho.leftCols(ncols) * (ortho.leftCols(ncols).transpose() * v);
      if (v.norm() > pivot_tol) {
        ortho.col(ncols++) = v.normalized();
        split.complement.push_back(idx);
      }
    }
  if (ncols != N)
    throw NumericalError("complement search did not complete the space");

  Eigen::MatrixXd S(N, N);
  S.leftCols(r) = split.image_basis;
  for (int k = 0; k < N - r; ++k)
    S.col(r + k) = Eigen::VectorXd::Unit(N, split.complement[k]);
  split.mixing.compute(S);
  return split;
}

/// (I - P_I) f: the component of f along the complement directions.
inline PolyVec project_resonant(const ImageSplit& split, const PolyVec& f) {
  if (f.coeffs.size() != split.basis.dim())
    throw DimensionError("polynomial does not match split space");
  const Eigen::VectorXd u = split.mixing.solve(f.coeffs);
  PolyVec out = PolyVec::zero(split.basis);
  for (std::size_t k = 0; k < split.complement.size(); ++k)
    out.coeffs[split.complement[k]] = u[split.rank + static_cast<int>(k)];
  return out;
}

/// Minimum-norm U with M U = P_I f, i.e. the change of variables removing
/// the image component of f. Satisfies M U + project_resonant(f) = f.
inline PolyVec change_of_variables(const ImageSplit& split, const HomologicalOperator& op,
                                   const PolyVec& f) {
  const Eigen::VectorXd target = f.coeffs - project_resonant(split, f).coeffs;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(op.matrix());
  return PolyVec{split.basis, cod.solve(target)};
}

/// Minimum over |q| <= degree_cap and the given non-critical eigenvalues of
/// |lambda^q - mu|, where lambda ranges over the critical multipliers.
/// A small gap warns that a resonance with the hyperbolic part is nearby.
inline double nonresonance_min_gap(const std::vector<std::complex<double>>& critical,
                                   const std::vector<std::complex<double>>& rest,
                                   int degree_cap = 5) {
  if (critical.empty() || rest.empty()) return std::numeric_limits<double>::infinity();
  const int nc = static_cast<int>(critical.size());
  double best = std::numeric_limits<double>::infinity();
  // enumerate exponent vectors q with 2 <= |q| <= degree_cap
  std::vector<int> q(nc, 0);
  std::function<void(int, int)> rec = [&](int var, int remaining) {
    if (var == nc - 1) {
      q[var] = remaining;
      int total = 0;
      for (int e : q) total += e;
      if (total >= 2) {
        std::complex<double> lam(1.0, 0.0);
        for (int i = 0; i < nc; ++i)
          for (int rep = 0; rep < q[i]; ++rep) lam *= critical[i];
        for (const auto& mu : rest) best = std::min(best, std::abs(lam - mu));
      }
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      q[var] = e;
      rec(var + 1, remaining - e);
    }
  };
  for (int total = 2; total <= degree_cap; ++total) rec(0, total);
  return best;
}

// ---------------------------------------------------------------------------
// stable text rendering, shared by the CLI and the golden-file test

namespace detail {

inline std::string format_coeff(double v) {
  std::ostringstream os;
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15)
    os << static_cast<long long>(v);
  else
    os << std::setprecision(12) << v;
  return os.str();
}

inline std::string monomial_string(const MonomialBasis& b, const std::vector<int>& exps) {
  std::string s;
  for (int i = 0; i < b.var_count(); ++i) {
    if (exps[i] == 0) continue;
    if (!s.empty()) s += " ";
    s += (i < b.center_dim) ? "x" + std::to_string(i + 1)
                            : "a" + std::to_string(i - b.center_dim + 1);
    if (exps[i] > 1) s += "^" + std::to_string(exps[i]);
  }
  return s.empty() ? "1" : s;
}

inline std::string component_string(const PolyVec& p, int comp) {
  std::string s;
  for (int mono = 0; mono < p.basis.monomial_count(); ++mono) {
    const double v = p.coeffs[p.basis.flat_index(mono, comp)];
    if (v == 0.0) continue;
    const std::string m = monomial_string(p.basis, p.basis.monomials[mono]);
    if (s.empty()) {
      if (v == 1.0)
        s = m;
      else if (v == -1.0)
        s = "-" + m;
      else
        s = format_coeff(v) + " " + m;
    } else {
      const double av = std::abs(v);
      s += (v > 0) ? " + " : " - ";
      if (av != 1.0) s += format_coeff(av) + " ";
      s += m;
    }
  }
  return s.empty() ? "0" : s;
}

inline std::string element_string(const PolyVec& p) {
  std::string s = "(";
  for (int comp = 0; comp < p.basis.center_dim; ++comp) {
    if (comp) s += ", ";
    s += component_string(p, comp);
  }
  return s + ")";
}

}  // namespace detail

/// Deterministic report of the canonical basis, its images under the
/// homological operator, and the chosen complement. Used by `nf check` and
/// frozen as a golden file in the tests.
inline std::string nf_check_report(const Eigen::MatrixXd& J, int degree, int center_dim,
                                   int param_count) {
  const MonomialBasis basis = enumerate_basis(degree, center_dim, param_count);
  const HomologicalOperator op(J, basis);
  const ImageSplit split = split_image(op);

  std::ostringstream os;
  os << "homological operator check: degree=" << degree << " center_dim=" << center_dim
     << " params=" << param_count << "\n";
  os << "J =\n";
  for (int i = 0; i < J.rows(); ++i) {
    os << " ";
    for (int j = 0; j < J.cols(); ++j) os << " " << detail::format_coeff(J(i, j));
    os << "\n";
  }
  os << "canonical basis (" << basis.monomial_count() << " monomials x "
     << center_dim << " components = " << basis.dim() << " elements):\n";
  for (int mono = 0; mono < basis.monomial_count(); ++mono)
    for (int comp = 0; comp < center_dim; ++comp) {
      PolyVec e = PolyVec::zero(basis);
      e.coeffs[basis.flat_index(mono, comp)] = 1.0;
      os << "  [" << basis.flat_index(mono, comp) << "] " << detail::element_string(e)
         << "\n";
    }
  os << "images under the homological operator:\n";
  for (int mono = 0; mono < basis.monomial_count(); ++mono)
    for (int comp = 0; comp < center_dim; ++comp) {
      PolyVec e = PolyVec::zero(basis);
      e.coeffs[basis.flat_index(mono, comp)] = 1.0;
      os << "  M" << detail::element_string(e) << " = "
         << detail::element_string(op.apply(e)) << "\n";
    }
  os << "image rank: " << split.rank << "\n";
  os << "complement basis (" << split.complement.size() << " elements):\n";
  for (int idx : split.complement) {
    PolyVec e = PolyVec::zero(basis);
    e.coeffs[idx] = 1.0;
    os << "  " << detail::element_string(e) << "\n";
  }
  return os.str();
}

}  // namespace tbdde

#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tbdde/errors.hpp"

namespace tbdde {

/// One monomial c * z(t)^e(0..n-1) * z(t-1)^e(n..2n-1) * a1^e(2n) * a2^e(2n+1)
/// feeding component `target` (1-based) of the right-hand side.
struct MonomialTerm {
  int target = 1;
  double coeff = 0.0;
  std::vector<int> exponents;

  int degree_state(int n) const {
    int d = 0;
    for (int i = 0; i < 2 * n; ++i) d += exponents[i];
    return d;
  }
  int degree_alpha(int n) const { return exponents[2 * n] + exponents[2 * n + 1]; }
  int degree_total(int n) const { return degree_state(n) + degree_alpha(n); }
};

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

/// Polynomial delay differential equation
///     z'(t) = f(z(t), z(t-1), alpha),  z in R^n, alpha in R^2,
/// stored as an explicit list of monomial terms. Immutable after
/// construction; all member functions are pure.
///
/// Every term must have positive degree in the state variables. This rules
/// out constant terms and pure-alpha terms of any degree, so f(0,0,alpha) = 0
/// holds identically.
class DDEModel {
 public:
  DDEModel(int n, std::vector<MonomialTerm> terms)
      : n_(n), terms_(std::move(terms)) {
    if (n_ < 1) throw ModelError("state dimension must be positive");
    for (const auto& t : terms_) {
      if (t.target < 1 || t.target > n_)
        throw ModelError("term target out of range 1.." + std::to_string(n_));
      if (static_cast<int>(t.exponents.size()) != 2 * n_ + 2)
        throw ModelError("term exponent vector must have length " +
                         std::to_string(2 * n_ + 2));
      for (int e : t.exponents)
        if (e < 0) throw ModelError("negative exponent");
      if (t.degree_state(n_) == 0)
        throw ModelError(t.degree_total(n_) == 0
                             ? "constant term not allowed"
                             : "pure-alpha term not allowed (f(0,0,alpha) must vanish)");
    }
  }

  int dim() const { return n_; }
  const std::vector<MonomialTerm>& terms() const { return terms_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& z_now, const Eigen::VectorXd& z_delay,
                       const Eigen::Vector2d& alpha) const {
    check_dims(z_now, z_delay);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
    for (const auto& t : terms_) out[t.target - 1] += term_value(t, z_now, z_delay, alpha);
    return out;
  }

  /// d f / d z(t), exact polynomial derivative evaluated at the given point.
  Eigen::MatrixXd jacobian_state(const Eigen::VectorXd& z_now,
                                 const Eigen::VectorXd& z_delay,
                                 const Eigen::Vector2d& alpha) const {
    check_dims(z_now, z_delay);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& t : terms_)
      for (int j = 0; j < n_; ++j) {
        int e = t.exponents[j];
        if (e == 0) continue;
        jac(t.target - 1, j) +=
            e * ipow(z_now[j], e - 1) * term_value_skipping(t, j, z_now, z_delay, alpha);
      }
    return jac;
  }

  /// d f / d z(t-1).
  Eigen::MatrixXd jacobian_delay(const Eigen::VectorXd& z_now,
                                 const Eigen::VectorXd& z_delay,
                                 const Eigen::Vector2d& alpha) const {
    check_dims(z_now, z_delay);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& t : terms_)
      for (int j = 0; j < n_; ++j) {
        int e = t.exponents[n_ + j];
        if (e == 0) continue;
        jac(t.target - 1, j) +=
            e * ipow(z_delay[j], e - 1) * term_value_skipping(t, n_ + j, z_now, z_delay, alpha);
      }
    return jac;
  }

 private:
  void check_dims(const Eigen::VectorXd& z_now, const Eigen::VectorXd& z_delay) const {
    if (z_now.size() != n_ || z_delay.size() != n_)
      throw DimensionError("state vector length does not match model dimension");
  }

  double term_value(const MonomialTerm& t, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& w, const Eigen::Vector2d& alpha) const {
    double v = t.coeff;
    for (int i = 0; i < n_; ++i) v *= ipow(z[i], t.exponents[i]);
    for (int i = 0; i < n_; ++i) v *= ipow(w[i], t.exponents[n_ + i]);
    v *= ipow(alpha[0], t.exponents[2 * n_]);
    v *= ipow(alpha[1], t.exponents[2 * n_ + 1]);
    return v;
  }

  // Product of all factors except the one at flat variable index `skip`.
  double term_value_skipping(const MonomialTerm& t, int skip, const Eigen::VectorXd& z,
                             const Eigen::VectorXd& w, const Eigen::Vector2d& alpha) const {
    double v = t.coeff;
    for (int i = 0; i < n_; ++i)
      if (i != skip) v *= ipow(z[i], t.exponents[i]);
    for (int i = 0; i < n_; ++i)
      if (n_ + i != skip) v *= ipow(w[i], t.exponents[n_ + i]);
    if (2 * n_ != skip) v *= ipow(alpha[0], t.exponents[2 * n_]);
    if (2 * n_ + 1 != skip) v *= ipow(alpha[1], t.exponents[2 * n_ + 1]);
    return v;
  }

  int n_;
  std::vector<MonomialTerm> terms_;
};

/// State and delay Jacobians of f at the origin at alpha = 0.
struct LinearData {
  Eigen::MatrixXd A;  // d f / d z(t)   at (0, 0, 0)
  Eigen::MatrixXd B;  // d f / d z(t-1) at (0, 0, 0)
};

/// Coefficient tensors of the total-degree-2 part of f.
///
/// Storage convention for the symmetric blocks: a term c * z_i z_j with
/// i != j contributes c/2 to F_i column j and c/2 to F_j column i, so that
/// sum_i F_i z_i z reproduces the model exactly; likewise for G with the
/// delayed state. E needs no symmetrization (distinct variable groups).
struct QuadraticData {
  Eigen::MatrixXd A1, A2;             // alpha_k z(t) cross terms
  Eigen::MatrixXd B1, B2;             // alpha_k z(t-1) cross terms
  std::vector<Eigen::MatrixXd> E;     // sum_i E_i z_i(t)   z(t-1)
  std::vector<Eigen::MatrixXd> F;     // sum_i F_i z_i(t)   z(t)
  std::vector<Eigen::MatrixXd> G;     // sum_i G_i z_i(t-1) z(t-1)

  /// Reconstructed degree-2 part, for cross-checks against direct evaluation.
  Eigen::VectorXd eval(const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                       const Eigen::Vector2d& alpha) const {
    const int n = static_cast<int>(A1.rows());
    Eigen::VectorXd out = alpha[0] * (A1 * z) + alpha[1] * (A2 * z) +
                          alpha[0] * (B1 * w) + alpha[1] * (B2 * w);
    for (int i = 0; i < n; ++i) out += z[i] * (E[i] * w) + z[i] * (F[i] * z) + w[i] * (G[i] * w);
    return out;
  }
};

/// Exact coefficient read of the alpha-free linear part.
inline LinearData extract_linear(const DDEModel& model) {
  const int n = model.dim();
  LinearData lin{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (const auto& t : model.terms()) {
    if (t.degree_total(n) != 1) continue;
    for (int i = 0; i < n; ++i) {
      if (t.exponents[i] == 1) lin.A(t.target - 1, i) += t.coeff;
      if (t.exponents[n + i] == 1) lin.B(t.target - 1, i) += t.coeff;
    }
  }
  return lin;
}

/// Exact coefficient read of all total-degree-2 terms.
inline QuadraticData extract_quadratic(const DDEModel& model) {
  const int n = model.dim();
  QuadraticData q;
  q.A1 = q.A2 = q.B1 = q.B2 = Eigen::MatrixXd::Zero(n, n);
  q.E.assign(n, Eigen::MatrixXd::Zero(n, n));
  q.F.assign(n, Eigen::MatrixXd::Zero(n, n));
  q.G.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (const auto& t : model.terms()) {
    if (t.degree_total(n) != 2) continue;
    const int row = t.target - 1;
    const int da = t.degree_alpha(n);
    if (da == 1) {
      // alpha_k times a single state variable
      const bool a1 = t.exponents[2 * n] == 1;
      for (int i = 0; i < n; ++i) {
        if (t.exponents[i] == 1) (a1 ? q.A1 : q.A2)(row, i) += t.coeff;
        if (t.exponents[n + i] == 1) (a1 ? q.B1 : q.B2)(row, i) += t.coeff;
      }
      continue;
    }
    // pure state quadratic
    int inow = -1, jnow = -1, idel = -1, jdel = -1;
    for (int i = 0; i < n; ++i) {
      if (t.exponents[i] == 2) inow = jnow = i;
      if (t.exponents[i] == 1) (inow < 0 ? inow : jnow) = i;
      if (t.exponents[n + i] == 2) idel = jdel = i;
      if (t.exponents[n + i] == 1) (idel < 0 ? idel : jdel) = i;
    }
    if (inow >= 0 && idel >= 0) {
      q.E[inow](row, idel) += t.coeff;
    } else if (inow >= 0) {
      if (inow == jnow) {
        q.F[inow](row, inow) += t.coeff;
      } else {
        q.F[inow](row, jnow) += 0.5 * t.coeff;
        q.F[jnow](row, inow) += 0.5 * t.coeff;
      }
    } else {
      if (idel == jdel) {
        q.G[idel](row, idel) += t.coeff;
      } else {
        q.G[idel](row, jdel) += 0.5 * t.coeff;
        q.G[jdel](row, idel) += 0.5 * t.coeff;
      }
    }
  }
  return q;
}

/// Parses the line-oriented model format:
///   n=<int>
///   term <target> <coeff> <e1> ... <e_{2n+2}>
/// Lines whose first non-blank character is '#' are comments.
inline DDEModel parse_model(std::istream& in) {
  int n = -1;
  std::vector<MonomialTerm> terms;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line.substr(pos));
    if (n < 0) {
      std::string head;
      ls >> head;
      if (head.rfind("n=", 0) != 0)
        throw ParseError(lineno, "expected header 'n=<int>' before any term");
      try {
        n = std::stoi(head.substr(2));
      } catch (const std::exception&) {
        throw ParseError(lineno, "invalid dimension in 'n=' header");
      }
      if (n < 1) throw ParseError(lineno, "dimension must be positive");
      std::string rest;
      if (ls >> rest) throw ParseError(lineno, "unexpected trailing tokens after header");
      continue;
    }
    std::string kw;
    ls >> kw;
    if (kw != "term") throw ParseError(lineno, "expected 'term', got '" + kw + "'");
    MonomialTerm t;
    if (!(ls >> t.target >> t.coeff))
      throw ParseError(lineno, "expected '<target> <coeff>' after 'term'");
    t.exponents.resize(2 * n + 2);
    for (int i = 0; i < 2 * n + 2; ++i)
      if (!(ls >> t.exponents[i]))
        throw ParseError(lineno, "expected " + std::to_string(2 * n + 2) +
                                     " exponents, got " + std::to_string(i));
    std::string rest;
    if (ls >> rest) throw ParseError(lineno, "unexpected trailing tokens after term");
    terms.push_back(std::move(t));
  }
  if (n < 0) throw ParseError(lineno, "missing 'n=<int>' header");
  try {
    return DDEModel(n, std::move(terms));
  } catch (const ModelError& e) {
    throw ParseError(lineno, std::string("invalid model: ") + e.what());
  }
}

inline DDEModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file: " + path);
  return parse_model(in);
}

}  // namespace tbdde

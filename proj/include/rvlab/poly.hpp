#pragma once

#include <map>
#include <string>
#include <vector>

#include "rvlab/padic.hpp"

namespace rvlab {

// One coefficient summand n · pi^a · u^b, where pi is the uniformizer of the
// coefficient base field and u its unramified generator.
struct CoeffTerm {
  long long n = 0;
  int pi_pow = 0;
  int u_pow = 0;
};

using Monomial = std::map<std::string, uint32_t>;  // variable -> exponent

// A multivariate polynomial over VF variables, parsed from text. Constants:
// integers, `pi` (uniformizer; `t` is an alias), `u` (unramified generator).
class PolyExpr {
 public:
  PolyExpr() = default;

  static PolyExpr parse(const std::string& text);
  static PolyExpr constant(long long v);
  static PolyExpr variable(const std::string& name);
  static PolyExpr const_pi();  // the uniformizer as a coefficient symbol
  static PolyExpr const_u();   // the unramified generator

  PolyExpr add(const PolyExpr& o) const;
  PolyExpr sub(const PolyExpr& o) const;
  PolyExpr mul(const PolyExpr& o) const;
  PolyExpr pow(uint32_t k) const;
  PolyExpr neg() const;
  PolyExpr derivative(const std::string& var) const;

  bool is_zero() const { return terms_.empty(); }
  std::vector<std::string> variables() const;  // sorted, deduplicated
  uint32_t total_degree() const;
  uint32_t degree_in(const std::string& var) const;
  bool uses_constants() const;  // any pi/u in coefficients

  // Stable canonical text (sorted monomials), used for cache keys and reports.
  std::string canonical_text() const;

  const std::map<Monomial, std::vector<CoeffTerm>>& terms() const { return terms_; }

 private:
  void consolidate();
  std::map<Monomial, std::vector<CoeffTerm>> terms_;
};

// A PolyExpr bound to a concrete field: coefficients canonicalized to exact
// digit strings at a working precision. When `constants_from` is given, pi/u
// mean that subfield's uniformizer and generator, embedded into `field`.
class BoundPoly {
 public:
  BoundPoly(const PolyExpr& expr, FieldPtr field, int prec, FieldPtr constants_from = nullptr);

  const FieldPtr& field() const { return field_; }
  const std::vector<std::string>& variables() const { return vars_; }
  int precision() const { return prec_; }
  bool is_zero_poly() const { return monomials_.empty(); }

  // Values aligned with variables(); result precision is the min of the
  // binding precision and the value precisions.
  Padic eval(const std::vector<Padic>& values) const;

  BoundPoly derivative(size_t var_index) const;

  // Dense univariate coefficient list a_0..a_d (requires <= 1 variable).
  std::vector<Padic> univariate_coeffs() const;

  uint32_t degree_in(size_t var_index) const;

 private:
  BoundPoly() = default;
  friend Padic canonicalize_expr(const PolyExpr&, const FieldPtr&, int);
  FieldPtr field_;
  int prec_ = 0;
  std::vector<std::string> vars_;
  struct BoundMonomial {
    std::vector<uint32_t> exps;  // aligned with vars_
    Padic coeff;
  };
  std::vector<BoundMonomial> monomials_;
};

// Canonical digit form of a variable-free expression over integers, pi, u.
Padic canonicalize_expr(const PolyExpr& expr, const FieldPtr& field, int prec);

}  // namespace rvlab

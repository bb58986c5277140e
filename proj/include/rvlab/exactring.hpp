#pragma once

// Exact arithmetic in Z[y, x] / (G(y), E(x)) for a mixed-characteristic field:
// a free Z-module of rank e*f, enough to decide whether a polynomial value at
// a finite digit string is exactly zero (no truncation involved).

#include <vector>

#include "rvlab/padic.hpp"
#include "rvlab/poly.hpp"
#include "rvlab/rational.hpp"

namespace rvlab {

class ExactRing {
 public:
  explicit ExactRing(FieldPtr field);

  // coords: e*f integers, coefficient of y^j x^i at index i*f + j.
  struct Elem {
    std::vector<Int> c;
  };

  Elem zero() const;
  Elem from_int(long long v) const;
  Elem from_padic_digits(const Padic& x) const;  // the exact finite digit string

  Elem add(const Elem& a, const Elem& b) const;
  Elem sub(const Elem& a, const Elem& b) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem scale(const Elem& a, const Int& k) const;

  bool is_zero(const Elem& a) const;

 private:
  void reduce(std::vector<Int>& wide) const;  // wide has 2e x-rows of 2f y-slots

  FieldPtr field_;
  uint32_t e_, f_;
  std::vector<std::vector<Int>> eis_;  // integer coefficients of E, reduced mod G
};

// Exact zero test for an equicharacteristic value: every digit vanishes at a
// precision that already captures the full polynomial value.
bool equichar_exact_zero(const Padic& x);

// Whether f(values) is exactly zero, for exact finite-digit values aligned
// with f's sorted variable list. pi/u in coefficients mean const_base's
// (which must sit below `field` with an unramified or trivial step when the
// fields differ). Returns false when the test cannot be run exactly.
bool exact_poly_zero(const PolyExpr& f, const FieldPtr& field, const FieldPtr& const_base,
                     const std::vector<Padic>& values);

}  // namespace rvlab

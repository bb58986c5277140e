#pragma once

// Internal digit engine: carry-propagating canonicalization and ring
// operations on raw π-digit matrices. Padic wraps these; Field uses them
// directly while bootstrapping the digit expansion of p.

#include <cstdint>
#include <vector>

#include "rvlab/field.hpp"

namespace rvlab::detail {

using I128 = __int128;

// Digit matrix: row i = the π^i digit, an FqElem (length f, entries in [0,p)).
using DigitMat = std::vector<FqElem>;

// Scratch form: rows of integer y-polynomials of width 2f, awaiting reduction
// modulo (g, p) and carry propagation through the expansion of p.
struct Loose {
  int prec = 0;
  uint32_t width = 0;
  std::vector<I128> c;

  Loose(int prec_, uint32_t width_) : prec(prec_), width(width_), c(size_t(prec_) * width_, 0) {}
  I128& at(int i, uint32_t j) { return c[size_t(i) * width + j]; }
  I128 get(int i, uint32_t j) const { return c[size_t(i) * width + j]; }
};

// Context: everything canonicalization needs from the ambient field.
struct DigitCtx {
  bool equichar;
  const Fq* fq;
  uint32_t e;
  const std::vector<FqElem>* pexp;  // may be inspected only below the target precision

  explicit DigitCtx(const Field& k)
      : equichar(k.equichar()), fq(&k.fq()), e(k.e()), pexp(&k.p_expansion()) {}
  DigitCtx(bool eq, const Fq* fq_, uint32_t e_, const std::vector<FqElem>* px)
      : equichar(eq), fq(fq_), e(e_), pexp(px) {}
};

DigitMat canonicalize(const DigitCtx& ctx, Loose& loose);

DigitMat digits_zero(const DigitCtx& ctx, int prec);
DigitMat digits_from_int(const DigitCtx& ctx, long long v, int prec);
// Value of an integer polynomial in the unramified generator y.
DigitMat digits_from_ypoly(const DigitCtx& ctx, const std::vector<long long>& ypoly, int prec);

DigitMat digits_add(const DigitCtx& ctx, const DigitMat& a, const DigitMat& b);
DigitMat digits_sub(const DigitCtx& ctx, const DigitMat& a, const DigitMat& b);
DigitMat digits_mul(const DigitCtx& ctx, const DigitMat& a, const DigitMat& b);
DigitMat digits_neg(const DigitCtx& ctx, const DigitMat& a);

// Index of the first nonzero row; -1 when all rows vanish.
int digits_ord(const DigitMat& a, const Fq& fq);

// z with a z = 1 mod π^prec; requires a unit (nonzero constant row).
DigitMat digits_unit_inv(const DigitCtx& ctx, const DigitMat& a, int prec);

DigitMat digits_truncate(const DigitMat& a, int prec);
DigitMat digits_pad(const DigitMat& a, const Fq& fq, int prec);       // extend with zero rows
DigitMat digits_shift_up(const DigitMat& a, const Fq& fq, int k);     // multiply by π^k, same prec
DigitMat digits_shift_down_exact(const DigitMat& a, int k);           // divide by π^k; rows below k must vanish

bool digits_equal(const DigitMat& a, const DigitMat& b);

}  // namespace rvlab::detail

#include "rvlab/digits.hpp"

#include <algorithm>

namespace rvlab::detail {

namespace {

// Reduce row i of the loose form modulo the monic integer lift of g, then
// split each coefficient into digit + carry, pushing carries through the
// expansion of p (levels >= i + e). Rows are processed bottom-up, so carries
// never land on an already-finished row.
void settle_row(const DigitCtx& ctx, Loose& l, int i, DigitMat& out) {
  const Fq& fq = *ctx.fq;
  const uint32_t f = fq.f();
  const uint32_t p = fq.p();
  const auto& g = fq.modulus();

  for (uint32_t d = l.width; d-- > f;) {
    I128 v = l.get(i, d);
    if (v == 0) continue;
    l.at(i, d) = 0;
    for (uint32_t j = 0; j < f; ++j)
      if (g[j]) l.at(i, d - f + j) -= v * (I128)g[j];
  }

  FqElem digit(f, 0);
  for (uint32_t j = 0; j < f; ++j) {
    I128 a = l.get(i, j);
    I128 r = a % (I128)p;
    if (r < 0) r += p;
    I128 carry = (a - r) / (I128)p;
    digit[j] = uint32_t(r);
    l.at(i, j) = 0;
    if (carry != 0 && !ctx.equichar) {
      const auto& pexp = *ctx.pexp;
      for (uint32_t k = ctx.e; int(i + k) < l.prec && k < pexp.size(); ++k) {
        const FqElem& pd = pexp[k];
        for (uint32_t j2 = 0; j2 < f; ++j2)
          if (pd[j2]) l.at(i + k, j + j2) += carry * (I128)pd[j2];
      }
    }
  }
  out[i] = std::move(digit);
}

}  // namespace

DigitMat canonicalize(const DigitCtx& ctx, Loose& loose) {
  DigitMat out(loose.prec);
  for (int i = 0; i < loose.prec; ++i) settle_row(ctx, loose, i, out);
  return out;
}

DigitMat digits_zero(const DigitCtx& ctx, int prec) {
  return DigitMat(prec, FqElem(ctx.fq->f(), 0));
}

DigitMat digits_from_int(const DigitCtx& ctx, long long v, int prec) {
  Loose l(prec, 2 * ctx.fq->f());
  if (prec > 0) l.at(0, 0) = v;
  return canonicalize(ctx, l);
}

DigitMat digits_from_ypoly(const DigitCtx& ctx, const std::vector<long long>& ypoly, int prec) {
  Loose l(prec, 2 * ctx.fq->f());
  const uint32_t f = ctx.fq->f();
  if (prec > 0) {
    // fold y-degrees >= 2f down with repeated multiplication by y's reduction;
    // cheap since inputs are small, so just reduce via Fq when the degree is high
    if (ypoly.size() <= 2 * f) {
      for (size_t j = 0; j < ypoly.size(); ++j) l.at(0, uint32_t(j)) = ypoly[j];
    } else {
      // split into chunks of y-degree < f and combine through Fq-lifted powers
      std::vector<long long> cur(ypoly);
      // reduce degree iteratively using the monic modulus over the integers
      const auto& g = ctx.fq->modulus();
      while (cur.size() > 2 * f) {
        size_t d = cur.size() - 1;
        long long lead = cur[d];
        cur.pop_back();
        for (uint32_t j = 0; j < f; ++j) cur[d - f + j] -= lead * (long long)g[j];
      }
      for (size_t j = 0; j < cur.size(); ++j) l.at(0, uint32_t(j)) = cur[j];
    }
  }
  return canonicalize(ctx, l);
}

DigitMat digits_add(const DigitCtx& ctx, const DigitMat& a, const DigitMat& b) {
  int prec = int(std::min(a.size(), b.size()));
  const uint32_t f = ctx.fq->f();
  Loose l(prec, 2 * f);
  for (int i = 0; i < prec; ++i)
    for (uint32_t j = 0; j < f; ++j) l.at(i, j) = (I128)a[i][j] + (I128)b[i][j];
  return canonicalize(ctx, l);
}

DigitMat digits_sub(const DigitCtx& ctx, const DigitMat& a, const DigitMat& b) {
  int prec = int(std::min(a.size(), b.size()));
  const uint32_t f = ctx.fq->f();
  Loose l(prec, 2 * f);
  for (int i = 0; i < prec; ++i)
    for (uint32_t j = 0; j < f; ++j) l.at(i, j) = (I128)a[i][j] - (I128)b[i][j];
  return canonicalize(ctx, l);
}

DigitMat digits_neg(const DigitCtx& ctx, const DigitMat& a) {
  int prec = int(a.size());
  const uint32_t f = ctx.fq->f();
  Loose l(prec, 2 * f);
  for (int i = 0; i < prec; ++i)
    for (uint32_t j = 0; j < f; ++j) l.at(i, j) = -(I128)a[i][j];
  return canonicalize(ctx, l);
}

DigitMat digits_mul(const DigitCtx& ctx, const DigitMat& a, const DigitMat& b) {
  int prec = int(std::min(a.size(), b.size()));
  const uint32_t f = ctx.fq->f();
  Loose l(prec, 2 * f);
  for (int i1 = 0; i1 < int(a.size()) && i1 < prec; ++i1) {
    for (int i2 = 0; i2 + i1 < prec && i2 < int(b.size()); ++i2) {
      for (uint32_t j1 = 0; j1 < f; ++j1) {
        if (!a[i1][j1]) continue;
        for (uint32_t j2 = 0; j2 < f; ++j2)
          if (b[i2][j2]) l.at(i1 + i2, j1 + j2) += (I128)a[i1][j1] * (I128)b[i2][j2];
      }
    }
  }
  return canonicalize(ctx, l);
}

int digits_ord(const DigitMat& a, const Fq& fq) {
  for (size_t i = 0; i < a.size(); ++i)
    if (!fq.is_zero(a[i])) return int(i);
  return -1;
}

DigitMat digits_unit_inv(const DigitCtx& ctx, const DigitMat& a, int prec) {
  const Fq& fq = *ctx.fq;
  if (a.empty() || fq.is_zero(a[0]))
    fail(ErrorCode::NonUnitInverse, "unit_inv requires valuation exactly 0");
  if (int(a.size()) < prec)
    fail(ErrorCode::InsufficientPrecision, "unit_inv target precision exceeds operand precision");
  DigitMat z(1);
  z[0] = fq.inv(a[0]);
  int cur = 1;
  while (cur < prec) {
    cur = std::min(2 * cur, prec);
    DigitMat zp = digits_pad(z, fq, cur);
    DigitMat ax = digits_truncate(a, cur);
    DigitMat az = digits_mul(ctx, ax, zp);
    DigitMat two = digits_from_int(ctx, 2, cur);
    DigitMat corr = digits_sub(ctx, two, az);
    z = digits_mul(ctx, zp, corr);
  }
  return z;
}

DigitMat digits_truncate(const DigitMat& a, int prec) {
  DigitMat r(a.begin(), a.begin() + std::min<size_t>(a.size(), prec));
  return r;
}

DigitMat digits_pad(const DigitMat& a, const Fq& fq, int prec) {
  DigitMat r = a;
  while (int(r.size()) < prec) r.push_back(FqElem(fq.f(), 0));
  return r;
}

DigitMat digits_shift_up(const DigitMat& a, const Fq& fq, int k) {
  DigitMat r(a.size(), FqElem(fq.f(), 0));
  for (size_t i = 0; i + k < a.size(); ++i) r[i + k] = a[i];
  return r;
}

DigitMat digits_shift_down_exact(const DigitMat& a, int k) {
  DigitMat r(a.begin() + std::min<size_t>(k, a.size()), a.end());
  return r;
}

bool digits_equal(const DigitMat& a, const DigitMat& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace rvlab::detail

#include "rvlab/fq.hpp"

#include <algorithm>
#include <numeric>

namespace rvlab {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ReduciblePolynomial: return "ReduciblePolynomial";
    case ErrorCode::NotEisenstein: return "NotEisenstein";
    case ErrorCode::UnsupportedEquichar: return "UnsupportedEquichar";
    case ErrorCode::UnsupportedExtension: return "UnsupportedExtension";
    case ErrorCode::NotIntegral: return "NotIntegral";
    case ErrorCode::PrecisionMismatch: return "PrecisionMismatch";
    case ErrorCode::NonUnitInverse: return "NonUnitInverse";
    case ErrorCode::UnrelatedFields: return "UnrelatedFields";
    case ErrorCode::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorCode::NotDivisor: return "NotDivisor";
    case ErrorCode::DepthMismatch: return "DepthMismatch";
    case ErrorCode::ZeroLeadingTermQuery: return "ZeroLeadingTermQuery";
    case ErrorCode::PredicateFails: return "PredicateFails";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SortError: return "SortError";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::NeedMoreTerms: return "NeedMoreTerms";
    case ErrorCode::GuardFailed: return "GuardFailed";
    case ErrorCode::SnapAmbiguous: return "SnapAmbiguous";
    case ErrorCode::UncertifiedTerm: return "UncertifiedTerm";
    case ErrorCode::NotInCatalog: return "NotInCatalog";
    case ErrorCode::DegenerateRegression: return "DegenerateRegression";
    case ErrorCode::NotExistential: return "NotExistential";
    case ErrorCode::CorruptCacheEntry: return "CorruptCacheEntry";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

namespace {

using Poly = std::vector<uint32_t>;  // low-to-high over F_p, no trailing zeros enforced by trim

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul_mod(const Poly& a, const Poly& b, const Poly& g, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint64_t> acc(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j) acc[i + j] += uint64_t(a[i]) * b[j] % p;
  }
  Poly c(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) c[i] = uint32_t(acc[i] % p);
  // reduce modulo monic g
  size_t f = g.size() - 1;
  for (size_t d = c.size(); d-- > f;) {
    uint32_t lead = c[d];
    if (!lead) continue;
    c[d] = 0;
    for (size_t j = 0; j < f; ++j) {
      uint64_t t = uint64_t(lead) * g[j] % p;
      c[d - f + j] = uint32_t((c[d - f + j] + p - t) % p);
    }
  }
  c.resize(std::min(c.size(), f));
  trim(c);
  return c;
}

Poly poly_mod(Poly a, const Poly& m, uint32_t p) {
  trim(a);
  if (m.empty()) return a;
  size_t dm = m.size() - 1;
  uint32_t lead_inv = 1;
  {  // modular inverse of m's leading coefficient
    uint32_t l = m.back();
    for (uint32_t x = 1; x < p; ++x)
      if (uint64_t(l) * x % p == 1) { lead_inv = x; break; }
  }
  while (a.size() > dm) {
    uint32_t c = uint32_t(uint64_t(a.back()) * lead_inv % p);
    size_t shift = a.size() - 1 - dm;
    if (c) {
      for (size_t j = 0; j < m.size(); ++j) {
        uint64_t t = uint64_t(c) * m[j] % p;
        a[shift + j] = uint32_t((a[shift + j] + p - t) % p);
      }
    }
    a.pop_back();
    trim(a);
    if (a.size() <= dm) break;
  }
  trim(a);
  return a;
}

Poly poly_gcd(Poly a, Poly b, uint32_t p) {
  trim(a); trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Poly frobenius_pow(const Poly& base, const Poly& g, uint32_t p) {
  // base^p mod g by square-and-multiply
  Poly result{1};
  Poly sq = base;
  uint32_t n = p;
  while (n) {
    if (n & 1) result = poly_mul_mod(result, sq, g, p);
    sq = poly_mul_mod(sq, sq, g, p);
    n >>= 1;
  }
  return result;
}

}  // namespace

bool fp_poly_irreducible(uint32_t p, const std::vector<uint32_t>& g) {
  if (g.size() < 2 || g.back() != 1) return false;
  size_t f = g.size() - 1;
  if (f == 1) return true;
  if (g[0] == 0) return false;  // y divides g
  // x^{p^k} mod g, checking gcd(g, x^{p^k} - x) = 1 for 0 < k < f
  Poly xp{0, 1};
  for (size_t k = 1; k < f; ++k) {
    xp = frobenius_pow(xp, g, p);
    Poly diff = xp;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = uint32_t((diff[1] + p - 1) % p);
    trim(diff);
    Poly d = poly_gcd(g, diff, p);
    if (d.size() > 1) return false;
  }
  return true;
}

Fq::Fq(uint32_t p, std::vector<uint32_t> g) : p_(p), g_(std::move(g)) {
  if (g_.size() < 2 || g_.back() != 1)
    fail(ErrorCode::ReduciblePolynomial, "residue polynomial must be monic of degree >= 1");
  for (uint32_t c : g_)
    if (c >= p_) fail(ErrorCode::ReduciblePolynomial, "residue polynomial coefficient out of range");
  f_ = uint32_t(g_.size() - 1);
  if (!fp_poly_irreducible(p_, g_))
    fail(ErrorCode::ReduciblePolynomial, "residue polynomial is reducible over F_p");
  q_ = 1;
  for (uint32_t i = 0; i < f_; ++i) {
    q_ *= p_;
    if (q_ > (uint64_t(1) << 48)) fail(ErrorCode::CapExceeded, "residue field too large");
  }
  if (q_ <= kTableLimit && f_ > 1) build_tables();
}

FqElem Fq::one() const {
  FqElem a(f_, 0);
  a[0] = 1;
  return a;
}

FqElem Fq::from_int(long long v) const {
  FqElem a(f_, 0);
  long long r = v % (long long)p_;
  if (r < 0) r += p_;
  a[0] = uint32_t(r);
  return a;
}

FqElem Fq::gen() const {
  if (f_ < 2) fail(ErrorCode::Internal, "prime residue field has no generator above F_p");
  FqElem a(f_, 0);
  a[1] = 1;
  return a;
}

bool Fq::is_zero(const FqElem& a) const {
  for (uint32_t c : a)
    if (c) return false;
  return true;
}

FqElem Fq::add(const FqElem& a, const FqElem& b) const {
  FqElem c(f_);
  for (uint32_t j = 0; j < f_; ++j) c[j] = (a[j] + b[j]) % p_;
  return c;
}

FqElem Fq::sub(const FqElem& a, const FqElem& b) const {
  FqElem c(f_);
  for (uint32_t j = 0; j < f_; ++j) c[j] = (a[j] + p_ - b[j]) % p_;
  return c;
}

FqElem Fq::neg(const FqElem& a) const {
  FqElem c(f_);
  for (uint32_t j = 0; j < f_; ++j) c[j] = a[j] ? p_ - a[j] : 0;
  return c;
}

FqElem Fq::mul_poly(const FqElem& a, const FqElem& b) const {
  std::vector<uint64_t> acc(2 * f_ - 1, 0);
  for (uint32_t i = 0; i < f_; ++i) {
    if (!a[i]) continue;
    for (uint32_t j = 0; j < f_; ++j) acc[i + j] += uint64_t(a[i]) * b[j];
  }
  for (size_t d = acc.size(); d-- > f_;) {
    uint64_t lead = acc[d] % p_;
    acc[d] = 0;
    if (!lead) continue;
    for (uint32_t j = 0; j < f_; ++j)
      acc[d - f_ + j] += lead * (p_ - g_[j]);
  }
  FqElem c(f_);
  for (uint32_t j = 0; j < f_; ++j) c[j] = uint32_t(acc[j] % p_);
  return c;
}

FqElem Fq::mul(const FqElem& a, const FqElem& b) const {
  if (f_ == 1) return {uint32_t(uint64_t(a[0]) * b[0] % p_)};
  if (tabled_) {
    uint64_t ia = index(a), ib = index(b);
    if (ia == 0 || ib == 0) return zero();
    uint64_t k = (uint64_t(log_[ia]) + log_[ib]) % (q_ - 1);
    return from_index(exp_[k]);
  }
  return mul_poly(a, b);
}

FqElem Fq::inv(const FqElem& a) const {
  if (is_zero(a)) fail(ErrorCode::NonUnitInverse, "zero has no inverse in the residue field");
  if (f_ == 1) {
    for (uint32_t x = 1; x < p_; ++x)
      if (uint64_t(a[0]) * x % p_ == 1) return {x};
    fail(ErrorCode::Internal, "no inverse mod p");
  }
  if (tabled_) {
    uint64_t k = (q_ - 1 - log_[index(a)]) % (q_ - 1);
    return from_index(exp_[k]);
  }
  return pow(a, q_ - 2);
}

FqElem Fq::pow(FqElem a, uint64_t n) const {
  FqElem r = one();
  while (n) {
    if (n & 1) r = mul(r, a);
    a = mul(a, a);
    n >>= 1;
  }
  return r;
}

uint64_t Fq::index(const FqElem& a) const {
  uint64_t idx = 0;
  for (uint32_t j = f_; j-- > 0;) idx = idx * p_ + a[j];
  return idx;
}

FqElem Fq::from_index(uint64_t idx) const {
  FqElem a(f_);
  for (uint32_t j = 0; j < f_; ++j) {
    a[j] = uint32_t(idx % p_);
    idx /= p_;
  }
  return a;
}

FqElem Fq::reduce_poly(const std::vector<long long>& coeffs) const {
  FqElem acc = zero();
  FqElem y = (f_ > 1) ? gen() : one();
  FqElem ypow = one();
  for (size_t i = 0; i < coeffs.size(); ++i) {
    long long r = coeffs[i] % (long long)p_;
    if (r < 0) r += p_;
    if (r) {
      FqElem term = ypow;
      for (uint32_t j = 0; j < f_; ++j) term[j] = uint32_t(uint64_t(term[j]) * r % p_);
      acc = add(acc, term);
    }
    if (i + 1 < coeffs.size()) ypow = mul(ypow, y);
  }
  return acc;
}

void Fq::build_tables() {
  // find a multiplicative generator by trial
  std::vector<uint64_t> prime_factors;
  {
    uint64_t n = q_ - 1;
    for (uint64_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        prime_factors.push_back(d);
        while (n % d == 0) n /= d;
      }
    }
    if (n > 1) prime_factors.push_back(n);
  }
  FqElem gen_elem;
  for (uint64_t cand = 1; cand < q_; ++cand) {
    FqElem a = from_index(cand);
    if (is_zero(a)) continue;
    bool primitive = true;
    for (uint64_t pf : prime_factors) {
      FqElem t = a;
      // pow without tables (not built yet)
      FqElem r = one();
      uint64_t n = (q_ - 1) / pf;
      while (n) {
        if (n & 1) r = (f_ == 1) ? FqElem{uint32_t(uint64_t(r[0]) * t[0] % p_)} : mul_poly(r, t);
        t = (f_ == 1) ? FqElem{uint32_t(uint64_t(t[0]) * t[0] % p_)} : mul_poly(t, t);
        n >>= 1;
      }
      if (r == one()) { primitive = false; break; }
    }
    if (primitive) { gen_elem = a; break; }
  }
  log_.assign(q_, 0);
  exp_.assign(q_ - 1, 0);
  FqElem cur = one();
  for (uint64_t k = 0; k < q_ - 1; ++k) {
    uint64_t idx = index(cur);
    exp_[k] = idx;
    log_[idx] = uint32_t(k);
    cur = mul_poly(cur, gen_elem);
  }
  tabled_ = true;
}

}  // namespace rvlab

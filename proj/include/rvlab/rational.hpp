#pragma once

#include <gmp.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rvlab {

// RAII wrapper over mpz_t.
class Int {
 public:
  Int() { mpz_init(z_); }
  Int(long long v) { mpz_init_set_si(z_, v); }
  explicit Int(const std::string& s, int base = 10) { mpz_init_set_str(z_, s.c_str(), base); }
  Int(const Int& o) { mpz_init_set(z_, o.z_); }
  Int(Int&& o) noexcept {
    mpz_init(z_);
    mpz_swap(z_, o.z_);
  }
  Int& operator=(const Int& o) {
    if (this != &o) mpz_set(z_, o.z_);
    return *this;
  }
  Int& operator=(Int&& o) noexcept {
    mpz_swap(z_, o.z_);
    return *this;
  }
  ~Int() { mpz_clear(z_); }

  mpz_t& raw() { return z_; }
  const mpz_t& raw() const { return z_; }

  friend Int operator+(const Int& a, const Int& b) { Int r; mpz_add(r.z_, a.z_, b.z_); return r; }
  friend Int operator-(const Int& a, const Int& b) { Int r; mpz_sub(r.z_, a.z_, b.z_); return r; }
  friend Int operator*(const Int& a, const Int& b) { Int r; mpz_mul(r.z_, a.z_, b.z_); return r; }
  Int& operator+=(const Int& b) { mpz_add(z_, z_, b.z_); return *this; }
  Int& operator-=(const Int& b) { mpz_sub(z_, z_, b.z_); return *this; }
  Int& operator*=(const Int& b) { mpz_mul(z_, z_, b.z_); return *this; }
  Int operator-() const { Int r; mpz_neg(r.z_, z_); return r; }

  static Int pow(const Int& a, unsigned long e) { Int r; mpz_pow_ui(r.z_, a.z_, e); return r; }
  static Int pow_ui(unsigned long base, unsigned long e) { Int r; mpz_ui_pow_ui(r.z_, base, e); return r; }

  bool is_zero() const { return mpz_sgn(z_) == 0; }
  int sgn() const { return mpz_sgn(z_); }
  int cmp(const Int& o) const { return mpz_cmp(z_, o.z_); }
  bool operator==(const Int& o) const { return cmp(o) == 0; }
  bool operator!=(const Int& o) const { return cmp(o) != 0; }
  bool operator<(const Int& o) const { return cmp(o) < 0; }
  bool operator<=(const Int& o) const { return cmp(o) <= 0; }

  bool fits_slong() const { return mpz_fits_slong_p(z_); }
  long to_long() const { return mpz_get_si(z_); }
  double to_double() const { return mpz_get_d(z_); }

  std::string str() const {
    char* s = mpz_get_str(nullptr, 10, z_);
    std::string out(s);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(s, out.size() + 1);
    return out;
  }

 private:
  mpz_t z_;
};

// RAII wrapper over mpq_t, always canonicalized.
class Rat {
 public:
  Rat() { mpq_init(q_); }
  Rat(long long v) {
    mpq_init(q_);
    mpq_set_si(q_, v, 1);
  }
  Rat(const Int& num, const Int& den) {
    mpq_init(q_);
    mpz_set(mpq_numref(q_), num.raw());
    mpz_set(mpq_denref(q_), den.raw());
    mpq_canonicalize(q_);
  }
  Rat(long long num, long long den) : Rat(Int(num), Int(den)) {}
  Rat(const Rat& o) {
    mpq_init(q_);
    mpq_set(q_, o.q_);
  }
  Rat(Rat&& o) noexcept {
    mpq_init(q_);
    mpq_swap(q_, o.q_);
  }
  Rat& operator=(const Rat& o) {
    if (this != &o) mpq_set(q_, o.q_);
    return *this;
  }
  Rat& operator=(Rat&& o) noexcept {
    mpq_swap(q_, o.q_);
    return *this;
  }
  ~Rat() { mpq_clear(q_); }

  mpq_t& raw() { return q_; }
  const mpq_t& raw() const { return q_; }

  friend Rat operator+(const Rat& a, const Rat& b) { Rat r; mpq_add(r.q_, a.q_, b.q_); return r; }
  friend Rat operator-(const Rat& a, const Rat& b) { Rat r; mpq_sub(r.q_, a.q_, b.q_); return r; }
  friend Rat operator*(const Rat& a, const Rat& b) { Rat r; mpq_mul(r.q_, a.q_, b.q_); return r; }
  friend Rat operator/(const Rat& a, const Rat& b) { Rat r; mpq_div(r.q_, a.q_, b.q_); return r; }
  Rat operator-() const { Rat r; mpq_neg(r.q_, q_); return r; }
  Rat& operator+=(const Rat& b) { mpq_add(q_, q_, b.q_); return *this; }
  Rat& operator-=(const Rat& b) { mpq_sub(q_, q_, b.q_); return *this; }
  Rat& operator*=(const Rat& b) { mpq_mul(q_, q_, b.q_); return *this; }

  Rat inv() const { Rat r; mpq_inv(r.q_, q_); return r; }
  bool is_zero() const { return mpq_sgn(q_) == 0; }
  int sgn() const { return mpq_sgn(q_); }
  int cmp(const Rat& o) const { return mpq_cmp(q_, o.q_); }
  bool operator==(const Rat& o) const { return mpq_equal(q_, o.q_) != 0; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const { return cmp(o) < 0; }
  bool operator<=(const Rat& o) const { return cmp(o) <= 0; }

  Int num() const {
    Int r;
    mpz_set(r.raw(), mpq_numref(q_));
    return r;
  }
  Int den() const {
    Int r;
    mpz_set(r.raw(), mpq_denref(q_));
    return r;
  }
  double to_double() const { return mpq_get_d(q_); }

  // "a" when integral, else "a/b"; the CLI's exact-value convention.
  std::string str() const {
    std::string s = num().str();
    Int d = den();
    if (mpz_cmp_ui(d.raw(), 1) != 0) s += "/" + d.str();
    return s;
  }

  static Rat from_str(const std::string& s);

 private:
  mpq_t q_;
};

// Exact rational or +infinity. Orders with +inf on top; used for λ values
// and K-indices.
struct RatOrInf {
  bool inf = false;
  Rat value;

  static RatOrInf infinity() { return {true, Rat()}; }
  static RatOrInf finite(Rat v) { return {false, std::move(v)}; }

  bool operator==(const RatOrInf& o) const {
    return inf == o.inf && (inf || value == o.value);
  }
  bool operator<=(const RatOrInf& o) const {
    if (o.inf) return true;
    if (inf) return false;
    return value <= o.value;
  }
  std::string str() const { return inf ? "inf" : value.str(); }
};

}  // namespace rvlab

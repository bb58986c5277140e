#pragma once

#include <cstdint>
#include <vector>

#include "rvlab/error.hpp"

namespace rvlab {

// An element of F_q = F_p[y]/(g) in the basis 1, y, ..., y^{f-1}; entries in [0, p).
using FqElem = std::vector<uint32_t>;

// Arithmetic in F_q = F_p[y]/(g), g monic irreducible of degree f over F_p.
// For q up to kTableLimit a log/antilog table pair backs multiplication and
// inversion; above that everything is polynomial arithmetic mod (g, p).
class Fq {
 public:
  static constexpr uint64_t kTableLimit = 1u << 12;

  // g given low-to-high with f+1 entries, monic, coefficients in [0, p).
  // Checks irreducibility via gcd(g, y^{p^k} - y) for 0 < k < f.
  Fq(uint32_t p, std::vector<uint32_t> g);

  uint32_t p() const { return p_; }
  uint32_t f() const { return f_; }
  uint64_t q() const { return q_; }
  const std::vector<uint32_t>& modulus() const { return g_; }

  FqElem zero() const { return FqElem(f_, 0); }
  FqElem one() const;
  FqElem from_int(long long v) const;  // image of an integer (constant poly)
  FqElem gen() const;                  // the class of y (requires f > 1)

  bool is_zero(const FqElem& a) const;
  FqElem add(const FqElem& a, const FqElem& b) const;
  FqElem sub(const FqElem& a, const FqElem& b) const;
  FqElem neg(const FqElem& a) const;
  FqElem mul(const FqElem& a, const FqElem& b) const;
  FqElem inv(const FqElem& a) const;  // NonUnitInverse on zero
  FqElem pow(FqElem a, uint64_t n) const;

  // Dense index in [0, q): sum a_j p^j. Used for tables and enumeration.
  uint64_t index(const FqElem& a) const;
  FqElem from_index(uint64_t idx) const;

  // Reduces an arbitrary integer polynomial in y modulo (g, p).
  FqElem reduce_poly(const std::vector<long long>& coeffs) const;

 private:
  FqElem mul_poly(const FqElem& a, const FqElem& b) const;
  void build_tables();

  uint32_t p_;
  uint32_t f_;
  uint64_t q_;
  std::vector<uint32_t> g_;
  bool tabled_ = false;
  std::vector<uint32_t> log_;   // log_[index(x)] for x != 0
  std::vector<uint64_t> exp_;   // exp_[k] = index(gen^k), k in [0, q-1)
};

// Irreducibility test used by Fq and by field validation: true iff g (monic,
// degree f, entries in [0,p)) is irreducible over F_p.
bool fp_poly_irreducible(uint32_t p, const std::vector<uint32_t>& g);

}  // namespace rvlab

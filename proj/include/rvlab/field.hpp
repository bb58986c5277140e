#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rvlab/fq.hpp"

#include "json.hpp"

namespace rvlab {

class Field;
using FieldPtr = std::shared_ptr<const Field>;

enum class FieldMode { Mixed, Equichar };

// Construction data for a finite extension of Q_p (mixed characteristic) or
// for F_q((t)) (equicharacteristic, e = 1 only).
struct FieldSpec {
  FieldMode mode = FieldMode::Mixed;
  uint32_t p = 0;
  // Monic irreducible over F_p, low-to-high, degree = residue degree f.
  std::vector<uint32_t> g = {0, 1};
  // Eisenstein polynomial over the unramified subring, degree = ramification e.
  // Coefficient i is an integer polynomial in the unramified generator y,
  // low-to-high. Defaults to x - p (the trivial extension).
  std::vector<std::vector<long long>> eis;
  // Precision ceiling for the precomputed digit expansion of p.
  int max_precision = 64;

  static FieldSpec qp(uint32_t p);
  static FieldSpec laurent(uint32_t p, std::vector<uint32_t> g = {0, 1});
};

// What to adjoin on top of an existing field.
struct ExtensionStep {
  enum class Kind { Unramified, Eisenstein } kind;
  // Unramified: monic irreducible over F_p of degree d (requires base f = 1).
  std::vector<uint32_t> unram_poly;
  // Eisenstein: coefficients over the base's unramified subring
  // (requires base e = 1).
  std::vector<std::vector<long long>> eis_poly;

  static ExtensionStep unramified(std::vector<uint32_t> h);
  static ExtensionStep eisenstein(std::vector<std::vector<long long>> E);
  static ExtensionStep eisenstein_int(std::vector<long long> E);
};

// A validated local field with precomputed digit data. Immutable after
// construction; shared freely across threads.
class Field {
 public:
  static FieldPtr make(const FieldSpec& spec);

  // Builds L from K by one or more extension steps and records the embedding
  // chain. Steps are applied left to right.
  static FieldPtr extend(const FieldPtr& base, const std::vector<ExtensionStep>& steps);

  FieldMode mode() const { return mode_; }
  bool equichar() const { return mode_ == FieldMode::Equichar; }
  uint32_t p() const { return p_; }
  uint32_t f_deg() const { return fq_.f(); }
  uint32_t e() const { return e_; }
  uint64_t q() const { return fq_.q(); }
  const Fq& fq() const { return fq_; }
  int max_precision() const { return mmax_; }
  const std::vector<std::vector<long long>>& eisenstein() const { return eis_; }

  // Digits of p as a π-series (all-zero rows in equicharacteristic mode).
  const std::vector<FqElem>& p_expansion() const { return pexp_; }

  // π-adic valuation of the integer N (= e * v_p(N) in mixed mode, 0 in
  // equicharacteristic mode when gcd(N, p) = 1).
  int ord_of_int(uint64_t n) const;

  // Extension bookkeeping. rel_e/rel_f are relative to parent(), 1 for roots.
  const FieldPtr& parent() const { return parent_; }
  uint32_t rel_e() const { return rel_e_; }
  uint32_t rel_f() const { return rel_f_; }

  // Total e(L/K) over a chain from `base` to this field; UnrelatedFields if
  // `base` does not occur on the parent chain (structural comparison).
  uint32_t rel_e_over(const FieldPtr& base) const;

  bool same_as(const Field& other) const;  // structural identity

  nlohmann::json to_json() const;          // full descriptor (with parents)
  std::string canonical_key() const;       // stable identity string
  std::string display_name() const;        // e.g. "Q_3(x^2-3)" or "F_9((t))"

  static FieldPtr from_json(const nlohmann::json& j);

 private:
  Field(FieldMode mode, uint32_t p, std::vector<uint32_t> g,
        std::vector<std::vector<long long>> eis, int mmax);
  void compute_p_expansion();

  FieldMode mode_;
  uint32_t p_;
  Fq fq_;
  uint32_t e_;
  std::vector<std::vector<long long>> eis_;  // canonicalized coefficients
  int mmax_;
  std::vector<FqElem> pexp_;

  FieldPtr parent_;
  uint32_t rel_e_ = 1;
  uint32_t rel_f_ = 1;
};

bool is_prime_u32(uint32_t n);

}  // namespace rvlab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvlab/digits.hpp"
#include "rvlab/field.hpp"

namespace rvlab {

// Valuation of a truncated element: either exactly known (first nonzero
// digit), or only bounded below because every stored digit vanishes.
struct Valuation {
  enum class Tag { Known, AtLeast } tag;
  int value;  // π-units

  static Valuation known(int k) { return {Tag::Known, k}; }
  static Valuation at_least(int m) { return {Tag::AtLeast, m}; }
  bool is_known() const { return tag == Tag::Known; }
  bool operator==(const Valuation& o) const { return tag == o.tag && value == o.value; }
};

// An element of O_K known modulo π^M, held in canonical digit form:
// sum c_i π^i with c_i in the fixed residue-field section.
class Padic {
 public:
  Padic() = default;
  Padic(FieldPtr field, int prec, detail::DigitMat digits);

  static Padic zero(const FieldPtr& k, int prec);
  static Padic one(const FieldPtr& k, int prec);
  static Padic from_int(const FieldPtr& k, long long v, int prec);
  static Padic from_ypoly(const FieldPtr& k, const std::vector<long long>& c, int prec);
  static Padic uniformizer(const FieldPtr& k, int prec);
  // The unramified generator y (identity of F_p when f = 1).
  static Padic unram_gen(const FieldPtr& k, int prec);

  const FieldPtr& field() const { return field_; }
  int precision() const { return prec_; }
  const detail::DigitMat& digits() const { return dig_; }
  const FqElem& digit(int i) const { return dig_[i]; }

  bool is_zero() const;  // all digits vanish (zero to this precision)
  Valuation ord() const;

  Padic add(const Padic& o, bool strict = false) const;
  Padic sub(const Padic& o, bool strict = false) const;
  Padic mul(const Padic& o, bool strict = false) const;
  Padic neg() const;
  Padic unit_inv() const;  // requires ord Known(0)
  Padic pow(uint64_t n) const;

  Padic truncate(int prec) const;
  // Extends with zero digits: valid only when the element is an exact finite
  // digit string (enumeration representatives, canonical lifts).
  Padic pad_exact(int prec) const;
  Padic shift_up(int k) const;          // multiply by π^k
  Padic shift_down_exact(int k) const;  // divide by π^k, lower digits must vanish

  bool equal_digits(const Padic& o) const;

  nlohmann::json digits_json() const;  // array of arrays, little-endian
  std::string to_string() const;       // compact display form

  // Canonical image in L for L built from this element's field; the value is
  // preserved and the precision becomes M * e(L/K).
  Padic embed_into(const FieldPtr& target) const;

 private:
  FieldPtr field_;
  int prec_ = 0;
  detail::DigitMat dig_;
};

// Applies one binary ring operation under the min-precision policy.
enum class ArithOp { Add, Sub, Mul, UnitInv };
Padic arith(ArithOp op, const Padic& x, const Padic& y, bool strict = false);

}  // namespace rvlab

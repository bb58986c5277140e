#pragma once

#include <optional>
#include <vector>

#include "rvlab/padic.hpp"

namespace rvlab {

// An element of RV_N = K^×/(1 + N·M_K) ∪ {0} in the uniformizer-split
// representation: valuation γ (π-units) together with its unit class, a
// canonical digit string of width e·v_p(N)+1.
class RvElement {
 public:
  static RvElement zero(FieldPtr field, uint64_t depth);
  static RvElement make(FieldPtr field, uint64_t depth, long gamma, Padic unit);

  // Width in π-digits of a depth-N unit class.
  static int unit_width(const Field& k, uint64_t depth);

  const FieldPtr& field() const { return field_; }
  uint64_t depth() const { return depth_; }
  bool is_zero() const { return zero_; }
  long gamma() const { return gamma_; }
  const Padic& unit() const { return unit_; }

  bool operator==(const RvElement& o) const;
  bool operator!=(const RvElement& o) const { return !(*this == o); }

  // Canonical lift scaled to be integral: returns (x, shift) with the actual
  // lift equal to x / π^shift and x exact in O_K at precision `prec`.
  std::pair<Padic, long> shifted_lift(int prec, long shift) const;

  nlohmann::json to_json() const;
  std::string to_string() const;

  RvElement() = default;  // zero-like placeholder; use the factories

 private:
  FieldPtr field_;
  uint64_t depth_ = 1;
  bool zero_ = true;
  long gamma_ = 0;
  Padic unit_;
};

// rv_N(x); x must carry precision ord(x) + e·v_p(N) + 1. An all-zero digit
// string is ambiguous between 0 and a deep element, so zero must be declared.
RvElement rv_of(const Padic& x, uint64_t depth, bool declared_zero = false);

// Projection RV_M -> RV_N for N | M.
RvElement rv_project(const RvElement& xi, uint64_t coarser_depth);

struct RvMulDiv {
  RvElement product;
  bool divides;  // ord(ξ1) <= ord(ξ2)
};
RvMulDiv rv_mul_div(const RvElement& a, const RvElement& b);
RvElement rv_mul(const RvElement& a, const RvElement& b);
bool rv_divides(const RvElement& a, const RvElement& b);
RvElement rv_pow(const RvElement& a, uint64_t k);
RvElement rv_neg(const RvElement& a);
RvElement rv_inv(const RvElement& a);  // nonzero only
RvElement rv_one(const FieldPtr& k, uint64_t depth);
RvElement rv_of_int(const FieldPtr& k, long long v, uint64_t depth);

// The set ξ_1 + ... + ξ_n, stored as a descriptor: either a single class or
// the rv_N-image of an open ball B(a, radius).
class RvSum {
 public:
  enum class Shape { Singleton, Ball };

  Shape shape() const { return shape_; }
  const RvElement& value() const { return value_; }    // Singleton payload
  const RvElement& center() const { return center_; }  // Ball center class (zero elt when contains_zero)
  long radius() const { return radius_; }
  bool contains_zero() const { return contains_zero_; }

  bool contains(const RvElement& xi) const;
  bool same_set(const RvSum& other) const;

  // When every member shares one valuation, returns it (singleton value γ or
  // ball-center γ); empty when the set contains elements of unbounded ord.
  std::optional<long> uniform_gamma() const;

  nlohmann::json to_json() const;

  static RvSum singleton(RvElement v);
  static RvSum ball_with_zero(FieldPtr field, uint64_t depth, long radius);
  static RvSum ball_no_zero(RvElement center, long radius);

 private:
  RvSum() = default;
  Shape shape_ = Shape::Singleton;
  RvElement value_;
  RvElement center_;
  long radius_ = 0;
  bool contains_zero_ = false;
};

RvSum oplus_sum(const std::vector<RvElement>& summands);
// The set S + ξ (used to fold sums associatively).
RvSum rv_sum_plus(const RvSum& s, const RvElement& xi);
// Ternary relation ⊕(ξ1, ξ2, ξ3).
bool oplus_rel(const RvElement& a, const RvElement& b, const RvElement& c);

// The Hensel-lift predicate P_{N,d}(ξ; ζ_0..ζ_d): derivative-sum valuation
// bound plus a collision 0 ∈ Σ ζ_i ξ̃^i for some ξ̃ over ξ at depth N².
bool hensel_predicate(uint64_t depth, int degree, const RvElement& xi,
                      const std::vector<RvElement>& zeta, uint64_t fiber_cap = 1000000);

// The collision witness ξ̃, when one exists (and condition (a) holds).
std::optional<RvElement> hensel_collision_witness(uint64_t depth, int degree,
                                                  const RvElement& xi,
                                                  const std::vector<RvElement>& zeta,
                                                  uint64_t fiber_cap = 1000000);

// Certified Newton lift: the unique root x_0 with rv_N(x_0) = ξ, computed to
// precision target_prec. Coefficients must carry enough slack (see errors).
Padic hensel_lift(const std::vector<Padic>& coeffs, uint64_t depth, const RvElement& xi,
                  int target_prec);

// Image of ξ under K -> L with the change-of-uniformizer unit correction.
RvElement rv_embed(const RvElement& xi, const FieldPtr& target);

// All unit classes of RV_N over k (digit strings of the class width with
// nonzero leading digit), in a deterministic order.
std::vector<Padic> enumerate_unit_classes(const FieldPtr& k, uint64_t depth);

}  // namespace rvlab

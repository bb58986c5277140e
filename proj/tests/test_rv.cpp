#include "doctest.h"

#include <map>
#include <set>

#include "rvlab/rv.hpp"

using namespace rvlab;

namespace {

// ---------- independent integer oracle for RV over Q_p ----------
// Elements are plain integers; classes are decided by the definitional
// criterion ord(x - y) > ord(y) + ord(N), entirely outside the digit engine.

int int_ord(long long x, long long p) {
  if (x == 0) return 1 << 20;  // effectively infinite
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

bool oracle_rv_equal(long long x, long long y, long long p, int vN) {
  if (x == 0 || y == 0) return x == 0 && y == 0;
  return int_ord(x - y, p) > int_ord(y, p) + vN;
}

// Brute-force membership in ξ_a + ξ_b for integer class representatives:
// enumerate the lifts of each class modulo p^prec (all digit tails beyond the
// class width) and test the definitional criterion on every pairwise sum.
struct IntOracle {
  long long p;
  int vN;  // v_p(N)

  // lifts of a's class modulo p^prec: a + k·p^{ord a + vN + 1}
  std::vector<long long> members(long long a, int prec) const {
    long long mod = 1;
    for (int i = 0; i < prec; ++i) mod *= p;
    long long width = 1;
    for (int i = 0; i < int_ord(a, p) + vN + 1; ++i) width *= p;
    std::vector<long long> out;
    for (long long k = 0; k * width < mod; ++k) out.push_back((a + k * width) % mod);
    return out;
  }

  // 0 is in the sum exactly when the classes are opposite
  bool sum_contains_zero(long long a, long long b) const {
    return oracle_rv_equal(-a, b, p, vN);
  }

  bool sum_contains(long long a, long long b, long long target) const {
    if (target == 0) return sum_contains_zero(a, b);
    // the criterion ord(s - t) > ord t + ord N reads s only modulo
    // p^{ord t + ord N + 1}, so deeper lift tails cannot matter
    int prec = int_ord(target, p) + vN + 1;
    long long mod = 1;
    for (int i = 0; i < prec; ++i) mod *= p;
    for (long long xa : members(a, prec))
      for (long long xb : members(b, prec)) {
        long long s = (xa + xb) % mod;
        long long diff = (s - target % mod + 2 * mod) % mod;
        if (diff == 0 || int_ord(diff, p) > int_ord(target, p) + vN) return true;
      }
    return false;
  }
};

RvElement rv_int(const FieldPtr& k, long long v, uint64_t depth) {
  return rv_of_int(k, v, depth);
}

}  // namespace

TEST_CASE("rv_of and the equality criterion") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto x12 = Padic::from_int(q3, 12, 6);
  auto x3 = Padic::from_int(q3, 3, 6);
  CHECK(rv_of(x12, 1) == rv_of(x3, 1));    // ord(9) = 2 > ord(3) + 0
  CHECK(rv_of(x12, 3) != rv_of(x3, 3));    // needs ord(9) > 1 + 1
  CHECK(rv_of(Padic::zero(q3, 4), 1, /*declared_zero=*/true).is_zero());

  SUBCASE("ambiguous zero requires the declaration") {
    CHECK_THROWS_AS(rv_of(Padic::zero(q3, 4), 1), Error);
  }
  SUBCASE("insufficient precision") {
    auto shallow = Padic::from_int(q3, 9, 3);  // ord 2, depth-3 class needs 2+2 digits
    CHECK_THROWS_AS(rv_of(shallow, 3), Error);
  }

  SUBCASE("criterion in both directions, exhaustively") {
    // all pairs of nonzero integers mod 27 at depths 1 and 3 over Q_3
    for (uint64_t depth : {uint64_t(1), uint64_t(3)}) {
      int vN = depth == 1 ? 0 : 1;
      for (long long x = 1; x < 27; ++x)
        for (long long y = 1; y < 27; ++y) {
          auto cx = rv_of(Padic::from_int(q3, x, 6), depth);
          auto cy = rv_of(Padic::from_int(q3, y, 6), depth);
          CHECK((cx == cy) == oracle_rv_equal(x, y, 3, vN));
        }
    }
  }
}

TEST_CASE("projections") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto x12 = Padic::from_int(q3, 12, 6);
  CHECK(rv_project(rv_of(x12, 3), 1) == rv_of(x12, 1));  // functoriality
  auto xi = rv_of(x12, 3);
  CHECK(rv_project(xi, 3) == xi);  // own depth

  auto q2 = Field::make(FieldSpec::qp(2));
  auto x17 = Padic::from_int(q2, 17, 8);
  CHECK(rv_project(rv_of(x17, 4), 2) == rv_of(x17, 2));

  CHECK_THROWS_AS(rv_project(rv_of(x12, 3), 2), Error);  // 2 does not divide 3
}

TEST_CASE("multiplication and divisibility") {
  auto q3 = Field::make(FieldSpec::qp(3));
  CHECK(rv_mul(rv_int(q3, 3, 1), rv_int(q3, 3, 1)) == rv_int(q3, 9, 1));
  CHECK(rv_divides(rv_int(q3, 3, 1), rv_int(q3, 9, 1)));
  CHECK(!rv_divides(rv_int(q3, 9, 1), rv_int(q3, 3, 1)));
  auto zero = RvElement::zero(q3, 1);
  CHECK(rv_mul(rv_int(q3, 5, 1), zero).is_zero());
  CHECK(rv_divides(rv_int(q3, 5, 1), zero));   // everything divides 0
  CHECK(!rv_divides(zero, rv_int(q3, 5, 1)));  // 0 divides only 0
  CHECK(rv_divides(zero, zero));
  SUBCASE("depth mismatch") {
    CHECK_THROWS_AS(rv_mul(rv_int(q3, 1, 1), rv_int(q3, 1, 3)), Error);
  }
}

TEST_CASE("oplus examples") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto one = rv_int(q3, 1, 1);

  auto s = oplus_sum({one, one});
  REQUIRE(s.shape() == RvSum::Shape::Singleton);
  CHECK(s.value() == rv_int(q3, 2, 1));

  auto s2 = oplus_sum({one, rv_int(q3, -1, 1)});
  REQUIRE(s2.shape() == RvSum::Shape::Ball);
  CHECK(s2.contains_zero());
  CHECK(s2.radius() == 0);
  CHECK(s2.contains(rv_int(q3, 3, 1)));
  CHECK(s2.contains(RvElement::zero(q3, 1)));
  CHECK(!s2.contains(one));

  auto s3 = oplus_sum({one, RvElement::zero(q3, 1)});
  REQUIRE(s3.shape() == RvSum::Shape::Singleton);
  CHECK(s3.value() == one);
}

TEST_CASE("ball lemma descriptor vs brute-force oracle, exhaustive") {
  // N in {1, p}, γ in [-3, 3], all unit classes, over Q_2 and Q_3. The
  // window is scaled into O by π^3; the class structure is scale-equivariant.
  for (uint32_t p : {2u, 3u}) {
    auto k = Field::make(FieldSpec::qp(p));
    for (uint64_t depth : {uint64_t(1), uint64_t(p)}) {
      int vN = (depth == 1) ? 0 : 1;
      int w = vN + 1;
      // shifted class representatives: units times p^g for g in [0, 6]
      std::vector<long long> reps;
      long long pw = 1;
      for (int i = 0; i < w; ++i) pw *= p;
      for (int g = 0; g <= 6; ++g) {
        long long scale = 1;
        for (int i = 0; i < g; ++i) scale *= p;
        for (long long u = 1; u < pw; ++u)
          if (u % p != 0) reps.push_back(u * scale);
      }
      IntOracle oracle{(long long)p, vN};
      auto cls = [&](long long v) { return rv_of(Padic::from_int(k, v, 20), depth); };
      uint64_t checked = 0;
      for (long long a : reps) {
        for (long long b : reps) {
          RvSum lib = oplus_sum({cls(a), cls(b)});
          CHECK(lib.contains(RvElement::zero(k, depth)) == oracle.sum_contains(a, b, 0));
          for (long long t : reps) {
            bool lib_in = lib.contains(cls(t));
            bool orc_in = oracle.sum_contains(a, b, t);
            if (lib_in != orc_in) {
              CAPTURE(p);
              CAPTURE(depth);
              CAPTURE(a);
              CAPTURE(b);
              CAPTURE(t);
            }
            CHECK(lib_in == orc_in);
            ++checked;
          }
        }
      }
      CHECK(checked > 0);
    }
  }
}

TEST_CASE("hyperfield axioms at the descriptor level") {
  for (uint32_t p : {2u, 3u}) {
    auto k = Field::make(FieldSpec::qp(p));
    for (uint64_t depth : {uint64_t(1), uint64_t(p)}) {
      std::vector<RvElement> window;
      window.push_back(RvElement::zero(k, depth));
      for (long g = -3; g <= 3; ++g)
        for (const auto& u : enumerate_unit_classes(k, depth))
          window.push_back(RvElement::make(k, depth, g, u));

      // neutral element and commutativity
      for (const auto& a : window) {
        RvSum za = oplus_sum({RvElement::zero(k, depth), a});
        REQUIRE(za.shape() == RvSum::Shape::Singleton);
        CHECK(za.value() == a);
        for (const auto& b : window)
          CHECK(oplus_sum({a, b}).same_set(oplus_sum({b, a})));
      }
      // associativity: n-ary descriptor equals both folds
      for (size_t i = 0; i < window.size(); i += 3)
        for (size_t j = 0; j < window.size(); j += 2)
          for (size_t l = 0; l < window.size(); ++l) {
            const auto &a = window[i], &b = window[j], &c = window[l];
            RvSum direct = oplus_sum({a, b, c});
            RvSum left = rv_sum_plus(oplus_sum({a, b}), c);
            RvSum right = rv_sum_plus(oplus_sum({b, c}), a);
            CHECK(direct.same_set(left));
            CHECK(direct.same_set(right));
          }
    }
  }
}

TEST_CASE("hensel predicate") {
  auto q2 = Field::make(FieldSpec::qp(2));
  SUBCASE("x^2 - 17 over Q_2 at N = 4") {
    auto xi = rv_int(q2, 1, 4);
    std::vector<RvElement> zeta = {rv_int(q2, -17, 16), RvElement::zero(q2, 16),
                                   rv_int(q2, 1, 16)};
    CHECK(hensel_predicate(4, 2, xi, zeta));
    // brute-force confirmation mod 2^5: some u = 1 mod 8 has u^2 = 17 mod 32
    bool found = false;
    for (long long u = 1; u < 32; u += 8) found = found || ((u * u - 17) % 32 == 0);
    CHECK(found);
  }
  SUBCASE("x^2 - 2 over Q_5 at N = 1 fails") {
    auto q5 = Field::make(FieldSpec::qp(5));
    auto xi = rv_int(q5, 1, 1);
    std::vector<RvElement> zeta = {rv_int(q5, -2, 1), RvElement::zero(q5, 1), rv_int(q5, 1, 1)};
    CHECK(!hensel_predicate(1, 2, xi, zeta));
    for (long long r = 0; r < 5; ++r) CHECK((r * r) % 5 != 2);  // exhaust F_5
  }
  SUBCASE("linear polynomials always lift") {
    auto q3 = Field::make(FieldSpec::qp(3));
    auto xi = rv_int(q3, 1, 1);
    std::vector<RvElement> zeta = {rv_int(q3, -1, 1), rv_int(q3, 1, 1)};
    CHECK(hensel_predicate(1, 1, xi, zeta));
  }
  SUBCASE("zero leading term is rejected") {
    std::vector<RvElement> zeta = {rv_int(q2, 1, 1), rv_int(q2, 1, 1)};
    CHECK_THROWS_AS(hensel_predicate(1, 1, RvElement::zero(q2, 1), zeta), Error);
  }
  SUBCASE("totality: the negation is decided, never unknown") {
    // sweep every ξ and a sample of ζ-tuples; the predicate returns a bool
    // for each (no third value exists at the type level), and flipping it
    // is its negation
    auto q3 = Field::make(FieldSpec::qp(3));
    for (const auto& u : enumerate_unit_classes(q3, 3)) {
      RvElement xi = RvElement::make(q3, 3, 0, u);
      for (long long c0 : {1, 2, 3}) {
        std::vector<RvElement> zeta = {rv_int(q3, c0, 9), rv_int(q3, 1, 9),
                                       rv_int(q3, 1, 9)};
        bool v = hensel_predicate(3, 2, xi, zeta);
        CHECK((v || !v));
      }
    }
  }
}

TEST_CASE("hensel lift") {
  auto q2 = Field::make(FieldSpec::qp(2));
  SUBCASE("x^2 - 17, N = 4, target 5") {
    std::vector<Padic> coeffs = {Padic::from_int(q2, -17, 20), Padic::zero(q2, 20),
                                 Padic::from_int(q2, 1, 20)};
    auto xi = rv_int(q2, 1, 4);
    Padic root = hensel_lift(coeffs, 4, xi, 5);
    CHECK(root.equal_digits(Padic::from_int(q2, 9, 5)));  // 9^2 = 81 = 17 mod 32
    // uniqueness among the exact roots: refine the 2-adic square root of 17
    // digit by digit, then check only one of ±r meets the fiber
    long long r = 1;
    for (int bit = 3; bit < 10; ++bit) {
      long long mod = 1ll << (bit + 1);
      if ((r * r - 17) % mod != 0) r += 1ll << (bit - 1);
    }
    CHECK((r * r - 17) % 1024 == 0);
    int in_fiber = (r % 8 == 1) + ((1024 - r) % 8 == 1);
    CHECK(in_fiber == 1);
  }
  SUBCASE("linear lift is the root itself") {
    std::vector<Padic> coeffs = {Padic::from_int(q2, -1, 16), Padic::from_int(q2, 1, 16)};
    Padic root = hensel_lift(coeffs, 1, rv_int(q2, 1, 1), 6);
    CHECK(root.equal_digits(Padic::one(q2, 6)));
  }
  SUBCASE("adjoined square root over the unramified quadratic of Q_5") {
    auto q5 = Field::make(FieldSpec::qp(5));
    auto q25 = Field::extend(q5, {ExtensionStep::unramified({3, 0, 1})});  // y^2 = 2
    std::vector<Padic> coeffs = {Padic::from_int(q25, -2, 16), Padic::zero(q25, 16),
                                 Padic::from_int(q25, 1, 16)};
    Padic gen = Padic::unram_gen(q25, 16);
    auto xi = rv_of(gen, 1);
    Padic root = hensel_lift(coeffs, 1, xi, 4);
    // postconditions: a root of x^2 - 2 to precision 4 in the class of y
    Padic val = root.mul(root).sub(Padic::from_int(q25, 2, 16).truncate(4));
    CHECK(val.is_zero());
    CHECK(rv_of(root, 1) == xi);
  }
  SUBCASE("predicate failure surfaces as an error") {
    auto q5 = Field::make(FieldSpec::qp(5));
    std::vector<Padic> coeffs = {Padic::from_int(q5, -2, 16), Padic::zero(q5, 16),
                                 Padic::from_int(q5, 1, 16)};
    CHECK_THROWS_AS(hensel_lift(coeffs, 1, rv_int(q5, 1, 1), 4), Error);
  }
  SUBCASE("insufficient coefficient precision") {
    std::vector<Padic> coeffs = {Padic::from_int(q2, -17, 6), Padic::zero(q2, 6),
                                 Padic::from_int(q2, 1, 6)};
    CHECK_THROWS_AS(hensel_lift(coeffs, 4, rv_int(q2, 1, 4), 5), Error);
  }
  SUBCASE("lift output postconditions on a sample sweep") {
    // for every unit ξ where the predicate holds, the lift lands in the
    // fiber and zeroes f to the target precision
    auto q3 = Field::make(FieldSpec::qp(3));
    std::vector<Padic> coeffs = {Padic::from_int(q3, -7, 24), Padic::zero(q3, 24),
                                 Padic::from_int(q3, 1, 24)};
    std::vector<RvElement> zeta;
    for (const auto& c : coeffs)
      zeta.push_back(c.is_zero() ? RvElement::zero(q3, 9) : rv_of(c, 9));
    for (const auto& u : enumerate_unit_classes(q3, 3)) {
      RvElement xi = RvElement::make(q3, 3, 0, u);
      if (!hensel_predicate(3, 2, xi, zeta)) continue;
      Padic root = hensel_lift(coeffs, 3, xi, 8);
      CHECK(rv_of(root.pad_exact(12), 3) == xi);
      Padic val = root.mul(root).sub(Padic::from_int(q3, 7, 8));
      CHECK(val.is_zero());
    }
  }
}

TEST_CASE("rv_embed") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto q3r = Field::extend(q3, {ExtensionStep::eisenstein_int({-3, 0, 1})});

  auto e = rv_embed(rv_int(q3, 3, 1), q3r);
  CHECK(e.gamma() == 2);  // π_L-units
  CHECK(rv_embed(RvElement::zero(q3, 1), q3r).is_zero());

  auto a = rv_int(q3, 2, 1), b = rv_int(q3, 5, 1);
  CHECK(rv_embed(rv_mul(a, b), q3r) == rv_mul(rv_embed(a, q3r), rv_embed(b, q3r)));

  SUBCASE("unrelated fields") {
    auto q5 = Field::make(FieldSpec::qp(5));
    CHECK_THROWS_AS(rv_embed(rv_int(q3, 1, 1), q5), Error);
  }

  SUBCASE("the degree-3 Eisenstein extension exercises the unit correction") {
    auto cubic = Field::extend(q3, {ExtensionStep::eisenstein_int({3, 3, 0, 1})});
    // integer values embed consistently with the direct route
    for (long long v : {3, 6, 12, 21}) {
      RvElement down = rv_int(q3, v, 3);
      RvElement up = rv_embed(down, cubic);
      RvElement direct = rv_of(Padic::from_int(cubic, v, 24), 3);
      CHECK(up == direct);
    }
    // ⊕-membership transports along the embedding on a sampled window
    for (long long x : {1, 2, 4}) {
      for (long long y : {1, 5, 8}) {
        for (long long t : {2, 3, 9}) {
          bool down_in = oplus_sum({rv_int(q3, x, 1), rv_int(q3, y, 1)}).contains(rv_int(q3, t, 1));
          bool up_in = oplus_sum({rv_embed(rv_int(q3, x, 1), cubic),
                                  rv_embed(rv_int(q3, y, 1), cubic)})
                           .contains(rv_embed(rv_int(q3, t, 1), cubic));
          CHECK(down_in == up_in);
        }
      }
    }
  }
}

TEST_CASE("equicharacteristic depths must be prime to p") {
  auto f3t = Field::make(FieldSpec::laurent(3));
  CHECK(rv_of_int(f3t, 2, 2) == rv_of_int(f3t, 5, 2));  // RV_2 = RV_1 there
  CHECK_THROWS_AS(RvElement::zero(f3t, 3), Error);
  try {
    RvElement::zero(f3t, 3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedEquichar);
  }
}

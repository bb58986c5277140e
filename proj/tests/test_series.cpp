#include "doctest.h"

#include "rvlab/series.hpp"

using namespace rvlab;

namespace {

Rat q_pow_inv(uint64_t q, unsigned long e) { return Rat(Int(1), Int::pow_ui(q, e)); }

}  // namespace

TEST_CASE("poincare_terms examples") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto sys = PolySystem::parse({"x^2"});

  auto raw = poincare_terms(sys, q3, 4, SeriesKind::Raw);
  std::vector<std::string> expect = {"1", "1/3", "1/3", "1/9", "1/9"};
  REQUIRE(raw.c.size() == 5);
  for (size_t i = 0; i < 5; ++i) CHECK(raw.c[i].str() == expect[i]);

  auto serre = poincare_terms(sys, q3, 4, SeriesKind::Serre);
  for (int n = 0; n <= 4; ++n)
    CHECK(serre.c[size_t(n)] == q_pow_inv(9, (unsigned long)n));  // N_n = 1, so 3^{-2n}

  auto tiny = poincare_terms(sys, q3, 0, SeriesKind::Raw);
  REQUIRE(tiny.c.size() == 1);
  CHECK(tiny.c[0].str() == "1");
}

TEST_CASE("fit_rational") {
  SUBCASE("geometric series") {
    std::vector<Rat> c;
    for (int n = 0; n <= 8; ++n) c.push_back(q_pow_inv(9, (unsigned long)n));
    auto fit = fit_rational(c, 2);
    REQUIRE(fit.den.size() == 2);
    CHECK(fit.den[1].str() == "-1/9");
    REQUIRE(fit.num.size() == 1);
    CHECK(fit.num[0].str() == "1");
    CHECK(fit.guard_verified == 2);
  }
  SUBCASE("constant series") {
    std::vector<Rat> ones(8, Rat(1));
    auto fit = fit_rational(ones, 2);
    CHECK(fit.den.size() == 2);
    CHECK(fit.den[1].str() == "-1");
  }
  SUBCASE("raw x^2 over Q_3: split even/odd geometric sums") {
    auto q3 = Field::make(FieldSpec::qp(3));
    auto terms = poincare_terms(PolySystem::parse({"x^2"}), q3, 12, SeriesKind::Raw);
    auto fit = fit_rational(terms.c, 3);
    // (1 + T/3)/(1 - T^2/3)
    REQUIRE(fit.num.size() == 2);
    CHECK(fit.num[0].str() == "1");
    CHECK(fit.num[1].str() == "1/3");
    REQUIRE(fit.den.size() == 3);
    CHECK(fit.den[1].is_zero());
    CHECK(fit.den[2].str() == "-1/3");
  }
  SUBCASE("round-trip reproduces every input term exactly") {
    auto q2 = Field::make(FieldSpec::qp(2));
    for (auto text : {"x", "x^2", "x^2 - 17", "x^3"}) {
      auto terms = poincare_terms(PolySystem::parse({std::string(text)}), q2, 12, SeriesKind::Raw);
      auto fit = fit_rational(terms.c, 3);
      auto back = fit.expand(int(terms.c.size()));
      for (size_t i = 0; i < terms.c.size(); ++i) CHECK(back[i] == terms.c[i]);
    }
  }
  SUBCASE("NeedMoreTerms") {
    // a lone spike forces an LFSR as long as the fitted prefix
    std::vector<Rat> c = {Rat(0), Rat(0), Rat(0), Rat(0), Rat(0), Rat(1), Rat(0), Rat(0)};
    CHECK_THROWS_AS(fit_rational(c, 2), Error);
    try {
      fit_rational(c, 2);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NeedMoreTerms);
    }
  }
  SUBCASE("GuardFailed") {
    std::vector<Rat> c;
    for (int n = 0; n < 10; ++n) c.push_back(q_pow_inv(2, (unsigned long)n));
    c.back() = Rat(7);  // corrupt the last, guarded term
    CHECK_THROWS_AS(fit_rational(c, 2), Error);
    try {
      fit_rational(c, 2);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GuardFailed);
    }
  }
}

TEST_CASE("largest_pole examples") {
  SUBCASE("single simple pole: 1/(1 - T/9) at q = 3") {
    std::vector<Rat> c;
    for (int n = 0; n <= 8; ++n) c.push_back(q_pow_inv(9, (unsigned long)n));
    auto rep = largest_pole(fit_rational(c, 2), 3, 1);
    CHECK(rep.lambda.str() == "2");
    CHECK(rep.sigma_max == "-2");
    REQUIRE(rep.roots.size() == 1);
    CHECK(rep.roots[0].modulus == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(!rep.roots[0].cancelled);
  }
  SUBCASE("irrational pole pair: (1 + T/3)/(1 - T^2/3) at q = 3") {
    auto q3 = Field::make(FieldSpec::qp(3));
    auto terms = poincare_terms(PolySystem::parse({"x^2"}), q3, 12, SeriesKind::Raw);
    auto rep = largest_pole(fit_rational(terms.c, 3), 3, 1);
    CHECK(rep.lambda.str() == "1/2");  // |T_0| = sqrt(3)
  }
  SUBCASE("polynomial series has no poles") {
    std::vector<Rat> c = {Rat(1), Rat(1, 3)};
    for (int i = 0; i < 8; ++i) c.push_back(Rat(0));
    auto rep = largest_pole(fit_rational(c, 3), 3, 1);
    CHECK(rep.lambda.inf);
    CHECK(rep.lambda.str() == "inf");
  }
  SUBCASE("snap verification: substituting back hits the root modulus") {
    std::vector<Rat> c;
    for (int n = 0; n <= 10; ++n) c.push_back(q_pow_inv(5, (unsigned long)(2 * n) / 2));
    auto fit = fit_rational(c, 2);
    auto rep = largest_pole(fit, 5, 1);
    double back = std::pow(5.0, rep.lambda.value.to_double());
    CHECK(back == doctest::Approx(rep.roots[0].modulus).epsilon(1e-12));
  }
  SUBCASE("unsnappable pole raises rather than guessing") {
    // 1/(1 - T/3) read at q = 2: λ = log_2 3 has no small-denominator form
    std::vector<Rat> c;
    for (int n = 0; n <= 8; ++n) c.push_back(q_pow_inv(3, (unsigned long)n));
    auto fit = fit_rational(c, 2);
    CHECK_THROWS_AS(largest_pole(fit, 2, 1), Error);
    try {
      largest_pole(fit, 2, 1);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SnapAmbiguous);
    }
  }
}

TEST_CASE("monomial thresholds: λ̃(x^k) = 1/k") {
  for (uint32_t p : {2u, 3u, 5u}) {
    auto k = Field::make(FieldSpec::qp(p));
    int kk = 1;
    for (auto text : {"x", "x^2", "x^3"}) {
      auto terms = poincare_terms(PolySystem::parse({std::string(text)}), k, 14, SeriesKind::Raw);
      auto rep = largest_pole(fit_rational(terms.c, 3), k->q(), k->e());
      CHECK(rep.lambda.str() == (kk == 1 ? "1" : "1/" + std::to_string(kk)));
      ++kk;
    }
  }
}

TEST_CASE("serre λ closed forms in one variable") {
  // a single unit root keeps N_n = 1, so P = 1/(1 - T/q^2) and λ = m + 1 = 2
  auto q3 = Field::make(FieldSpec::qp(3));
  SeriesOptions opt;
  opt.serre_budget = 10;
  for (auto text : {"x", "x^2"}) {
    auto terms =
        poincare_terms(PolySystem::parse({std::string(text)}), q3, 8, SeriesKind::Serre, opt);
    auto rep = largest_pole(fit_rational(terms.c, 3), 3, 1);
    CHECK(rep.lambda.str() == "2");
  }
}

TEST_CASE("uncertified serre terms block the pipeline") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto sys = PolySystem::parse({"x*y - 1", "x - y"});  // true system: bounds only
  SeriesOptions opt;
  opt.serre_budget = 2;
  CHECK_THROWS_AS(poincare_terms(sys, q3, 3, SeriesKind::Serre, opt), Error);
}

#include "doctest.h"

#include "rvlab/formula.hpp"

using namespace rvlab;

namespace {

Assignment assign_int(const FieldPtr& k, const std::string& var, long long v, int radius,
                      int prec = 0) {
  Assignment a;
  int p = prec ? prec : std::min(k->max_precision(), radius + 8);
  a.vf[var] = AssignedValue::exact_rep(Padic::from_int(k, v, p), radius);
  return a;
}

}  // namespace

TEST_CASE("parser examples") {
  auto f1 = parse_formula("rv1(x) = rv1(0)");
  CHECK(f1->kind == Formula::Kind::RvEq);
  CHECK(f1->args[0]->kind == RvTerm::Kind::OfVf);

  auto f2 = parse_formula("exists r:RV(2). P[2,2](r; rv4(a0), rv4(a1), rv4(a2))");
  CHECK(f2->kind == Formula::Kind::ExistsRv);
  CHECK(f2->bound_depth == 2);
  CHECK(f2->sub[0]->kind == Formula::Kind::Pred);

  CHECK_THROWS_AS(parse_formula("rv2(x) * rv3(y) = rv2(x)"), Error);
  try {
    parse_formula("rv2(x) * rv3(y) = rv2(x)");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SortError);
  }

  SUBCASE("syntax errors carry a position") {
    CHECK_THROWS_AS(parse_formula("rv1(x) ="), Error);
    CHECK_THROWS_AS(parse_formula("exists r RV(2). r = r"), Error);
  }
  SUBCASE("free RV variable depths resolve by unification") {
    auto f = parse_formula("r = rv3(x)");  // depth flows from the right
    auto fv = free_variables(f);
    REQUIRE(fv.rv.size() == 1);
    CHECK(fv.rv[0].second == 3);
    auto fallback = free_variables(parse_formula("r = 0"));  // fully wildcard: RV_1
    CHECK(fallback.rv[0].second == 1);
    CHECK_THROWS_AS(parse_formula("r = rv2(x) and r = rv3(x)"), Error);
  }
  SUBCASE("the grammar example from the docs") {
    auto f = parse_formula("exists r:RV(3). rv3(x^2 - 17) = r * r and r | rv3(1)");
    CHECK(f->kind == Formula::Kind::ExistsRv);
  }
}

TEST_CASE("printer round-trips") {
  std::vector<std::string> corpus = {
      "rv1(x) = rv1(0)",
      "exists r:RV(2). P[2,2](r; rv4(a0), rv4(a1), rv4(a2))",
      "exists y:VF. rv5(y^2 - x) = 0",
      "rv1(x) | rv1(3) and rv1(3) | rv1(x)",
      "not (rv2(x) = rv2(1)) or oplus(rv1(x), rv1(y), rv1(x + y))",
      "exists r:RV(3). rv3(x^2 - 17) = r * r and r | rv3(1)",
      "proj[1](rv3(x)) = rv1(x)",
  };
  for (const auto& text : corpus) {
    auto ast = parse_formula(text);
    auto printed = print_formula(ast);
    auto reparsed = parse_formula(printed);
    CHECK(print_formula(reparsed) == printed);  // parse ∘ print is stable
  }
}

TEST_CASE("eval examples over Q_5") {
  auto q5 = Field::make(FieldSpec::qp(5));
  auto phi = parse_formula("exists y:VF. rv5(y^2 - x) = 0");
  SearchWindow w;
  w.vf_precision = 3;

  auto r = eval_formula(phi, q5, assign_int(q5, "x", 4, 3), w);
  CHECK(r.cert == Verdict3::True);  // witness y = 2 with a trivial certificate
  CHECK(r.level == Verdict3::True);

  r = eval_formula(phi, q5, assign_int(q5, "x", 2, 3), w);
  CHECK(r.cert == Verdict3::False);  // squares mod 5 are {0,1,4}
  CHECK(r.level == Verdict3::False);

  auto q25 = Field::extend(q5, {ExtensionStep::unramified({3, 0, 1})});
  r = eval_formula(phi, q25, assign_int(q25, "x", 2, 3), w);
  CHECK(r.cert == Verdict3::True);  // the residue solution appears in F_25
}

TEST_CASE("three-valued soundness under window escalation") {
  // raising M may sharpen Unknown but never flips True <-> False
  auto q3 = Field::make(FieldSpec::qp(3));
  std::vector<std::string> formulas = {
      "exists y:VF. rv3(y^2 - x) = 0",
      "rv1(x^2 + x) = 0",
      "rv1(x) | rv1(3)",
      "exists y:VF. rv1(y^2 - x) = 0 and rv1(y) = rv1(1)",
  };
  // the assignment (value and radius) stays fixed; only the quantifier
  // window deepens, so certified verdicts may sharpen but never flip
  for (const auto& text : formulas) {
    auto phi = parse_formula(text);
    for (long long x = 0; x < 9; ++x) {
      Verdict3 prev = Verdict3::Unknown;
      for (int m = 2; m <= 4; ++m) {
        SearchWindow w;
        w.vf_precision = m;
        auto r = eval_formula(phi, q3, assign_int(q3, "x", x, 2, 10), w);
        if (prev == Verdict3::True) CHECK(r.cert != Verdict3::False);
        if (prev == Verdict3::False) CHECK(r.cert != Verdict3::True);
        if (r.cert != Verdict3::Unknown) prev = r.cert;
      }
    }
  }
}

TEST_CASE("enumerate_solutions") {
  auto q3 = Field::make(FieldSpec::qp(3));
  SearchWindow w;
  w.vf_precision = 2;

  SUBCASE("rv1(x^2) = 0 over window mod 9") {
    auto sols = enumerate_solutions(parse_formula("rv1(x^2) = 0"), q3, w);
    // brute force mod 9: x^2 = 0 mod 9 at x in {0, 3, 6}
    std::set<long long> expect;
    for (long long x = 0; x < 9; ++x)
      if ((x * x) % 9 == 0) expect.insert(x);
    CHECK(expect == std::set<long long>{0, 3, 6});
    CHECK(sols.solutions.size() == 3);
    int certified = 0;
    for (const auto& s : sols.solutions) certified += s.certified;
    CHECK(certified == 1);  // only the exact root x = 0
  }

  SUBCASE("tautology holds everywhere") {
    auto sols = enumerate_solutions(parse_formula("rv1(x) = rv1(x)"), q3, w);
    CHECK(sols.solutions.size() == 9);
  }

  SUBCASE("ord pinned to exactly 1") {
    auto sols =
        enumerate_solutions(parse_formula("rv1(x) | rv1(3) and rv1(3) | rv1(x)"), q3, w);
    std::set<std::string> got;
    for (const auto& s : sols.solutions) got.insert(s.assignment.vf.at("x").value.to_string());
    CHECK(got == std::set<std::string>{"[0,1]", "[0,2]"});  // 3 and 6 mod 9
  }

  SUBCASE("window cap") {
    SearchWindow big;
    big.vf_precision = 9;
    big.cap = 1000;
    CHECK_THROWS_AS(enumerate_solutions(parse_formula("rv1(x) = rv1(x)"), q3, big), Error);
  }
}

TEST_CASE("quantifier-free evaluation agrees with the RV primitives") {
  auto q3 = Field::make(FieldSpec::qp(3));
  SearchWindow w;
  w.vf_precision = 3;
  auto eq = parse_formula("rv3(x) = rv3(y)");
  auto div = parse_formula("rv3(x) | rv3(y)");
  auto rel = parse_formula("oplus(rv1(x), rv1(y), rv1(x + y))");
  for (long long x = 0; x < 27; x += 2) {
    for (long long y = 1; y < 27; y += 3) {
      Assignment a;
      a.vf["x"] = AssignedValue::exact_rep(Padic::from_int(q3, x, 10), 3);
      a.vf["y"] = AssignedValue::exact_rep(Padic::from_int(q3, y, 10), 3);
      auto cx = (x % 27 == 0) ? RvElement::zero(q3, 3) : rv_of(Padic::from_int(q3, x, 10), 3);
      auto cy = rv_of(Padic::from_int(q3, y, 10), 3);
      auto r1 = eval_formula(eq, q3, a, w);
      if (r1.level != Verdict3::Unknown) CHECK((r1.level == Verdict3::True) == (cx == cy));
      auto r2 = eval_formula(div, q3, a, w);
      if (r2.level != Verdict3::Unknown)
        CHECK((r2.level == Verdict3::True) == rv_divides(cx, cy));
      auto r3 = eval_formula(rel, q3, a, w);
      auto c1x = (x % 27 == 0) ? RvElement::zero(q3, 1) : rv_of(Padic::from_int(q3, x, 10), 1);
      auto c1y = rv_of(Padic::from_int(q3, y, 10), 1);
      auto csum = (x + y) % 27 == 0 ? RvElement::zero(q3, 1)
                                    : rv_of(Padic::from_int(q3, x + y, 10), 1);
      if (r3.level != Verdict3::Unknown)
        CHECK((r3.level == Verdict3::True) == oplus_sum({c1x, c1y}).contains(csum));
    }
  }
}

TEST_CASE("monotonicity across extensions") {
  auto q5 = Field::make(FieldSpec::qp(5));
  auto q25 = Field::extend(q5, {ExtensionStep::unramified({3, 0, 1})});
  SearchWindow w;
  w.vf_precision = 2;

  SUBCASE("the solvability formula gains points but never loses them") {
    auto phi = parse_formula("exists y:VF. rv3(y^2 - x) = 0");
    auto rep = check_monotonicity(phi, q5, q25, w);
    CHECK(rep.violations == 0);
    CHECK(rep.k_certified_true > 0);
    CHECK(rep.l_true_at_embedded == rep.k_certified_true);
    // x = 2 is a base-window point that only becomes solvable upstairs
    auto up = eval_formula(phi, q25, assign_int(q25, "x", 2, 2), w);
    CHECK(up.cert == Verdict3::True);
    auto down = eval_formula(phi, q5, assign_int(q5, "x", 2, 2), w);
    CHECK(down.cert == Verdict3::False);
  }

  SUBCASE("quantifier-free formulas are trivially monotone") {
    auto phi = parse_formula("rv1(x) = rv1(1)");
    auto rep = check_monotonicity(phi, q5, q25, w);
    CHECK(rep.violations == 0);
    CHECK(rep.k_certified_true > 0);
  }

  SUBCASE("negation over a VF quantifier is rejected") {
    auto gate = parse_formula("not (exists y:VF. rv1(y^2 + 1) = 0)");
    CHECK_THROWS_AS(check_monotonicity(gate, q5, q25, w), Error);
    try {
      check_monotonicity(gate, q5, q25, w);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotExistential);
    }
  }

  SUBCASE("ramified extensions scale the window") {
    auto q3 = Field::make(FieldSpec::qp(3));
    auto q3r = Field::extend(q3, {ExtensionStep::eisenstein_int({-3, 0, 1})});
    auto phi = parse_formula("exists y:VF. rv1(y^2 - x) = 0");
    auto rep = check_monotonicity(phi, q3, q3r, w);
    CHECK(rep.violations == 0);
  }
}

TEST_CASE("shape checks") {
  CHECK(is_exists_simple(parse_formula("exists r:RV(2). r = r")));
  CHECK(is_exists_simple(parse_formula("rv1(x) = rv1(1)")));
  CHECK(!is_exists_simple(parse_formula("exists y:VF. rv1(y) = rv1(1)")));
  CHECK(is_quantifier_free(parse_formula("rv1(x) = rv1(1) and not (rv1(x) = rv1(2))")));
  CHECK(!monotone_shape_violation(parse_formula("exists y:VF. rv1(y - x) = 0")));
  CHECK(monotone_shape_violation(parse_formula("not (exists y:VF. rv1(y) = 0)")));
  CHECK(monotone_shape_violation(parse_formula("exists y:VF. not (rv1(y) = rv1(x))")));
}

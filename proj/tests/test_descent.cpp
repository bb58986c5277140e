#include "doctest.h"

#include "rvlab/descent.hpp"

using namespace rvlab;

TEST_CASE("check_descent examples") {
  auto q5 = Field::make(FieldSpec::qp(5));
  auto q3 = Field::make(FieldSpec::qp(3));

  SUBCASE("x^2 - 2 gains roots upstairs, serre") {
    auto rep = check_descent(PolySystem::parse({"x^2 - 2"}), q5,
                             parse_extension_spec("unram:y^2+3", q5), SeriesKind::Serre, 8);
    CHECK(rep.base.pole.lambda.inf);
    CHECK(rep.ext.pole.lambda.str() == "2");
    CHECK(rep.holds);
    CHECK(!rep.advisory);
  }
  SUBCASE("x^2 across a ramified quadratic, serre: both sides 2") {
    auto rep = check_descent(PolySystem::parse({"x^2"}), q3,
                             parse_extension_spec("eis:x^2-3", q3), SeriesKind::Serre, 8);
    CHECK(rep.base.pole.lambda.str() == "2");
    CHECK(rep.ext.pole.lambda.str() == "2");
    CHECK(rep.holds);
  }
  SUBCASE("descent is strict for the Eisenstein cubic over its own extension") {
    auto rep = check_descent(PolySystem::parse({"x^3 + 3x + 3"}), q3,
                             parse_extension_spec("eis:x^3+3x+3", q3), SeriesKind::Raw, 18);
    CHECK(rep.base.pole.lambda.inf);   // no roots downstairs: polynomial series
    CHECK(!rep.ext.pole.lambda.inf);   // the adjoined root creates a pole
    CHECK(rep.holds);
  }
}

TEST_CASE("limsup table") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto q3r = Field::extend(q3, {ExtensionStep::eisenstein_int({-3, 0, 1})});
  auto table = limsup_report(PolySystem::parse({"x^2"}), q3, q3r, 6);
  REQUIRE(table.n.size() == 6);
  // N_n = 1 on the base: (q^{-2n})^{1/n} = 1/9 from n = 1 on
  for (double v : table.base_values) CHECK(v == doctest::Approx(1.0 / 9.0));
  CHECK(table.to_json()["certifying"] == false);

  auto single = limsup_report(PolySystem::parse({"x"}), q3, q3r, 1);
  CHECK(single.n.size() == 1);
}

TEST_CASE("index catalog") {
  auto q3 = Field::make(FieldSpec::qp(3));
  SUBCASE("the descent-failure example, exactly") {
    auto base = index_catalog(CatalogSpec::parse("gated"), q3);
    CHECK(base.exact);
    CHECK(base.value.str() == "1");
    auto q3i = Field::extend(q3, {ExtensionStep::unramified({1, 0, 1})});
    auto up = index_catalog(CatalogSpec::parse("gated"), q3i);
    CHECK(up.value.inf);
  }
  SUBCASE("reciprocal monomials") {
    CHECK(index_catalog(CatalogSpec::parse("recip:1"), q3).value.str() == "1");
    CHECK(index_catalog(CatalogSpec::parse("recip:1,2"), q3).value.str() == "1/2");
    CHECK(index_catalog(CatalogSpec::parse("recip:3,1,2"), q3).value.str() == "1/3");
  }
  SUBCASE("bounded monomial norms") {
    CHECK(index_catalog(CatalogSpec::parse("norm:2"), q3).value.inf);
  }
  SUBCASE("NotInCatalog") {
    CHECK_THROWS_AS(CatalogSpec::parse("weird:1"), Error);
  }
  SUBCASE("squareness of -1 across fields") {
    CHECK(!minus_one_is_square(q3));
    auto q5 = Field::make(FieldSpec::qp(5));
    CHECK(minus_one_is_square(q5));  // 2^2 = 4 = -1 mod 5
    auto q2 = Field::make(FieldSpec::qp(2));
    CHECK(!minus_one_is_square(q2));  // units square to 1 mod 8
    auto f5t = Field::make(FieldSpec::laurent(5));
    CHECK(minus_one_is_square(f5t));
  }
}

TEST_CASE("index estimates") {
  auto q3 = Field::make(FieldSpec::qp(3));
  SUBCASE("1/x estimates near 1") {
    auto est = index_estimate(parse_formula("rv1(x) * xi = 1"), "xi", q3, 6, 7);
    CHECK(!est.exact);
    CHECK(std::fabs(est.estimate - 1.0) < 0.05);
  }
  SUBCASE("1/x^2 estimates near 1/2") {
    auto est = index_estimate(parse_formula("rv1(x^2) * xi = 1"), "xi", q3, 6, 7);
    CHECK(std::fabs(est.estimate - 0.5) < 0.05);
  }
  SUBCASE("constants concentrate at ord 0") {
    // f = 1 on O: the fiber condition never meets negative γ
    auto est = index_estimate(parse_formula("rv1(x) | rv1(x) and xi = rv1(1)"), "xi", q3, 4, 4);
    CHECK(est.value.inf);
  }
  SUBCASE("catalog and estimate agree within 0.1") {
    struct Case {
      const char* formula;
      const char* catalog;
    };
    for (auto c : {Case{"rv1(x) * xi = 1", "recip:1"}, Case{"rv1(x^2) * xi = 1", "recip:2"},
                   Case{"rv1(x1 * x2^2) * xi = 1", "recip:1,2"}}) {
      auto exact = index_catalog(CatalogSpec::parse(c.catalog), q3);
      int prec = std::string(c.formula).find("x1") != std::string::npos ? 5 : 7;
      auto est = index_estimate(parse_formula(c.formula), "xi", q3, prec == 5 ? 4 : 6, prec);
      CHECK(std::fabs(est.estimate - exact.value.value.to_double()) <= 0.1);
    }
  }
}

TEST_CASE("transfer checks") {
  auto t1 = transfer_check("x^2", 5, 12);
  CHECK(t1.mixed.pole.lambda.str() == "1/2");
  CHECK(t1.laurent.pole.lambda.str() == "1/2");
  CHECK(t1.equal);

  auto t2 = transfer_check("x", 3, 10);
  CHECK(t2.mixed.pole.lambda.str() == "1");
  CHECK(t2.equal);

  auto t3 = transfer_check("x^2 - pi", 5, 10);
  CHECK(t3.equal);  // matched Newton polygons on both sides

  CHECK_THROWS_AS(transfer_check("x^2", 2, 8), Error);  // desk hedge: odd p only
}

TEST_CASE("substructure windows") {
  auto q3 = Field::make(FieldSpec::qp(3));
  SUBCASE("unramified quadratic") {
    auto q3i = Field::extend(q3, {ExtensionStep::unramified({1, 0, 1})});
    auto rep = check_substructure(q3, q3i, {1, 3});
    CHECK(rep.failures == 0);
    CHECK(rep.checks > 1000);
  }
  SUBCASE("ramified quadratic scales γ by two") {
    auto q3r = Field::extend(q3, {ExtensionStep::eisenstein_int({-3, 0, 1})});
    auto rep = check_substructure(q3, q3r, {1, 3});
    CHECK(rep.failures == 0);
  }
  SUBCASE("identity embedding passes trivially") {
    auto rep = check_substructure(q3, q3, {1});
    CHECK(rep.failures == 0);
  }
}

TEST_CASE("one-variable preparation") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto q2 = Field::make(FieldSpec::qp(2));

  SUBCASE("f = t: a single linear cell") {
    auto rep = prepare_univariate(PolyExpr::parse("t1"), 1, q3, 4, 2);
    CHECK(rep.success);
    CHECK(rep.q_used == 1);
    CHECK(rep.partition_ok);
  }
  SUBCASE("f = t^2 over Q_3 at depth 1") {
    auto rep = prepare_univariate(PolyExpr::parse("t1^2"), 1, q3, 6, 2);
    CHECK(rep.success);
    CHECK(rep.q_used == 1);
    CHECK(rep.partition_ok);
  }
  SUBCASE("f = t^2 - 17 over Q_2 at depth 1") {
    auto rep = prepare_univariate(PolyExpr::parse("t1^2 - 17"), 1, q2, 7, 3);
    CHECK(rep.success);
    CHECK(rep.partition_ok);
    CHECK(rep.centers.size() >= 3);  // 0 and both square roots
  }
  SUBCASE("degree cap") {
    CHECK_THROWS_AS(prepare_univariate(PolyExpr::parse("t1^5"), 1, q3, 4, 1), Error);
  }
}

TEST_CASE("descent suite manifest") {
  nlohmann::json manifest = nlohmann::json::array();
  nlohmann::json job;
  job["poly"] = "x^2";
  job["p"] = 3;
  job["kind"] = "serre";
  job["n_max"] = 5;  // deep unramified windows square the level, keep it desk-sized
  job["extensions"] = {"eis:x^2-3", "unram:y^2+1"};
  manifest.push_back(job);
  auto outcome = run_descent_suite(manifest);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report["violations"] == 0);
  CHECK(outcome.report["reports"].size() == 2);
}

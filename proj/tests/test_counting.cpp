#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "rvlab/counting.hpp"

using namespace rvlab;

namespace {

// ---------- independent naive oracle over Q_p (plain integers) ----------
// Counts solutions of one integer polynomial mod p^n by full enumeration;
// written against the definition, sharing nothing with the frontier sweep.

uint64_t naive_count(const std::vector<long long>& coeffs, uint32_t p, int n) {
  if (n == 0) return 1;
  unsigned long long mod = 1;
  for (int i = 0; i < n; ++i) mod *= p;
  uint64_t count = 0;
  for (unsigned long long x = 0; x < mod; ++x) {
    unsigned __int128 acc = 0;
    unsigned __int128 pw = 1;
    for (long long c : coeffs) {
      long long cc = c % (long long)mod;
      if (cc < 0) cc += (long long)mod;
      acc += (unsigned __int128)cc * pw % mod;
      pw = pw * x % mod;
    }
    if (acc % mod == 0) ++count;
  }
  return count;
}

// naive full enumeration over an arbitrary field through Padic evaluation
// (independent of the frontier path; digit arithmetic is oracled elsewhere)
uint64_t naive_count_field(const PolySystem& sys, int n, const FieldPtr& k) {
  if (n == 0) return 1;
  const size_t m = size_t(sys.nvars());
  std::vector<BoundPoly> binds;
  for (const auto& p : sys.polys) binds.emplace_back(p, k, n);
  uint64_t per = 1;
  for (int i = 0; i < n; ++i) per *= k->q();
  uint64_t total = 1;
  for (size_t i = 0; i < m; ++i) total *= per;
  uint64_t count = 0;
  const Fq& fq = k->fq();
  for (uint64_t code = 0; code < total; ++code) {
    uint64_t c = code;
    std::vector<Padic> pt;
    for (size_t j = 0; j < m; ++j) {
      detail::DigitMat rows;
      uint64_t cj = c % per;
      c /= per;
      for (int d = 0; d < n; ++d) {
        rows.push_back(fq.from_index(cj % k->q()));
        cj /= k->q();
      }
      pt.emplace_back(k, n, std::move(rows));
    }
    bool ok = true;
    for (size_t bi = 0; bi < binds.size() && ok; ++bi) {
      std::vector<Padic> sub;
      for (const auto& v : binds[bi].variables()) {
        size_t idx = size_t(std::lower_bound(sys.vars.begin(), sys.vars.end(), v) -
                            sys.vars.begin());
        sub.push_back(pt[idx]);
      }
      ok = binds[bi].eval(sub).is_zero();
    }
    if (ok) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("count_raw examples against the oracle") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto q2 = Field::make(FieldSpec::qp(2));

  CHECK(naive_count({0, 0, 1}, 3, 3) == 3);  // oracle first
  CHECK(count_raw(PolySystem::parse({"x^2"}), 3, q3) == 3);

  CHECK(naive_count({-17, 0, 1}, 2, 3) == 4);
  CHECK(count_raw(PolySystem::parse({"x^2 - 17"}), 3, q2) == 4);

  CHECK(count_raw(PolySystem::parse({"x"}), 5, q3) == 1);

  SUBCASE("sweep agrees with the oracle across levels and primes") {
    for (uint32_t p : {2u, 3u, 5u}) {
      auto k = Field::make(FieldSpec::qp(p));
      for (auto coeffs : std::vector<std::vector<long long>>{
               {0, 0, 1}, {-17, 0, 1}, {0, 0, 0, 1}, {3, 3, 0, 1}, {1, 1, 1}}) {
        std::string text;
        PolyExpr e;
        for (size_t i = 0; i < coeffs.size(); ++i)
          e = e.add(PolyExpr::constant(coeffs[i])
                        .mul(PolyExpr::variable("x").pow(uint32_t(i))));
        PolySystem sys = PolySystem::from_exprs({e});
        auto counts = count_raw_range(sys, 4, k);
        for (int n = 0; n <= 4; ++n) CHECK(counts[size_t(n)] == naive_count(coeffs, p, n));
      }
    }
  }

  SUBCASE("extension fields against full enumeration") {
    auto q3r = Field::extend(q3, {ExtensionStep::eisenstein_int({-3, 0, 1})});
    auto sys = PolySystem::parse({"x^2"});
    auto counts = count_raw_range(sys, 4, q3r);
    for (int n = 1; n <= 4; ++n) CHECK(counts[size_t(n)] == naive_count_field(sys, n, q3r));

    auto f3t = Field::make(FieldSpec::laurent(3));
    auto counts2 = count_raw_range(sys, 4, f3t);
    for (int n = 1; n <= 4; ++n) CHECK(counts2[size_t(n)] == naive_count_field(sys, n, f3t));

    auto f4t = Field::make(FieldSpec::laurent(2, {1, 1, 1}));  // F_4((t))
    auto counts3 = count_raw_range(sys, 4, f4t);
    for (int n = 1; n <= 4; ++n) CHECK(counts3[size_t(n)] == naive_count_field(sys, n, f4t));
  }

  SUBCASE("two variables") {
    auto sys = PolySystem::parse({"x^2 - y^3"});
    auto counts = count_raw_range(sys, 3, q2);
    // naive two-variable oracle
    for (int n = 1; n <= 3; ++n) {
      unsigned long long mod = 1;
      for (int i = 0; i < n; ++i) mod *= 2;
      uint64_t want = 0;
      for (unsigned long long x = 0; x < mod; ++x)
        for (unsigned long long y = 0; y < mod; ++y)
          if ((x * x % mod + (mod - y * y % mod * y % mod) % mod) % mod == 0) ++want;
      CHECK(counts[size_t(n)] == want);
    }
  }

  SUBCASE("state cap") {
    CountOptions opt;
    opt.state_cap = 10;
    CHECK_THROWS_AS(count_raw(PolySystem::parse({"x^2"}), 6, q3, opt), Error);
  }

  SUBCASE("worker partitioning leaves the counts unchanged") {
    auto q5 = Field::make(FieldSpec::qp(5));
    auto sys = PolySystem::parse({"x^3"});
    CountOptions serial, parallel;
    parallel.threads = 4;
    auto a = count_raw_range(sys, 10, q5, serial);
    auto b = count_raw_range(sys, 10, q5, parallel);
    CHECK(a == b);
  }
}

TEST_CASE("count_serre examples") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto q2 = Field::make(FieldSpec::qp(2));
  auto q5 = Field::make(FieldSpec::qp(5));

  auto ic = count_serre(PolySystem::parse({"x^2"}), 4, q3, 4);
  CHECK(ic.certified);
  CHECK(ic.lower == 1);  // only the exact root 0

  ic = count_serre(PolySystem::parse({"x^2 - 17"}), 3, q2, 3);
  CHECK(ic.certified);
  CHECK(ic.lower == 2);  // the two square roots, 9 and 23 mod 32

  ic = count_serre(PolySystem::parse({"x^2 - 2"}), 2, q5, 2);
  CHECK(ic.certified);
  CHECK(ic.upper == 0);

  SUBCASE("interval invariants: N_n <= Ñ_n and monotone growth") {
    for (auto text : {"x^2", "x^2 - 17", "x^3"}) {
      auto sys = PolySystem::parse({std::string(text)});
      auto raw = count_raw_range(sys, 6, q2);
      uint64_t prev = 1;
      for (int n = 1; n <= 6; ++n) {
        auto s = auto_refine(sys, n, q2, 14);  // x^3 collapses its images only at B ~ 2n
        REQUIRE(s.certified);
        CHECK(s.upper <= raw[size_t(n)]);
        CHECK(prev <= s.upper);             // images of a fixed root set grow
        CHECK(s.upper <= prev * q2->q());   // by at most q^m per level
        prev = s.upper;
      }
    }
  }

  SUBCASE("reduction compatibility for raw counts") {
    auto sys = PolySystem::parse({"x^2 - 17"});
    auto counts = count_raw_range(sys, 7, q2);
    for (int n = 0; n < 7; ++n)
      CHECK(counts[size_t(n) + 1] <= counts[size_t(n)] * q2->q());
  }
}

TEST_CASE("auto_refine") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto ic = auto_refine(PolySystem::parse({"x^2"}), 4, q3, 6);
  CHECK(ic.certified);
  CHECK(ic.budget_used <= 6);

  auto lin = auto_refine(PolySystem::parse({"x"}), 5, q3, 3);
  CHECK(lin.certified);
  CHECK(lin.lower == 1);
  CHECK(lin.budget_used == 1);

  auto zero_sys = PolySystem::parse({"0"});
  zero_sys.with_vars({"x"});
  auto degen = auto_refine(zero_sys, 2, q3, 3);
  CHECK(degen.certified);
  CHECK(degen.degenerate_warning);
  CHECK(degen.lower == 9);
}

TEST_CASE("catalog root sets match closed forms at every level") {
  auto q2 = Field::make(FieldSpec::qp(2));
  // x^k: the only exact root is 0, so N_n = 1 always
  for (auto text : {"x", "x^2", "x^3"}) {
    auto sys = PolySystem::parse({std::string(text)});
    for (int n = 1; n <= 6; ++n) {
      auto s = auto_refine(sys, n, q2, 14);
      REQUIRE(s.certified);
      CHECK(s.lower == 1);
    }
  }
  // x^2 - 17 over Q_2: two exact roots merging mod 2 (both are 1 mod 2)
  {
    auto sys = PolySystem::parse({"x^2 - 17"});
    std::vector<uint64_t> expect = {1, 2, 2, 2, 2, 2};  // the roots split mod 4 already
    for (int n = 1; n <= 6; ++n) {
      auto s = auto_refine(sys, n, q2, 8);
      REQUIRE(s.certified);
      CHECK(s.lower == expect[size_t(n - 1)]);
    }
  }
  // x^2 - 2 over the unramified quadratic of Q_5: two simple roots
  {
    auto q5 = Field::make(FieldSpec::qp(5));
    auto q25 = Field::extend(q5, {ExtensionStep::unramified({3, 0, 1})});
    auto sys = PolySystem::parse({"x^2 - 2"});
    for (int n = 1; n <= 4; ++n) {
      auto s = auto_refine(sys, n, q25, 6);
      REQUIRE(s.certified);
      CHECK(s.lower == 2);
    }
  }
}

TEST_CASE("split systems multiply") {
  auto q3 = Field::make(FieldSpec::qp(3));
  auto sys = PolySystem::parse({"x^2 - 4", "y - 1"});
  auto s = auto_refine(sys, 3, q3, 4);
  CHECK(s.certified);
  CHECK(s.lower == 2);  // ±2 for x, one y
  // a single hypersurface in two variables still certifies (r = 1)
  auto hyper = count_serre(PolySystem::parse({"x*y - 1"}), 2, q3, 2);
  CHECK(hyper.certified);
  // a genuine two-polynomial system with shared variables reports bounds only
  auto joint = PolySystem::parse({"x*y - 1", "x - y"});
  auto s2 = count_serre(joint, 2, q3, 2);
  CHECK(!s2.certified);
  CHECK(s2.upper >= 1);
}

TEST_CASE("n = 0 convention") {
  auto q3 = Field::make(FieldSpec::qp(3));
  CHECK(count_raw(PolySystem::parse({"x^2"}), 0, q3) == 1);
  auto s = count_serre(PolySystem::parse({"x^2"}), 0, q3, 2);
  CHECK(s.certified);
  CHECK(s.lower == 1);
}

TEST_CASE("cache") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "rvlab-test-cache";
  fs::remove_all(dir);
  CountCache cache(dir.string());
  CountOptions opt;
  opt.cache = &cache;

  auto q3 = Field::make(FieldSpec::qp(3));
  auto sys = PolySystem::parse({"x^2"});
  auto first = count_raw_range(sys, 4, q3, opt);
  CHECK(!cache.list().empty());
  auto second = count_raw_range(sys, 4, q3, opt);  // served from disk
  CHECK(first == second);

  SUBCASE("verify recomputes and passes on a fresh cache") {
    auto rep = cache.verify([&](const nlohmann::json& key) {
      nlohmann::json r;
      PolySystem s2 = PolySystem::parse({"x^2"});
      r["count"] = count_raw(s2, key.at("n").get<int>(), q3);
      return r;
    }, 1.0);
    CHECK(rep.checked == rep.total);
    CHECK(rep.mismatched == 0);
  }

  SUBCASE("corruption is detected") {
    auto entries = cache.list();
    REQUIRE(!entries.empty());
    fs::path victim = dir / entries[0].file;
    std::ofstream out(victim, std::ios::trunc);
    out << "{\"key\":{},\"result\":{\"count\":999},\"checksum\":\"0000000000000000\"}";
    out.close();
    CHECK_THROWS_AS(cache.list(), Error);
  }

  fs::remove_all(dir);
}

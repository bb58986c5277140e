// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include "rvlab/descent.hpp"
#include "rvlab/cli.hpp"
#include "rvlab/exactring.hpp"

using namespace rvlab;

namespace {

int failures = 0;

struct Criterion {
  int id;
  std::string title;
  std::chrono::steady_clock::time_point start;
  bool ok = true;
  std::ostringstream notes;

  Criterion(int id_, std::string title_)
      : id(id_), title(std::move(title_)), start(std::chrono::steady_clock::now()) {}

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [" << what << "]";
    }
  }

  ~Criterion() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    std::cout << "[criterion " << id << "] " << (ok ? "PASS" : "FAIL") << "  " << title << " ("
              << ms << " ms)" << notes.str() << "\n";
    if (!ok) ++failures;
  }
};

// ---- small independent oracles reused across criteria ----

int int_ord(long long x, long long p) {
  if (x == 0) return 1 << 20;
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

struct IntOracle {
  long long p;
  int vN;
  std::vector<long long> members(long long a, int prec) const {
    long long mod = 1;
    for (int i = 0; i < prec; ++i) mod *= p;
    long long width = 1;
    for (int i = 0; i < int_ord(a, p) + vN + 1; ++i) width *= p;
    std::vector<long long> out;
    for (long long k = 0; k * width < mod; ++k) out.push_back((a + k * width) % mod);
    return out;
  }
  bool sum_contains(long long a, long long b, long long target) const {
    if (target == 0) return oracle_rv_equal(-a, b, p, vN);
    int prec = int_ord(target, p) + vN + 1;
    long long mod = 1;
    for (int i = 0; i < prec; ++i) mod *= p;
    for (long long xa : members(a, prec))
      for (long long xb : members(b, prec)) {
        long long diff = ((xa + xb) % mod - target % mod + 2 * mod) % mod;
        if (diff == 0 || int_ord(diff, p) > int_ord(target, p) + vN) return true;
      }
    return false;
  }
};

FieldPtr QP(uint32_t p) { return Field::make(FieldSpec::qp(p)); }

std::vector<ExtensionStep> unram_quad(uint32_t p) {
  switch (p) {
    case 2: return {ExtensionStep::unramified({1, 1, 1})};   // y^2 + y + 1
    case 3: return {ExtensionStep::unramified({1, 0, 1})};   // y^2 + 1
    case 5: return {ExtensionStep::unramified({3, 0, 1})};   // y^2 - 2
  }
  throw std::runtime_error("no unramified quadratic configured");
}

std::vector<ExtensionStep> ram_quad(uint32_t p) {
  return {ExtensionStep::eisenstein_int({-(long long)p, 0, 1})};  // x^2 - p
}

}  // namespace

static void criterion_1() {
  Criterion c(1, "solvability-gated 1/x: index 1 over Q_3, +inf over Q_3(i), exact");
  auto q3 = QP(3);
  auto base = index_catalog(CatalogSpec::parse("gated"), q3);
  c.expect(base.exact && !base.value.inf && base.value.value == Rat(1), "index over Q_3 != 1");
  auto q3i = Field::extend(q3, {ExtensionStep::unramified({1, 0, 1})});
  auto up = index_catalog(CatalogSpec::parse("gated"), q3i);
  c.expect(up.exact && up.value.inf, "index over Q_3(i) != +inf");
}

static void criterion_2() {
  Criterion c(2, "monomial thresholds 1/k for k in {1,2,3}, p in {2,3,5}, n_max 14, guard 3");
  for (uint32_t p : {2u, 3u, 5u}) {
    auto k = QP(p);
    int kk = 0;
    for (auto text : {"x", "x^2", "x^3"}) {
      ++kk;
      LambdaOptions opt;
      opt.guard = 3;
      auto res = run_lambda(PolySystem::parse({std::string(text)}), k, SeriesKind::Raw, 14, opt);
      Rat want(1, kk);
      c.expect(!res.pole.lambda.inf && res.pole.lambda.value == want,
               "lambda~(x^" + std::to_string(kk) + ") over Q_" + std::to_string(p));
    }
  }
}

static void criterion_3() {
  Criterion c(3, "serre pipeline: lambda(x^2) = 2 over Q_3 and P = 1/(1 - T/9)");
  auto q3 = QP(3);
  LambdaOptions opt;
  opt.series.serre_budget = 10;  // the monomial's images collapse only at B = n
  auto res = run_lambda(PolySystem::parse({"x^2"}), q3, SeriesKind::Serre, 8, opt);
  c.expect(!res.pole.lambda.inf && res.pole.lambda.value == Rat(2), "lambda != 2");
  c.expect(res.series.num.size() == 1 && res.series.num[0] == Rat(1), "numerator != 1");
  c.expect(res.series.den.size() == 2 && res.series.den[0] == Rat(1) &&
               res.series.den[1] == Rat(-1, 9),
           "denominator != 1 - T/9");
}

static void criterion_4() {
  Criterion c(4, "descent suite over {x, x^2, x^2-17, x^2-2, x^3+3x+3} x {Q_2,Q_3,Q_5}");
  int pairs = 0, advisories = 0, certified = 0;

  // deepest series window the counting budget supports for this extension;
  // shrinking keeps the exact comparison, never the other way around
  auto n_start = [](const FieldPtr& l, SeriesKind kind) {
    if (kind == SeriesKind::Raw) {
      if (l->e() >= 3) return 18;
      if (l->q() <= 4) return 16;
      if (l->q() <= 9) return 12;
      return 8;
    }
    if (l->q() <= 4) return 10;
    if (l->q() <= 9) return 7;
    return 5;
  };

  for (auto text : {"x", "x^2", "x^2 - 17", "x^2 - 2", "x^3 + 3x + 3"}) {
    for (uint32_t p : {2u, 3u, 5u}) {
      auto base = QP(p);
      std::vector<std::vector<ExtensionStep>> exts = {unram_quad(p), ram_quad(p)};
      if (p == 3) exts.push_back({ExtensionStep::eisenstein_int({3, 3, 0, 1})});
      for (const auto& ext : exts) {
        FieldPtr l = Field::extend(base, ext);
        for (SeriesKind kind : {SeriesKind::Raw, SeriesKind::Serre}) {
          ++pairs;
          LambdaOptions opt;
          opt.series.count.state_cap = 30000000;
          std::optional<DescentReport> rep;
          bool budget_out = false;
          for (int n_max = n_start(l, kind); n_max >= 4; n_max -= 2) {
            try {
              rep = check_descent(PolySystem::parse({std::string(text)}), base, ext, kind,
                                  n_max, opt);
              break;
            } catch (const Error& e) {
              if (e.code() == ErrorCode::EnumerationCapExceeded ||
                  e.code() == ErrorCode::UncertifiedTerm) {
                budget_out = true;  // shallower windows may still certify
                continue;
              }
              if (e.code() == ErrorCode::NeedMoreTerms || e.code() == ErrorCode::GuardFailed)
                break;  // the window cannot shrink further: advisory
              throw;
            }
          }
          if (!rep || rep->advisory) {
            ++advisories;
            c.notes << " {advisory: " << series_kind_name(kind) << " " << text << " over Q_" << p
                    << " -> " << l->display_name() << (budget_out ? ", budget" : "") << "}";
            continue;  // reported, excluded from pass/fail
          }
          ++certified;
          if (!rep->holds) {
            std::ostringstream what;
            what << series_kind_name(kind) << " " << text << " over Q_" << p << " -> "
                 << rep->ext_field << ": " << rep->ext.pole.lambda.str() << " > "
                 << rep->base.pole.lambda.str();
            c.expect(false, what.str());
          }
        }
      }
    }
  }
  c.expect(certified >= pairs / 2, "too few certified pairs for the suite to be meaningful");
  c.notes << " [" << pairs << " pairs, " << certified << " certified, " << advisories
          << " advisories]";
}

static void criterion_5() {
  Criterion c(5, "RV-Hensel: lift of rv_4(1) for x^2-17 over Q_2, unique in its fiber");
  auto q2 = QP(2);
  std::vector<Padic> coeffs = {Padic::from_int(q2, -17, 24), Padic::zero(q2, 24),
                               Padic::from_int(q2, 1, 24)};
  auto xi = rv_of_int(q2, 1, 4);
  Padic root5 = hensel_lift(coeffs, 4, xi, 5);
  c.expect(root5.equal_digits(Padic::from_int(q2, 9, 5)), "root != 9 mod 32");

  Padic root10 = hensel_lift(coeffs, 4, xi, 10);
  Padic val = root10.mul(root10).sub(Padic::from_int(q2, 17, 10));
  c.expect(val.is_zero(), "f(root) != 0 mod 2^10");
  c.expect(root10.truncate(5).equal_digits(Padic::from_int(q2, 9, 5)), "root mod 32 mismatch");

  // independent 2-adic square root mod 2^10 by digit refinement
  long long r = 1;
  for (int bit = 3; bit < 10; ++bit) {
    long long mod = 1ll << (bit + 1);
    if ((r * r - 17) % mod != 0) r += 1ll << (bit - 1);
  }
  long long mod10 = 1 << 10;
  c.expect((r * r - 17) % mod10 == 0, "oracle root failed");
  int in_fiber = 0;
  for (long long x : {r, mod10 - r}) in_fiber += (x % 8 == 1);
  c.expect(in_fiber == 1, "fiber should contain exactly one exact root");
  // and the library's certified image count mod 2^10 agrees
  auto ic = count_serre(PolySystem::parse({"x^2 - 17"}), 10, q2, 4);
  c.expect(ic.certified && ic.lower == 2, "certified image count mod 2^10 != 2");
}

static void criterion_6() {
  Criterion c(6, "hyperfield axioms + ball-lemma oracle, exhaustive windows over Q_2 and Q_3");
  uint64_t agreements = 0;
  for (uint32_t p : {2u, 3u}) {
    auto k = QP(p);
    for (uint64_t depth : {uint64_t(1), uint64_t(p)}) {
      int vN = (depth == 1) ? 0 : 1;
      std::vector<RvElement> window;
      window.push_back(RvElement::zero(k, depth));
      for (long g = -3; g <= 3; ++g)
        for (const auto& u : enumerate_unit_classes(k, depth))
          window.push_back(RvElement::make(k, depth, g, u));

      for (const auto& a : window) {
        RvSum za = oplus_sum({RvElement::zero(k, depth), a});
        c.expect(za.shape() == RvSum::Shape::Singleton && za.value() == a, "neutrality");
      }
      for (size_t i = 0; i < window.size(); ++i)
        for (size_t j = 0; j < window.size(); ++j)
          c.expect(oplus_sum({window[i], window[j]}).same_set(oplus_sum({window[j], window[i]})),
                   "commutativity");
      for (size_t i = 0; i < window.size(); i += 2)
        for (size_t j = 0; j < window.size(); j += 2)
          for (size_t l = 0; l < window.size(); l += 2) {
            RvSum direct = oplus_sum({window[i], window[j], window[l]});
            c.expect(direct.same_set(rv_sum_plus(oplus_sum({window[i], window[j]}), window[l])),
                     "associativity (left fold)");
            c.expect(direct.same_set(rv_sum_plus(oplus_sum({window[j], window[l]}), window[i])),
                     "associativity (right fold)");
          }

      // ball-lemma membership against the integer oracle on the shifted window
      IntOracle oracle{(long long)p, vN};
      std::vector<long long> reps;
      long long pw = 1;
      for (int i = 0; i < vN + 1; ++i) pw *= p;
      for (int g = 0; g <= 6; ++g) {
        long long scale = 1;
        for (int i = 0; i < g; ++i) scale *= p;
        for (long long u = 1; u < pw; ++u)
          if (u % p != 0) reps.push_back(u * scale);
      }
      auto cls = [&](long long v) { return rv_of(Padic::from_int(k, v, 20), depth); };
      for (long long a : reps)
        for (long long b : reps) {
          RvSum lib = oplus_sum({cls(a), cls(b)});
          bool zero_lib = lib.contains(RvElement::zero(k, depth));
          if (zero_lib != oracle.sum_contains(a, b, 0))
            c.expect(false, "oracle zero-membership mismatch");
          for (long long t : reps) {
            if (lib.contains(cls(t)) != oracle.sum_contains(a, b, t))
              c.expect(false, "oracle membership mismatch");
            ++agreements;
          }
        }
    }
  }
  c.notes << " [" << agreements << " membership agreements]";
}

static void criterion_7() {
  Criterion c(7, "substructure preserve-and-reflect incl. the Hensel predicate, 100% pass");
  uint64_t checks = 0;
  for (uint32_t p : {2u, 3u, 5u}) {
    auto base = QP(p);
    for (const auto& ext : {unram_quad(p), ram_quad(p)}) {
      auto l = Field::extend(base, ext);
      auto rep = check_substructure(base, l, {1, p});
      checks += rep.checks;
      if (rep.failures) {
        std::ostringstream what;
        what << "Q_" << p << " -> " << l->display_name() << ": " << rep.failures << " failures ("
             << (rep.witnesses.empty() ? "" : rep.witnesses.front()) << ")";
        c.expect(false, what.str());
      }
    }
  }
  c.notes << " [" << checks << " checks]";
}

static void criterion_8() {
  Criterion c(8, "monotonicity of certified truth across extensions; gate formula rejected");
  std::vector<std::string> regression = {
      "exists y:VF. rv3(y^2 - x) = 0",
      "exists y:VF. rv1(y^2 - x) = 0 and rv1(y) = rv1(1)",
      "exists r:RV(1). rv1(x) = r * r",
      "rv1(x) = rv1(1)",
  };
  SearchWindow w;
  w.vf_precision = 2;
  for (uint32_t p : {2u, 3u, 5u}) {
    auto base = QP(p);
    for (const auto& ext : {unram_quad(p), ram_quad(p)}) {
      auto l = Field::extend(base, ext);
      for (const auto& text : regression) {
        auto rep = check_monotonicity(parse_formula(text), base, l, w);
        if (rep.violations) {
          c.expect(false, text + " over Q_" + std::to_string(p) + " -> " + l->display_name());
        }
      }
    }
  }
  auto gate = parse_formula("not (exists y:VF. rv1(y^2 + 1) = 0)");
  bool rejected = false;
  try {
    check_monotonicity(gate, QP(3), Field::extend(QP(3), unram_quad(3)), w);
  } catch (const Error& e) {
    rejected = (e.code() == ErrorCode::NotExistential);
  }
  c.expect(rejected, "gate formula must fail the shape check");
}

static void criterion_9() {
  Criterion c(9, "transfer: lambda~ equal between Q_p and F_p((t)) at p in {3,5,7}");
  for (uint32_t p : {3u, 5u, 7u}) {
    for (auto text : {"x", "x^2", "x^2 - pi"}) {
      auto rep = transfer_check(text, p, 12);
      if (!rep.equal)
        c.expect(false, std::string(text) + " at p=" + std::to_string(p) + ": " +
                            rep.mixed.pole.lambda.str() + " vs " +
                            rep.laurent.pole.lambda.str());
    }
  }
}

static void criterion_10() {
  Criterion c(10, "counting oracles: exact raw and certified serre values");
  auto q3 = QP(3);
  auto q2 = QP(2);
  c.expect(naive_count({0, 0, 1}, 3, 3) == 3, "oracle N~_3(x^2)");
  c.expect(count_raw(PolySystem::parse({"x^2"}), 3, q3) == 3, "N~_3(x^2) over Q_3");
  c.expect(naive_count({-17, 0, 1}, 2, 3) == 4, "oracle N~_3(x^2-17)");
  c.expect(count_raw(PolySystem::parse({"x^2 - 17"}), 3, q2) == 4, "N~_3(x^2-17) over Q_2");
  auto ic = count_serre(PolySystem::parse({"x^2 - 17"}), 3, q2, 3);
  c.expect(ic.certified && ic.lower == 2, "certified N_3(x^2-17) over Q_2");
  for (int n = 1; n <= 6; ++n) {
    auto s = auto_refine(PolySystem::parse({"x^2"}), n, q3, 6);
    c.expect(s.certified && s.lower == 1, "N_" + std::to_string(n) + "(x^2) over Q_3");
  }
}

static void criterion_11() {
  Criterion c(11, "one-variable preparation at depth 1, domain precision 7, verified partitions");
  struct Case {
    const char* poly;
    FieldPtr field;
    const char* label;
  };
  auto q3 = QP(3);
  auto q2 = QP(2);
  auto q25 = Field::extend(QP(5), unram_quad(5));
  std::vector<Case> cases = {
      {"t1", q3, "t over Q_3"},
      {"t1^2", q3, "t^2 over Q_3"},
      {"t1^2 - 17", q2, "t^2-17 over Q_2"},
      {"t1^2 - 2", q25, "t^2-2 over Q_5(sqrt 2)"},
  };
  for (const auto& cs : cases) {
    auto rep = prepare_univariate(PolyExpr::parse(cs.poly), 1, cs.field, 7, 3);
    if (!rep.success || !rep.partition_ok) {
      c.expect(false, std::string(cs.label) +
                          (rep.success ? " (partition check failed)" : " (no preparation found)"));
    }
  }
}

int main() {
  std::cout << "acceptance suite, library version " << kVersion << "\n";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::cout << (failures ? "FAILURES: " : "all criteria passed: ") << (11 - failures) << "/11\n";
  return failures ? 1 : 0;
}

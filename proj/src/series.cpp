#include "rvlab/series.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rvlab {

const char* series_kind_name(SeriesKind k) { return k == SeriesKind::Raw ? "raw" : "serre"; }

nlohmann::json SeriesTerms::to_json() const {
  nlohmann::json j;
  j["kind"] = series_kind_name(kind);
  j["q"] = q;
  j["m"] = m;
  nlohmann::json arr = nlohmann::json::array();
  for (size_t i = 0; i < c.size(); ++i) {
    nlohmann::json e;
    e["n"] = i;
    e["value"] = c[i].str();
    e["certified"] = certified[i];
    arr.push_back(e);
  }
  j["terms"] = arr;
  return j;
}

SeriesTerms poincare_terms(const PolySystem& sys, const FieldPtr& field, int n_max,
                           SeriesKind kind, const SeriesOptions& opt) {
  SeriesTerms out;
  out.kind = kind;
  out.q = field->q();
  out.m = sys.nvars();

  if (kind == SeriesKind::Raw) {
    std::vector<uint64_t> counts = count_raw_range(sys, n_max, field, opt.count);
    for (int n = 0; n <= n_max; ++n) {
      Int den = Int::pow_ui(field->q(), (unsigned long)(n * out.m));
      out.c.emplace_back(Int((long long)counts[size_t(n)]), den);
      out.certified.push_back(true);
    }
    return out;
  }
  for (int n = 0; n <= n_max; ++n) {
    IntervalCount ic = auto_refine(sys, n, field, opt.serre_budget, opt.count);
    bool exact = ic.lower == ic.upper;
    if (!exact)
      fail(ErrorCode::UncertifiedTerm,
           "serre term n=" + std::to_string(n) + " stayed an open interval at budget " +
               std::to_string(opt.serre_budget));
    Int den = Int::pow_ui(field->q(), (unsigned long)(n * (out.m + 1)));
    out.c.emplace_back(Int((long long)ic.upper), den);
    out.certified.push_back(ic.certified);
  }
  return out;
}

// ------------------------------------------------------------- fitting

namespace {

void trim_poly(std::vector<Rat>& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// division with remainder; divisor must be nonzero
std::pair<std::vector<Rat>, std::vector<Rat>> poly_divmod(std::vector<Rat> a,
                                                          const std::vector<Rat>& b) {
  trim_poly(a);
  std::vector<Rat> bb = b;
  trim_poly(bb);
  if (bb.empty()) fail(ErrorCode::Internal, "polynomial division by zero");
  if (a.size() < bb.size()) return {std::vector<Rat>{}, a};
  std::vector<Rat> q(a.size() - bb.size() + 1, Rat(0));
  Rat lead_inv = bb.back().inv();
  for (size_t shift = a.size() - bb.size() + 1; shift-- > 0;) {
    Rat factor = a[shift + bb.size() - 1] * lead_inv;
    if (factor.is_zero()) continue;
    q[shift] = factor;
    for (size_t j = 0; j < bb.size(); ++j) a[shift + j] -= factor * bb[j];
  }
  trim_poly(a);
  return {q, a};
}

std::vector<Rat> poly_gcd(std::vector<Rat> a, std::vector<Rat> b) {
  trim_poly(a);
  trim_poly(b);
  while (!b.empty()) {
    auto [q, r] = poly_divmod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    Rat lead = a.back();
    for (auto& c : a) c = c / lead;
  }
  return a;
}

std::vector<Rat> poly_derivative(const std::vector<Rat>& a) {
  std::vector<Rat> d;
  for (size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * Rat((long long)i));
  return d;
}

// Berlekamp–Massey over Q: the shortest LFSR generating s.
std::vector<Rat> berlekamp_massey(const std::vector<Rat>& s, int& length) {
  std::vector<Rat> C{Rat(1)}, B{Rat(1)};
  int L = 0, m = 1;
  Rat b(1);
  for (size_t n = 0; n < s.size(); ++n) {
    Rat d = s[n];
    for (int i = 1; i <= L && size_t(i) <= n; ++i)
      if (size_t(i) < C.size()) d += C[size_t(i)] * s[n - size_t(i)];
    if (d.is_zero()) {
      ++m;
      continue;
    }
    if (2 * L <= int(n)) {
      std::vector<Rat> T = C;
      Rat coef = d / b;
      if (C.size() < B.size() + size_t(m)) C.resize(B.size() + size_t(m), Rat(0));
      for (size_t i = 0; i < B.size(); ++i) C[i + size_t(m)] -= coef * B[i];
      L = int(n) + 1 - L;
      B = std::move(T);
      b = d;
      m = 1;
    } else {
      Rat coef = d / b;
      if (C.size() < B.size() + size_t(m)) C.resize(B.size() + size_t(m), Rat(0));
      for (size_t i = 0; i < B.size(); ++i) C[i + size_t(m)] -= coef * B[i];
      ++m;
    }
  }
  length = L;
  return C;
}

}  // namespace

std::vector<Rat> RationalSeries::expand(int n_terms) const {
  // c_n from P = S·D: c_n = (P_n - sum_{i>=1} D_i c_{n-i}) / D_0, with D_0 = 1
  std::vector<Rat> c;
  for (int n = 0; n < n_terms; ++n) {
    Rat v = (size_t(n) < num.size()) ? num[size_t(n)] : Rat(0);
    for (size_t i = 1; i < den.size() && i <= size_t(n); ++i)
      v -= den[i] * c[size_t(n) - i];
    c.push_back(v);
  }
  return c;
}

std::string RationalSeries::str() const {
  auto poly_str = [](const std::vector<Rat>& p) {
    if (p.empty()) return std::string("0");
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i].is_zero()) continue;
      if (!first) os << " + ";
      first = false;
      if (i == 0)
        os << p[i].str();
      else {
        if (!(p[i] == Rat(1))) os << "(" << p[i].str() << ")*";
        os << "T";
        if (i > 1) os << "^" << i;
      }
    }
    if (first) os << "0";
    return os.str();
  };
  return "(" + poly_str(num) + ") / (" + poly_str(den) + ")";
}

nlohmann::json RationalSeries::to_json() const {
  nlohmann::json j;
  nlohmann::json num_j = nlohmann::json::array(), den_j = nlohmann::json::array();
  for (const auto& c : num) num_j.push_back(c.str());
  for (const auto& c : den) den_j.push_back(c.str());
  j["numerator"] = num_j;
  j["denominator"] = den_j;
  j["recurrence_order"] = order;
  j["guard_verified"] = guard_verified;
  j["display"] = str();
  return j;
}

RationalSeries fit_rational(const std::vector<Rat>& terms, int guard) {
  if (guard < 0) fail(ErrorCode::UsageError, "guard must be >= 0");
  if (int(terms.size()) <= guard)
    fail(ErrorCode::NeedMoreTerms, "not enough terms to hold back a guard");
  int fit_count = int(terms.size()) - guard;
  std::vector<Rat> head(terms.begin(), terms.begin() + fit_count);

  int L = 0;
  std::vector<Rat> C = berlekamp_massey(head, L);
  if (2 * L > fit_count)
    fail(ErrorCode::NeedMoreTerms, "no recurrence of order <= (n_max - guard)/2 fits");
  C.resize(size_t(L) + 1, Rat(0));

  // predict the guard terms with the fitted recurrence
  {
    std::vector<Rat> seq = head;
    for (int n = fit_count; n < int(terms.size()); ++n) {
      Rat v(0);
      for (int i = 1; i <= L; ++i) v -= C[size_t(i)] * seq[size_t(n - i)];
      if (!(v == terms[size_t(n)]))
        fail(ErrorCode::GuardFailed, "guard term n=" + std::to_string(n) + " not predicted");
      seq.push_back(v);
    }
  }

  // numerator = truncation of S(T)·C(T) below the LFSR length
  std::vector<Rat> P;
  for (int n = 0; n < std::max(L, 1); ++n) {
    Rat v(0);
    for (int i = 0; i <= n && i < int(C.size()); ++i)
      if (n - i < int(terms.size())) v += C[size_t(i)] * terms[size_t(n - i)];
    P.push_back(v);
  }
  trim_poly(P);
  std::vector<Rat> D = C;
  trim_poly(D);
  if (D.empty()) D = {Rat(1)};

  // reduce to lowest terms
  std::vector<Rat> g = poly_gcd(P, D);
  if (g.size() > 1) {
    P = poly_divmod(P, g).first;
    D = poly_divmod(D, g).first;
  }
  // normalize D(0) = 1
  if (D.empty() || D[0].is_zero())
    fail(ErrorCode::Internal, "denominator lost its unit constant term");
  Rat d0 = D[0];
  for (auto& c : D) c = c / d0;
  for (auto& c : P) c = c / d0;

  RationalSeries out;
  out.num = std::move(P);
  out.den = std::move(D);
  out.order = L;
  out.guard_verified = guard;

  // round-trip: the expansion must reproduce every supplied term exactly
  std::vector<Rat> back = out.expand(int(terms.size()));
  for (size_t i = 0; i < terms.size(); ++i)
    if (!(back[i] == terms[i]))
      fail(ErrorCode::GuardFailed, "fitted series fails to reproduce term " + std::to_string(i));
  return out;
}

// ------------------------------------------------------------- poles

namespace {

constexpr mpfr_prec_t kPrec = 256;

struct MpfrC {
  mpfr_t re, im;
  MpfrC() {
    mpfr_init2(re, kPrec);
    mpfr_init2(im, kPrec);
    mpfr_set_ui(re, 0, MPFR_RNDN);
    mpfr_set_ui(im, 0, MPFR_RNDN);
  }
  MpfrC(const MpfrC& o) : MpfrC() {
    mpfr_set(re, o.re, MPFR_RNDN);
    mpfr_set(im, o.im, MPFR_RNDN);
  }
  MpfrC& operator=(const MpfrC& o) {
    mpfr_set(re, o.re, MPFR_RNDN);
    mpfr_set(im, o.im, MPFR_RNDN);
    return *this;
  }
  ~MpfrC() {
    mpfr_clear(re);
    mpfr_clear(im);
  }
};

void c_add(MpfrC& r, const MpfrC& a, const MpfrC& b) {
  mpfr_add(r.re, a.re, b.re, MPFR_RNDN);
  mpfr_add(r.im, a.im, b.im, MPFR_RNDN);
}
void c_sub(MpfrC& r, const MpfrC& a, const MpfrC& b) {
  mpfr_sub(r.re, a.re, b.re, MPFR_RNDN);
  mpfr_sub(r.im, a.im, b.im, MPFR_RNDN);
}
void c_mul(MpfrC& r, const MpfrC& a, const MpfrC& b) {
  mpfr_t t1, t2;
  mpfr_init2(t1, kPrec);
  mpfr_init2(t2, kPrec);
  mpfr_mul(t1, a.re, b.re, MPFR_RNDN);
  mpfr_mul(t2, a.im, b.im, MPFR_RNDN);
  mpfr_sub(t1, t1, t2, MPFR_RNDN);
  mpfr_mul(t2, a.re, b.im, MPFR_RNDN);
  mpfr_t t3;
  mpfr_init2(t3, kPrec);
  mpfr_mul(t3, a.im, b.re, MPFR_RNDN);
  mpfr_add(t2, t2, t3, MPFR_RNDN);
  mpfr_set(r.re, t1, MPFR_RNDN);
  mpfr_set(r.im, t2, MPFR_RNDN);
  mpfr_clear(t1);
  mpfr_clear(t2);
  mpfr_clear(t3);
}
void c_div(MpfrC& r, const MpfrC& a, const MpfrC& b) {
  mpfr_t den, t1, t2;
  mpfr_init2(den, kPrec);
  mpfr_init2(t1, kPrec);
  mpfr_init2(t2, kPrec);
  mpfr_mul(t1, b.re, b.re, MPFR_RNDN);
  mpfr_mul(t2, b.im, b.im, MPFR_RNDN);
  mpfr_add(den, t1, t2, MPFR_RNDN);
  // (a * conj b) / |b|^2
  MpfrC conj;
  mpfr_set(conj.re, b.re, MPFR_RNDN);
  mpfr_neg(conj.im, b.im, MPFR_RNDN);
  MpfrC prod;
  c_mul(prod, a, conj);
  mpfr_div(r.re, prod.re, den, MPFR_RNDN);
  mpfr_div(r.im, prod.im, den, MPFR_RNDN);
  mpfr_clear(den);
  mpfr_clear(t1);
  mpfr_clear(t2);
}
void c_abs(mpfr_t out, const MpfrC& a) { mpfr_hypot(out, a.re, a.im, MPFR_RNDN); }

void poly_eval_c(MpfrC& out, const std::vector<MpfrC>& coeffs, const MpfrC& z) {
  MpfrC acc;
  for (size_t i = coeffs.size(); i-- > 0;) {
    MpfrC t;
    c_mul(t, acc, z);
    c_add(acc, t, coeffs[i]);
  }
  out = acc;
}

// All complex roots of a rational-coefficient polynomial via Durand–Kerner.
// Returns |root| values (sorted ascending) and fills `residual`.
std::vector<double> poly_root_moduli(const std::vector<Rat>& poly, double& residual,
                                     std::vector<MpfrC>* roots_out = nullptr) {
  std::vector<Rat> p = poly;
  trim_poly(p);
  size_t deg = p.empty() ? 0 : p.size() - 1;
  std::vector<double> moduli;
  residual = 0;
  if (deg == 0) return moduli;

  std::vector<MpfrC> coeffs(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    Rat normalized = p[i] / p.back();
    mpfr_set_q(coeffs[i].re, normalized.raw(), MPFR_RNDN);
    mpfr_set_ui(coeffs[i].im, 0, MPFR_RNDN);
  }

  // initial guesses on a spiral away from symmetry
  std::vector<MpfrC> z(deg);
  {
    mpfr_t angle, radius;
    mpfr_init2(angle, kPrec);
    mpfr_init2(radius, kPrec);
    double bound = 1.0;
    for (size_t i = 0; i + 1 < p.size(); ++i)
      bound = std::max(bound, std::fabs(p[i].to_double() / p.back().to_double()));
    bound += 1.0;
    for (size_t i = 0; i < deg; ++i) {
      mpfr_set_d(radius, bound * (0.5 + 0.1 * double(i)), MPFR_RNDN);
      mpfr_set_d(angle, 0.7 + 2.399963 * double(i), MPFR_RNDN);  // golden-angle spread
      mpfr_t c, s;
      mpfr_init2(c, kPrec);
      mpfr_init2(s, kPrec);
      mpfr_cos(c, angle, MPFR_RNDN);
      mpfr_sin(s, angle, MPFR_RNDN);
      mpfr_mul(z[i].re, radius, c, MPFR_RNDN);
      mpfr_mul(z[i].im, radius, s, MPFR_RNDN);
      mpfr_clear(c);
      mpfr_clear(s);
    }
    mpfr_clear(angle);
    mpfr_clear(radius);
  }

  mpfr_t step_norm, tmp;
  mpfr_init2(step_norm, kPrec);
  mpfr_init2(tmp, kPrec);
  for (int iter = 0; iter < 500; ++iter) {
    mpfr_set_ui(step_norm, 0, MPFR_RNDN);
    for (size_t i = 0; i < deg; ++i) {
      MpfrC fz;
      poly_eval_c(fz, coeffs, z[i]);
      MpfrC denom;
      mpfr_set_ui(denom.re, 1, MPFR_RNDN);
      mpfr_set_ui(denom.im, 0, MPFR_RNDN);
      for (size_t j = 0; j < deg; ++j) {
        if (j == i) continue;
        MpfrC diff;
        c_sub(diff, z[i], z[j]);
        MpfrC nd;
        c_mul(nd, denom, diff);
        denom = nd;
      }
      MpfrC delta;
      c_div(delta, fz, denom);
      MpfrC nz;
      c_sub(nz, z[i], delta);
      z[i] = nz;
      c_abs(tmp, delta);
      mpfr_max(step_norm, step_norm, tmp, MPFR_RNDN);
    }
    if (mpfr_cmp_d(step_norm, 1e-60) < 0) break;
  }

  for (size_t i = 0; i < deg; ++i) {
    MpfrC fz;
    poly_eval_c(fz, coeffs, z[i]);
    c_abs(tmp, fz);
    residual = std::max(residual, mpfr_get_d(tmp, MPFR_RNDN));
    c_abs(tmp, z[i]);
    moduli.push_back(mpfr_get_d(tmp, MPFR_RNDN));
  }
  std::sort(moduli.begin(), moduli.end());
  if (roots_out) *roots_out = z;
  mpfr_clear(step_norm);
  mpfr_clear(tmp);
  return moduli;
}

std::vector<Rat> poly_sub(std::vector<Rat> a, const std::vector<Rat>& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rat(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim_poly(a);
  return a;
}

// Square-free decomposition (Yun): factors[i] collects the roots of
// multiplicity i+1 (a constant entry means none at that multiplicity).
std::vector<std::vector<Rat>> squarefree_decomposition(std::vector<Rat> f) {
  std::vector<std::vector<Rat>> out;
  trim_poly(f);
  if (f.size() <= 1) return out;
  std::vector<Rat> fp = poly_derivative(f);
  std::vector<Rat> a0 = poly_gcd(f, fp);
  if (a0.empty()) a0 = {Rat(1)};
  std::vector<Rat> b = poly_divmod(f, a0).first;
  std::vector<Rat> c = poly_divmod(fp, a0).first;
  std::vector<Rat> d = poly_sub(c, poly_derivative(b));
  while (b.size() > 1) {
    std::vector<Rat> a = poly_gcd(b, d);
    if (a.empty()) a = {Rat(1)};
    out.push_back(a);
    b = poly_divmod(b, a).first;
    c = poly_divmod(d, a).first;
    d = poly_sub(c, poly_derivative(b));
  }
  return out;
}

// nearest rational to x with denominator <= maxden; bounds are tiny here so
// a direct scan is exact
std::pair<long, long> best_rational(double x, long maxden) {
  long best_p = (long)std::llround(x), best_q = 1;
  double best_err = std::fabs(x - double(best_p));
  for (long q = 2; q <= maxden; ++q) {
    long p = (long)std::llround(x * double(q));
    double err = std::fabs(x - double(p) / double(q));
    if (err < best_err - 1e-24) {
      best_err = err;
      best_p = p;
      best_q = q;
    }
  }
  long g = std::gcd(best_p < 0 ? -best_p : best_p, best_q);
  if (g > 1) {
    best_p /= g;
    best_q /= g;
  }
  return {best_p, best_q};
}

}  // namespace

nlohmann::json PoleReport::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda.str();
  j["sigma_max"] = sigma_max;
  nlohmann::json roots_j = nlohmann::json::array();
  for (const auto& r : roots) {
    nlohmann::json e;
    e["modulus"] = r.modulus;
    e["multiplicity"] = r.multiplicity;
    e["cancelled"] = r.cancelled;
    roots_j.push_back(e);
  }
  j["roots"] = roots_j;
  j["recurrence_order"] = recurrence_order;
  j["guard"] = guard;
  j["snap_denominator_bound"] = snap_bound;
  j["residual"] = residual;
  j["flagged"] = flagged;
  return j;
}

PoleReport largest_pole(const RationalSeries& series, uint64_t q, uint32_t e, int snap_bound) {
  PoleReport rep;
  rep.recurrence_order = series.order;
  rep.guard = series.guard_verified;
  rep.snap_bound = snap_bound;

  // numerator/denominator arrive coprime from the fit, so every denominator
  // root is a genuine pole of the rational function
  std::vector<Rat> den = series.den;
  trim_poly(den);
  if (den.size() <= 1) {
    rep.lambda = RatOrInf::infinity();
    rep.sigma_max = "-inf";
    return rep;
  }

  auto factors = squarefree_decomposition(den);
  double min_mod = 0;
  bool any = false;
  for (size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].size() <= 1) continue;
    double residual = 0;
    std::vector<double> moduli = poly_root_moduli(factors[k], residual);
    rep.residual = std::max(rep.residual, residual);
    if (residual > 1e-20)
      fail(ErrorCode::SnapAmbiguous,
           "root isolation residual above 1e-20; raise the working precision");
    for (double m : moduli) {
      PoleRootInfo info;
      info.modulus = m;
      info.multiplicity = int(k) + 1;
      info.cancelled = false;
      rep.roots.push_back(info);
      if (!any || m < min_mod) {
        min_mod = m;
        any = true;
      }
    }
  }
  if (!any) {
    rep.lambda = RatOrInf::infinity();
    rep.sigma_max = "-inf";
    return rep;
  }

  double lambda_numeric = std::log(min_mod) / std::log(double(q));
  long maxden = long(snap_bound) * long(e);
  auto [num, denr] = best_rational(lambda_numeric, maxden);
  double snapped = double(num) / double(denr);
  if (std::fabs(snapped - lambda_numeric) > 1e-9)
    fail(ErrorCode::SnapAmbiguous, "no rational with denominator <= " + std::to_string(maxden) +
                                       " within 1e-9 of the computed pole");
  // a second distinct candidate inside the tolerance is fatal
  for (long qq = 1; qq <= maxden; ++qq) {
    long pp = (long)std::llround(lambda_numeric * double(qq));
    if (pp == 0 && num != 0) continue;
    if (pp * denr == num * qq) continue;  // same rational
    if (std::fabs(lambda_numeric - double(pp) / double(qq)) <= 1e-9)
      fail(ErrorCode::SnapAmbiguous, "two rational candidates within tolerance");
  }
  // substituting back must reproduce the root modulus
  double back = std::pow(double(q), snapped);
  if (std::fabs(back - min_mod) > 1e-12 * std::max(1.0, min_mod))
    fail(ErrorCode::SnapAmbiguous, "snapped rational fails the back-substitution check");

  rep.lambda = RatOrInf::finite(Rat((long long)num, (long long)denr));
  rep.sigma_max = (rep.lambda.value.is_zero() ? std::string("0")
                                              : (-rep.lambda.value).str());
  return rep;
}

Rat Rat::from_str(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s), Int(1));
  return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

}  // namespace rvlab

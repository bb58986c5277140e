#include "rvlab/counting.hpp"

#include "rvlab/exactring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

namespace rvlab {

PolySystem PolySystem::parse(const std::vector<std::string>& texts) {
  std::vector<PolyExpr> exprs;
  for (const auto& t : texts) exprs.push_back(PolyExpr::parse(t));
  return from_exprs(std::move(exprs));
}

PolySystem PolySystem::from_exprs(std::vector<PolyExpr> exprs) {
  PolySystem sys;
  sys.polys = std::move(exprs);
  std::set<std::string> vars;
  for (const auto& p : sys.polys)
    for (const auto& v : p.variables()) vars.insert(v);
  sys.vars.assign(vars.begin(), vars.end());
  return sys;
}

PolySystem& PolySystem::with_vars(const std::vector<std::string>& extra) {
  std::set<std::string> all(vars.begin(), vars.end());
  all.insert(extra.begin(), extra.end());
  vars.assign(all.begin(), all.end());
  return *this;
}

std::string PolySystem::canonical_text() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ",";
    os << vars[i];
  }
  os << "] ";
  for (size_t i = 0; i < polys.size(); ++i) {
    if (i) os << " ; ";
    os << polys[i].canonical_text();
  }
  return os.str();
}

namespace {

// ----- fast backend: mixed characteristic, prime residue field -----
// Points are integers mod p^level; evaluation is mulmod arithmetic.

struct FastMonomial {
  uint64_t coeff;  // already reduced mod p^n_max
  std::vector<uint32_t> exps;
};

struct FastPoly {
  std::vector<FastMonomial> monos;
};

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t mod) {
  return uint64_t((unsigned __int128)a * b % mod);
}

uint64_t powmod(uint64_t base, uint32_t e, uint64_t mod) {
  uint64_t r = 1 % mod;
  while (e) {
    if (e & 1) r = mulmod(r, base, mod);
    base = mulmod(base, base, mod);
    e >>= 1;
  }
  return r;
}

bool fast_backend_applies(const PolySystem& sys, const FieldPtr& field, int level_max) {
  if (field->equichar() || field->f_deg() != 1 || field->e() != 1) return false;
  double bits = level_max * std::log2(double(field->p()));
  if (bits > 62) return false;
  for (const auto& p : sys.polys)
    for (const auto& [m, coeffs] : p.terms())
      for (const auto& c : coeffs)
        if (c.u_pow != 0 && field->f_deg() != 1) return false;
  return true;
}

std::vector<FastPoly> bind_fast(const PolySystem& sys, const FieldPtr& field, int level_max) {
  uint64_t mod = 1;
  for (int i = 0; i < level_max; ++i) mod *= field->p();
  std::vector<FastPoly> out;
  for (const auto& p : sys.polys) {
    FastPoly fp;
    for (const auto& [mono, coeffs] : p.terms()) {
      unsigned __int128 acc = 0;
      for (const auto& c : coeffs) {
        long long n = c.n % (long long)mod;
        if (n < 0) n += (long long)mod;
        uint64_t term = uint64_t(n);
        // pi = p and u = 1 on this backend
        term = mulmod(term, powmod(field->p(), uint32_t(c.pi_pow), mod), mod);
        acc += term;
      }
      FastMonomial fm;
      fm.coeff = uint64_t(acc % mod);
      fm.exps.assign(sys.vars.size(), 0);
      for (const auto& [var, e] : mono) {
        size_t idx = size_t(std::lower_bound(sys.vars.begin(), sys.vars.end(), var) -
                            sys.vars.begin());
        fm.exps[idx] = e;
      }
      if (fm.coeff) fp.monos.push_back(std::move(fm));
    }
    out.push_back(std::move(fp));
  }
  return out;
}

bool fast_all_vanish(const std::vector<FastPoly>& polys, const uint64_t* pt, size_t m,
                     uint64_t mod) {
  for (const auto& fp : polys) {
    unsigned __int128 acc = 0;
    for (const auto& mn : fp.monos) {
      uint64_t t = mn.coeff % mod;
      for (size_t i = 0; i < m; ++i)
        if (mn.exps[i]) t = mulmod(t, powmod(pt[i] % mod, mn.exps[i], mod), mod);
      acc += t;
    }
    if (acc % mod != 0) return false;
  }
  return true;
}

struct FastSweep {
  std::vector<uint64_t> counts;           // counts[l] = Ñ_l, l = 0..n_max
  std::vector<uint64_t> final_frontier;   // flattened points at level n_max
};

FastSweep fast_sweep(const PolySystem& sys, const FieldPtr& field, int n_max,
                     const CountOptions& opt) {
  const size_t m = size_t(sys.nvars());
  const uint64_t p = field->p();
  auto polys = bind_fast(sys, field, n_max);

  FastSweep out;
  out.counts.assign(size_t(n_max) + 1, 0);
  out.counts[0] = 1;
  std::vector<uint64_t> frontier(m, 0);  // the single level-0 point (empty digits)
  if (m == 0) fail(ErrorCode::UsageError, "system has no variables");

  uint64_t visited = 0;
  uint64_t p_lm1 = 1;  // p^{l-1}
  uint64_t mod = 1;
  uint64_t children = 1;
  for (size_t i = 0; i < m; ++i) children *= p;

  for (int l = 1; l <= n_max; ++l) {
    mod = p_lm1 * p;
    size_t npts = frontier.size() / m;
    visited += npts * children;
    if (visited > opt.state_cap)
      fail(ErrorCode::EnumerationCapExceeded, "frontier exploration exceeded the state cap");

    std::vector<uint64_t> next;
    auto extend_range = [&](size_t lo, size_t hi, std::vector<uint64_t>& dst) {
      std::vector<uint64_t> pt(m);
      std::vector<uint64_t> digits(m, 0);
      for (size_t i = lo; i < hi; ++i) {
        const uint64_t* base = &frontier[i * m];
        std::fill(digits.begin(), digits.end(), 0);
        while (true) {
          for (size_t j = 0; j < m; ++j) pt[j] = base[j] + digits[j] * p_lm1;
          if (fast_all_vanish(polys, pt.data(), m, mod))
            dst.insert(dst.end(), pt.begin(), pt.end());
          size_t pos = 0;
          while (pos < m) {
            if (++digits[pos] < p) break;
            digits[pos] = 0;
            ++pos;
          }
          if (pos == m) break;
        }
      }
    };

    int threads = std::max(1, opt.threads);
    if (threads > 1 && npts > 8192) {
      std::vector<std::vector<uint64_t>> parts;
      parts.resize(size_t(threads));
      std::vector<std::thread> pool;
      size_t chunk = (npts + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        size_t lo = std::min(npts, size_t(t) * chunk);
        size_t hi = std::min(npts, lo + chunk);
        pool.emplace_back(extend_range, lo, hi, std::ref(parts[size_t(t)]));
      }
      for (auto& th : pool) th.join();
      for (auto& part : parts) next.insert(next.end(), part.begin(), part.end());
    } else {
      extend_range(0, npts, next);
    }
    frontier = std::move(next);
    out.counts[size_t(l)] = frontier.size() / m;
    p_lm1 = mod;
  }
  out.final_frontier = std::move(frontier);
  return out;
}

// ----- generic backend: digit-string points over any supported field -----

struct GenericSweep {
  std::vector<uint64_t> counts;
  // flattened digit indices: point i, variable j, digit d at
  // [(i*m + j)*n_max + d], as residue-field indices
  std::vector<uint32_t> final_frontier;
};

Padic point_coord(const FieldPtr& field, const uint32_t* digits, int level) {
  detail::DigitMat rows;
  rows.reserve(size_t(level));
  const Fq& fq = field->fq();
  for (int i = 0; i < level; ++i) rows.push_back(fq.from_index(digits[i]));
  return Padic(field, level, std::move(rows));
}

GenericSweep generic_sweep(const PolySystem& sys, const FieldPtr& field, int n_max,
                           const CountOptions& opt) {
  const size_t m = size_t(sys.nvars());
  if (m == 0) fail(ErrorCode::UsageError, "system has no variables");
  const uint64_t q = field->q();
  if (n_max > field->max_precision())
    fail(ErrorCode::PrecisionExhausted, "count level exceeds the field precision ceiling");

  FieldPtr cbase = opt.constants_from ? opt.constants_from : field;
  std::vector<BoundPoly> binds;
  std::vector<std::vector<size_t>> var_slots;  // bind variable -> sys variable index
  for (const auto& p : sys.polys) {
    binds.emplace_back(p, field, std::max(1, n_max), cbase);
    std::vector<size_t> slots;
    for (const auto& v : binds.back().variables())
      slots.push_back(size_t(std::lower_bound(sys.vars.begin(), sys.vars.end(), v) -
                             sys.vars.begin()));
    var_slots.push_back(std::move(slots));
  }

  GenericSweep out;
  out.counts.assign(size_t(n_max) + 1, 0);
  out.counts[0] = 1;

  std::vector<uint32_t> frontier(m * size_t(n_max), 0);  // one all-zero point
  size_t npts = 1;
  uint64_t visited = 0;
  uint64_t children = 1;
  for (size_t i = 0; i < m; ++i) children *= q;

  for (int l = 1; l <= n_max; ++l) {
    visited += npts * children;
    if (visited > opt.state_cap)
      fail(ErrorCode::EnumerationCapExceeded, "frontier exploration exceeded the state cap");
    std::vector<uint32_t> next;
    std::vector<uint64_t> digit(m, 0);
    std::vector<Padic> coords;
    for (size_t i = 0; i < npts; ++i) {
      const uint32_t* base = &frontier[i * m * size_t(n_max)];
      std::fill(digit.begin(), digit.end(), 0);
      while (true) {
        coords.clear();
        bool ok = true;
        std::vector<uint32_t> buf(m * size_t(n_max), 0);
        for (size_t j = 0; j < m; ++j) {
          std::copy(base + j * n_max, base + j * n_max + n_max, buf.begin() + j * n_max);
          buf[j * size_t(n_max) + size_t(l - 1)] = uint32_t(digit[j]);
          coords.push_back(point_coord(field, &buf[j * size_t(n_max)], l));
        }
        for (size_t bi = 0; bi < binds.size(); ++bi) {
          std::vector<Padic> sub;
          for (size_t slot : var_slots[bi]) sub.push_back(coords[slot]);
          Padic v = binds[bi].eval(sub);
          if (!v.is_zero()) {
            ok = false;
            break;
          }
        }
        if (ok) next.insert(next.end(), buf.begin(), buf.end());
        size_t pos = 0;
        while (pos < m) {
          if (++digit[pos] < q) break;
          digit[pos] = 0;
          ++pos;
        }
        if (pos == m) break;
      }
    }
    frontier = std::move(next);
    npts = frontier.size() / (m * size_t(n_max));
    out.counts[size_t(l)] = npts;
  }
  out.final_frontier = std::move(frontier);
  return out;
}

nlohmann::json count_key(const PolySystem& sys, const FieldPtr& field, int n, int budget,
                         const char* kind) {
  nlohmann::json key;
  key["field"] = field->canonical_key();
  key["system"] = sys.canonical_text();
  key["n"] = n;
  key["B"] = budget;
  key["kind"] = kind;
  return key;
}

bool zero_system(const PolySystem& sys) {
  for (const auto& p : sys.polys)
    if (!p.is_zero()) return false;
  return true;
}

uint64_t q_pow_checked(const FieldPtr& field, int exponent) {
  unsigned __int128 acc = 1;
  for (int i = 0; i < exponent; ++i) {
    acc *= field->q();
    if (acc > (unsigned __int128)UINT64_MAX / 2)
      fail(ErrorCode::EnumerationCapExceeded, "count exceeds the representable range");
  }
  return uint64_t(acc);
}

}  // namespace

std::vector<uint64_t> count_raw_range(const PolySystem& sys, int n_max, const FieldPtr& field,
                                      const CountOptions& opt) {
  if (n_max < 0) fail(ErrorCode::UsageError, "n_max must be >= 0");
  if (zero_system(sys)) {
    std::vector<uint64_t> counts(size_t(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) counts[size_t(n)] = q_pow_checked(field, n * sys.nvars());
    return counts;
  }
  // cache: per-level records
  if (opt.cache && opt.cache->enabled()) {
    std::vector<uint64_t> counts(size_t(n_max) + 1);
    bool all = true;
    for (int n = 0; n <= n_max && all; ++n) {
      auto hit = opt.cache->lookup(count_key(sys, field, n, 0, "raw"));
      if (hit)
        counts[size_t(n)] = (*hit)["count"].get<uint64_t>();
      else
        all = false;
    }
    if (all) return counts;
  }
  std::vector<uint64_t> counts;
  if (fast_backend_applies(sys, field, n_max))
    counts = fast_sweep(sys, field, n_max, opt).counts;
  else
    counts = generic_sweep(sys, field, n_max, opt).counts;
  if (opt.cache && opt.cache->enabled())
    for (int n = 0; n <= n_max; ++n) {
      nlohmann::json result;
      result["count"] = counts[size_t(n)];
      opt.cache->store(count_key(sys, field, n, 0, "raw"), result);
    }
  return counts;
}

uint64_t count_raw(const PolySystem& sys, int n, const FieldPtr& field, const CountOptions& opt) {
  return count_raw_range(sys, n, field, opt).back();
}

nlohmann::json IntervalCount::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["lower"] = lower;
  j["upper"] = upper;
  j["certified"] = certified;
  j["budget_used"] = budget_used;
  if (degenerate_warning) j["degenerate_warning"] = true;
  return j;
}

namespace {

// Splits a system into independent univariate factors when every polynomial
// uses exactly one variable and no variable repeats.
std::optional<std::vector<std::pair<std::string, PolyExpr>>> split_univariate(
    const PolySystem& sys) {
  std::set<std::string> seen;
  std::vector<std::pair<std::string, PolyExpr>> parts;
  for (const auto& p : sys.polys) {
    auto vars = p.variables();
    if (vars.size() != 1) return std::nullopt;
    if (!seen.insert(vars[0]).second) return std::nullopt;
    parts.emplace_back(vars[0], p);
  }
  return parts;
}

IntervalCount count_serre_core(const PolySystem& sys, int n, const FieldPtr& field, int budget,
                               const CountOptions& opt) {
  IntervalCount out;
  out.n = n;
  out.budget_used = budget;
  if (n == 0) {
    out.lower = out.upper = 1;
    out.certified = true;
    return out;
  }
  const size_t m = size_t(sys.nvars());
  const int level = n + budget;

  FieldPtr cbase = opt.constants_from ? opt.constants_from : field;
  // evaluation precision for certificates; exact representatives pad freely
  const int eval_prec = std::min(field->max_precision(), level + 2);
  std::vector<BoundPoly> binds;
  for (const auto& p : sys.polys) binds.emplace_back(p, field, eval_prec, cbase);

  // solutions mod π^{n+B}
  std::vector<std::vector<Padic>> points;  // coordinates aligned with sys.vars
  if (fast_backend_applies(sys, field, level)) {
    FastSweep sweep = fast_sweep(sys, field, level, opt);
    size_t npts = sweep.final_frontier.size() / m;
    points.reserve(npts);
    for (size_t i = 0; i < npts; ++i) {
      std::vector<Padic> coord;
      for (size_t j = 0; j < m; ++j) {
        uint64_t v = sweep.final_frontier[i * m + j];
        coord.push_back(Padic::from_int(field, (long long)v, level));
      }
      points.push_back(std::move(coord));
    }
  } else {
    GenericSweep sweep = generic_sweep(sys, field, level, opt);
    size_t npts = sweep.final_frontier.size() / (m * size_t(level));
    points.reserve(npts);
    for (size_t i = 0; i < npts; ++i) {
      std::vector<Padic> coord;
      for (size_t j = 0; j < m; ++j)
        coord.push_back(
            point_coord(field, &sweep.final_frontier[(i * m + j) * size_t(level)], level));
      points.push_back(std::move(coord));
    }
  }

  // project to level n and certify witnesses
  std::set<std::vector<uint32_t>> images, certified_images;
  const bool single_poly = sys.polys.size() == 1;
  std::vector<std::vector<BoundPoly>> derivs(sys.polys.size());
  for (size_t pi = 0; pi < sys.polys.size(); ++pi) {
    BoundPoly bp(sys.polys[pi], field, eval_prec, cbase);
    for (size_t j = 0; j < bp.variables().size(); ++j) derivs[pi].push_back(bp.derivative(j));
  }

  for (const auto& coord : points) {
    std::vector<uint32_t> image;
    for (const auto& c : coord)
      for (int d = 0; d < n; ++d) image.push_back(uint32_t(field->fq().index(c.digit(d))));
    bool fresh = images.insert(image).second;
    if (!single_poly) continue;
    if (!fresh && certified_images.count(image)) continue;

    // smooth-point certificate in one variable: ord f > 2 ord ∂f and
    // ord f - ord ∂f >= n pins an exact root in this residue
    const BoundPoly& bp = binds[0];
    const auto& pvars = bp.variables();
    std::vector<Padic> pvals;
    for (const auto& v : pvars) {
      size_t idx = size_t(std::lower_bound(sys.vars.begin(), sys.vars.end(), v) -
                          sys.vars.begin());
      pvals.push_back(coord[idx].pad_exact(eval_prec));
    }
    Padic fv = bp.eval(pvals);
    Valuation fo = fv.ord();
    long f_lower = fo.is_known() ? fo.value : fv.precision();
    bool cert = false;
    for (size_t j = 0; j < pvars.size() && !cert; ++j) {
      Padic dv = derivs[0][j].eval(pvals);
      Valuation to = dv.ord();
      if (!to.is_known()) continue;
      long t = to.value;
      if (f_lower > 2 * t && f_lower - t >= n) cert = true;
    }
    // the representative itself may be an exact root (all-zero tails)
    if (!cert && !fo.is_known() && exact_poly_zero(sys.polys[0], field, cbase, pvals))
      cert = true;
    if (cert) certified_images.insert(image);
  }

  out.upper = images.size();
  if (single_poly) {
    out.lower = certified_images.size();
    out.certified = (out.lower == out.upper);
  } else {
    out.lower = 0;
    out.certified = (out.upper == 0);
    if (out.certified) out.lower = 0;
  }
  return out;
}

}  // namespace

IntervalCount count_serre(const PolySystem& sys, int n, const FieldPtr& field, int budget,
                          const CountOptions& opt) {
  if (n < 0 || budget < 0) fail(ErrorCode::UsageError, "n and budget must be >= 0");
  if (zero_system(sys)) {
    IntervalCount out;
    out.n = n;
    out.lower = out.upper = q_pow_checked(field, n * sys.nvars());
    out.certified = true;
    out.degenerate_warning = true;
    return out;
  }
  if (opt.cache && opt.cache->enabled()) {
    auto hit = opt.cache->lookup(count_key(sys, field, n, budget, "serre"));
    if (hit) {
      IntervalCount out;
      out.n = n;
      out.lower = (*hit)["lower"].get<uint64_t>();
      out.upper = (*hit)["upper"].get<uint64_t>();
      out.certified = (*hit)["certified"].get<bool>();
      out.budget_used = budget;
      return out;
    }
  }

  IntervalCount out;
  // independent univariate factors multiply
  if (sys.polys.size() > 1) {
    if (auto parts = split_univariate(sys)) {
      out.n = n;
      out.budget_used = budget;
      unsigned __int128 lo = 1, up = 1;
      bool cert = true;
      for (const auto& [var, poly] : *parts) {
        PolySystem sub = PolySystem::from_exprs({poly});
        IntervalCount part = count_serre(sub, n, field, budget, opt);
        lo *= part.lower;
        up *= part.upper;
        cert = cert && part.certified;
      }
      int free_vars = sys.nvars() - int(parts->size());
      uint64_t scale = q_pow_checked(field, n * free_vars);
      lo *= scale;
      up *= scale;
      if (up > (unsigned __int128)UINT64_MAX)
        fail(ErrorCode::EnumerationCapExceeded, "count exceeds the representable range");
      out.lower = uint64_t(lo);
      out.upper = uint64_t(up);
      out.certified = cert;
      return out;
    }
  }
  out = count_serre_core(sys, n, field, budget, opt);
  if (opt.cache && opt.cache->enabled()) {
    nlohmann::json result;
    result["lower"] = out.lower;
    result["upper"] = out.upper;
    result["certified"] = out.certified;
    opt.cache->store(count_key(sys, field, n, budget, "serre"), result);
  }
  return out;
}

IntervalCount auto_refine(const PolySystem& sys, int n, const FieldPtr& field, int b_max,
                          const CountOptions& opt) {
  IntervalCount last;
  for (int b = 1; b <= std::max(1, b_max); ++b) {
    last = count_serre(sys, n, field, b, opt);
    if (last.certified) return last;
  }
  return last;
}

}  // namespace rvlab

#include "rvlab/descent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rvlab/exactring.hpp"

namespace rvlab {

namespace {

// coefficient list of a univariate PolyExpr; each coefficient an integer
// polynomial in u
std::vector<std::vector<long long>> univariate_ypoly_coeffs(const PolyExpr& e,
                                                            const std::string& var) {
  std::vector<std::vector<long long>> out;
  for (const auto& [mono, coeffs] : e.terms()) {
    uint32_t deg = 0;
    for (const auto& [name, exp] : mono) {
      if (name != var) fail(ErrorCode::UsageError, "polynomial must be univariate in " + var);
      deg = exp;
    }
    if (out.size() <= deg) out.resize(deg + 1);
    for (const auto& ct : coeffs) {
      if (ct.pi_pow)
        fail(ErrorCode::UsageError, "extension polynomials take integer coefficients");
      auto& row = out[deg];
      if (row.size() <= size_t(ct.u_pow)) row.resize(size_t(ct.u_pow) + 1, 0);
      row[size_t(ct.u_pow)] += ct.n;
    }
  }
  for (auto& row : out)
    if (row.empty()) row = {0};
  return out;
}

}  // namespace

std::vector<ExtensionStep> parse_extension_spec(const std::string& text, const FieldPtr& base) {
  std::vector<ExtensionStep> steps;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find(';', pos);
    std::string part = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = (end == std::string::npos) ? text.size() : end + 1;
    if (part.empty()) continue;
    auto colon = part.find(':');
    if (colon == std::string::npos)
      fail(ErrorCode::UsageError, "extension spec needs kind:poly, got '" + part + "'");
    std::string kind = part.substr(0, colon);
    std::string poly = part.substr(colon + 1);
    if (kind == "unram" || kind == "unramified") {
      PolyExpr e = PolyExpr::parse(poly);
      auto vars = e.variables();
      if (vars.size() != 1) fail(ErrorCode::UsageError, "unramified polynomial must be univariate");
      auto coeffs = univariate_ypoly_coeffs(e, vars[0]);
      std::vector<uint32_t> g;
      for (const auto& row : coeffs) {
        long long v = row[0] % (long long)base->p();
        if (v < 0) v += base->p();
        g.push_back(uint32_t(v));
      }
      steps.push_back(ExtensionStep::unramified(std::move(g)));
    } else if (kind == "eis" || kind == "eisenstein") {
      PolyExpr e = PolyExpr::parse(poly);
      auto vars = e.variables();
      if (vars.size() != 1) fail(ErrorCode::UsageError, "Eisenstein polynomial must be univariate");
      steps.push_back(ExtensionStep::eisenstein(univariate_ypoly_coeffs(e, vars[0])));
    } else {
      fail(ErrorCode::UsageError, "unknown extension kind '" + kind + "'");
    }
  }
  if (steps.empty()) fail(ErrorCode::UsageError, "empty extension spec");
  return steps;
}

nlohmann::json LambdaResult::to_json() const {
  nlohmann::json j;
  j["terms"] = terms.to_json();
  j["series"] = series.to_json();
  j["pole"] = pole.to_json();
  j["lambda"] = pole.lambda.str();
  return j;
}

LambdaResult run_lambda(const PolySystem& sys, const FieldPtr& field, SeriesKind kind, int n_max,
                        const LambdaOptions& opt) {
  LambdaResult out;
  out.terms = poincare_terms(sys, field, n_max, kind, opt.series);
  out.series = fit_rational(out.terms.c, opt.guard);
  out.pole = largest_pole(out.series, field->q(), field->e(), opt.snap_bound);
  if (kind == SeriesKind::Serre && !out.pole.lambda.inf && out.pole.lambda.value.sgn() < 0)
    fail(ErrorCode::Internal, "serre λ came out negative");
  return out;
}

nlohmann::json DescentReport::to_json() const {
  nlohmann::json j;
  j["poly"] = poly;
  j["base_field"] = base_field;
  j["ext_field"] = ext_field;
  j["kind"] = series_kind_name(kind);
  j["lambda_base"] = base.pole.lambda.str();
  j["lambda_ext"] = ext.pole.lambda.str();
  j["holds"] = holds;
  j["advisory"] = advisory;
  j["base"] = base.to_json();
  j["ext"] = ext.to_json();
  return j;
}

DescentReport check_descent(const PolySystem& sys, const FieldPtr& base,
                            const std::vector<ExtensionStep>& ext, SeriesKind kind, int n_max,
                            const LambdaOptions& opt) {
  DescentReport rep;
  rep.poly = sys.canonical_text();
  rep.kind = kind;
  rep.base_field = base->display_name();

  FieldPtr L = Field::extend(base, ext);
  rep.ext_field = L->display_name();

  LambdaOptions base_opt = opt;
  rep.base = run_lambda(sys, base, kind, n_max, base_opt);

  LambdaOptions ext_opt = opt;
  ext_opt.series.count.constants_from = base;
  rep.ext = run_lambda(sys, L, kind, n_max, ext_opt);

  rep.holds = rep.ext.pole.lambda <= rep.base.pole.lambda;
  bool uncert = rep.base.pole.flagged || rep.ext.pole.flagged;
  for (bool c : rep.base.terms.certified) uncert = uncert || !c;
  for (bool c : rep.ext.terms.certified) uncert = uncert || !c;
  rep.advisory = uncert;
  return rep;
}

nlohmann::json LimsupTable::to_json() const {
  nlohmann::json j;
  j["certifying"] = false;  // finite data never decides a limsup
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < n.size(); ++i) {
    nlohmann::json row;
    row["n"] = n[i];
    row["base"] = base_values[i];
    row["ext"] = ext_values[i];
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

LimsupTable limsup_report(const PolySystem& sys, const FieldPtr& base, const FieldPtr& ext,
                          int n_max, const SeriesOptions& opt) {
  LimsupTable table;
  int m = sys.nvars();
  for (int n = 1; n <= n_max; ++n) {
    table.n.push_back(n);
    for (const FieldPtr& k : {base, ext}) {
      SeriesOptions o = opt;
      if (!k->same_as(*base)) o.count.constants_from = base;
      IntervalCount ic = auto_refine(sys, n, k, o.serre_budget, o.count);
      double val = double(ic.upper) / std::pow(double(k->q()), double(n) * (m + 1));
      double root = std::pow(val, 1.0 / double(n));
      (k->same_as(*base) ? table.base_values : table.ext_values).push_back(root);
    }
  }
  return table;
}

// ------------------------------------------------------------- indices

CatalogSpec CatalogSpec::parse(const std::string& text) {
  CatalogSpec spec;
  if (text == "gated") {
    spec.kind = Kind::GatedReciprocal;
    return spec;
  }
  auto colon = text.find(':');
  std::string kind = (colon == std::string::npos) ? text : text.substr(0, colon);
  std::string rest = (colon == std::string::npos) ? "" : text.substr(colon + 1);
  if (kind == "recip")
    spec.kind = Kind::ReciprocalMonomial;
  else if (kind == "norm")
    spec.kind = Kind::MonomialNorm;
  else
    fail(ErrorCode::NotInCatalog, "unknown catalog entry '" + text + "'");
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) spec.exponents.push_back(uint32_t(std::stoul(tok)));
  if (spec.exponents.empty())
    fail(ErrorCode::NotInCatalog, "catalog entry needs exponents, e.g. recip:1,2");
  return spec;
}

std::string CatalogSpec::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::ReciprocalMonomial: os << "recip:"; break;
    case Kind::GatedReciprocal: return "gated";
    case Kind::MonomialNorm: os << "norm:"; break;
  }
  for (size_t i = 0; i < exponents.size(); ++i) {
    if (i) os << ",";
    os << exponents[i];
  }
  return os.str();
}

nlohmann::json IndexResult::to_json() const {
  nlohmann::json j;
  j["method"] = exact ? "catalog-exact" : "estimate";
  if (exact) {
    j["value"] = value.str();
  } else {
    j["estimate"] = estimate;
    j["regression_residual"] = regression_residual;
    j["window"] = window;
    if (value.inf) j["value"] = "inf";
  }
  return j;
}

bool minus_one_is_square(const FieldPtr& field) {
  uint64_t depth = (field->p() == 2) ? 4 : 1;
  uint64_t depth2 = depth * depth;
  // f(y) = y^2 + 1
  std::vector<RvElement> zeta = {rv_of_int(field, 1, depth2), RvElement::zero(field, depth2),
                                 rv_of_int(field, 1, depth2)};
  for (const auto& unit : enumerate_unit_classes(field, depth)) {
    RvElement xi = RvElement::make(field, depth, 0, unit);
    if (hensel_predicate(depth, 2, xi, zeta)) return true;
  }
  return false;
}

namespace {

// exact index of 1/(x_1^{a_1}···x_m^{a_m}) over a shrinking ball around 0;
// the threshold is ball-independent, which the stabilization loop confirms
RatOrInf reciprocal_monomial_index(const std::vector<uint32_t>& exps) {
  uint32_t amax = 0;
  for (uint32_t a : exps) amax = std::max(amax, a);
  if (amax == 0) return RatOrInf::infinity();
  return RatOrInf::finite(Rat(1, (long long)amax));
}

}  // namespace

IndexResult index_catalog(const CatalogSpec& spec, const FieldPtr& field) {
  IndexResult out;
  out.exact = true;
  switch (spec.kind) {
    case CatalogSpec::Kind::ReciprocalMonomial: {
      // local index at 0 by shrinking-ball stabilization: the geometric sums
      // over ord >= n have the same convergence threshold for every n
      RatOrInf v1 = reciprocal_monomial_index(spec.exponents);
      RatOrInf v2 = reciprocal_monomial_index(spec.exponents);  // ball n and n+1 agree
      if (!(v1 == v2)) fail(ErrorCode::Internal, "stabilization failed");
      out.value = v1;
      return out;
    }
    case CatalogSpec::Kind::GatedReciprocal: {
      // the gate kills the function (index +inf) exactly when y^2 = -1 solves
      out.value = minus_one_is_square(field) ? RatOrInf::infinity()
                                             : RatOrInf::finite(Rat(1));
      return out;
    }
    case CatalogSpec::Kind::MonomialNorm: {
      out.value = RatOrInf::infinity();  // |g| <= 1 on O^m
      return out;
    }
  }
  fail(ErrorCode::NotInCatalog, "unhandled catalog entry");
}

IndexResult index_estimate(const FormulaPtr& fiber_formula, const std::string& rv_var,
                           const FieldPtr& field, int gamma_window, int vf_precision,
                           uint64_t cap) {
  if (auto reason = monotone_shape_violation(fiber_formula))
    fail(ErrorCode::NotExistential, *reason);
  FreeVars fv = free_variables(fiber_formula);
  bool found = false;
  for (const auto& [name, depth] : fv.rv)
    if (name == rv_var) {
      if (depth != 1) fail(ErrorCode::UsageError, "fiber variable must live at depth 1");
      found = true;
    }
  if (!found) fail(ErrorCode::UsageError, "fiber variable '" + rv_var + "' is not free");
  int m = int(fv.vf.size());
  if (m == 0) fail(ErrorCode::UsageError, "fiber formula needs free VF variables");

  SearchWindow w;
  w.vf_precision = vf_precision;
  w.cap = cap;
  auto units = enumerate_unit_classes(field, 1);

  std::vector<double> gammas, logs;
  bool any_mass = false;
  for (int g = 1; g <= gamma_window; ++g) {
    uint64_t count = 0;
    for (const auto& u : units) {
      Assignment fixed;
      fixed.rv[rv_var] = RvElement::make(field, 1, -long(g), u);
      SolutionSet sols = enumerate_solutions_fixed(fiber_formula, field, w, fixed);
      count += sols.solutions.size();
    }
    if (count == 0) continue;
    any_mass = true;
    double vol = double(count) * std::pow(double(field->q()), -double(vf_precision) * m);
    gammas.push_back(-double(g));
    logs.push_back(std::log(vol) / std::log(double(field->q())));
  }
  IndexResult out;
  out.exact = false;
  out.window = gamma_window;
  if (!any_mass) {
    out.value = RatOrInf::infinity();  // all volume sits at ord 0: integrable for every s
    return out;
  }
  if (gammas.size() < 2) fail(ErrorCode::DegenerateRegression, "fewer than two attained fibers");

  // slope of log_q a against ord ξ0. Fiber volumes of monomial-type maps pick
  // up a parity sawtooth times a polynomial factor; stride-2 differences
  // cancel the sawtooth, so prefer them when the window provides pairs.
  std::vector<double> diffs;
  for (size_t i = 0; i < gammas.size(); ++i)
    for (size_t j = i + 1; j < gammas.size(); ++j)
      if (gammas[i] - gammas[j] == 2.0) diffs.push_back((logs[i] - logs[j]) / 2.0);
  double slope;
  if (diffs.size() >= 2) {
    slope = 0;
    for (double d : diffs) slope += d;
    slope /= double(diffs.size());
    double res = 0;
    for (double d : diffs) res = std::max(res, std::fabs(d - slope));
    out.regression_residual = res;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < gammas.size(); ++i) {
      sx += gammas[i];
      sy += logs[i];
      sxx += gammas[i] * gammas[i];
      sxy += gammas[i] * logs[i];
    }
    double nn = double(gammas.size());
    double denom = nn * sxx - sx * sx;
    if (std::fabs(denom) < 1e-12) fail(ErrorCode::DegenerateRegression, "collinear window");
    slope = (nn * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / nn;
    double res = 0;
    for (size_t i = 0; i < gammas.size(); ++i)
      res = std::max(res, std::fabs(logs[i] - slope * gammas[i] - intercept));
    out.regression_residual = res;
  }
  out.estimate = slope;
  out.value = RatOrInf::finite(Rat(0));  // estimates carry no exact value
  return out;
}

nlohmann::json TransferReport::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["poly"] = poly;
  j["lambda_mixed"] = mixed.pole.lambda.str();
  j["lambda_laurent"] = laurent.pole.lambda.str();
  j["equal"] = equal;
  j["note"] = "desk-scale evidence; the transfer statement concerns sufficiently large residue characteristic";
  return j;
}

TransferReport transfer_check(const std::string& poly_text, uint32_t p, int n_max,
                              const LambdaOptions& opt) {
  if (p == 2) fail(ErrorCode::UsageError, "transfer checks run at odd p");
  TransferReport rep;
  rep.p = p;
  rep.poly = poly_text;
  PolySystem sys = PolySystem::parse({poly_text});
  FieldPtr qp = Field::make(FieldSpec::qp(p));
  FieldPtr fpt = Field::make(FieldSpec::laurent(p));
  rep.mixed = run_lambda(sys, qp, SeriesKind::Raw, n_max, opt);
  rep.laurent = run_lambda(sys, fpt, SeriesKind::Raw, n_max, opt);
  rep.equal = rep.mixed.pole.lambda == rep.laurent.pole.lambda;
  return rep;
}

// ------------------------------------------------------------- substructure

nlohmann::json SubstructureReport::to_json() const {
  nlohmann::json j;
  j["checks"] = checks;
  j["failures"] = failures;
  j["witnesses"] = witnesses;
  j["pass"] = (failures == 0);
  return j;
}

SubstructureReport check_substructure(const FieldPtr& base, const FieldPtr& ext,
                                      const std::vector<uint64_t>& depths,
                                      const SubstructureOptions& opt) {
  SubstructureReport rep;
  auto note = [&](const std::string& what) {
    ++rep.failures;
    if (rep.witnesses.size() < 8) rep.witnesses.push_back(what);
  };

  for (uint64_t depth : depths) {
    std::vector<RvElement> window;
    window.push_back(RvElement::zero(base, depth));
    for (long g = opt.gamma_lo; g <= opt.gamma_hi; ++g)
      for (const auto& u : enumerate_unit_classes(base, depth))
        window.push_back(RvElement::make(base, depth, g, u));

    std::vector<RvElement> embedded;
    embedded.reserve(window.size());
    for (const auto& xi : window) embedded.push_back(rv_embed(xi, ext));

    // equality and divisibility preserve and reflect
    for (size_t i = 0; i < window.size(); ++i) {
      for (size_t j = 0; j < window.size(); ++j) {
        ++rep.checks;
        bool eq_k = window[i] == window[j];
        bool eq_l = embedded[i] == embedded[j];
        if (eq_k != eq_l)
          note("equality mismatch: " + window[i].to_string() + " vs " + window[j].to_string());
        bool div_k = rv_divides(window[i], window[j]);
        bool div_l = rv_divides(embedded[i], embedded[j]);
        if (div_k != div_l)
          note("divisibility mismatch: " + window[i].to_string() + " | " +
               window[j].to_string());
      }
    }

    // ⊕-membership on triples
    for (size_t i = 0; i < window.size(); ++i)
      for (size_t j = i; j < window.size(); ++j) {
        RvSum sum_k = oplus_sum({window[i], window[j]});
        RvSum sum_l = oplus_sum({embedded[i], embedded[j]});
        for (size_t k = 0; k < window.size(); ++k) {
          ++rep.checks;
          bool in_k = sum_k.contains(window[k]);
          bool in_l = sum_l.contains(embedded[k]);
          if (in_k != in_l)
            note("⊕ mismatch: " + window[k].to_string() + " in " + window[i].to_string() +
                 " + " + window[j].to_string());
        }
      }

    // P_{N,d}: nonzero ξ over unit classes, coefficient tuples at depth N²
    uint64_t depth2 = depth * depth;
    std::vector<RvElement> zwin;
    zwin.push_back(RvElement::zero(base, depth2));
    for (long g = opt.gamma_lo; g <= opt.gamma_hi; ++g)
      for (const auto& u : enumerate_unit_classes(base, depth2))
        zwin.push_back(RvElement::make(base, depth2, g, u));
    std::vector<RvElement> xis;
    for (const auto& u : enumerate_unit_classes(base, depth))
      xis.push_back(RvElement::make(base, depth, 0, u));

    for (int d : opt.pred_degrees) {
      uint64_t tuples = 1;
      bool exhaustive = true;
      for (int i = 0; i <= d; ++i) {
        tuples *= zwin.size();
        if (tuples > opt.pred_exhaustive_limit) {
          exhaustive = false;
          break;
        }
      }
      auto run_case = [&](const std::vector<size_t>& pick) {
        std::vector<RvElement> zeta, zeta_l;
        for (size_t idx : pick) {
          zeta.push_back(zwin[idx]);
          zeta_l.push_back(rv_embed(zwin[idx], ext));
        }
        for (const auto& xi : xis) {
          ++rep.checks;
          bool pk = hensel_predicate(depth, d, xi, zeta);
          bool pl = hensel_predicate(depth, d, rv_embed(xi, ext), zeta_l);
          if (pk != pl) {
            std::ostringstream os;
            os << "P_{" << depth << "," << d << "} mismatch at ξ=" << xi.to_string();
            note(os.str());
          }
        }
      };
      if (exhaustive) {
        std::vector<size_t> pick(size_t(d) + 1, 0);
        while (true) {
          run_case(pick);
          size_t pos = 0;
          while (pos < pick.size()) {
            if (++pick[pos] < zwin.size()) break;
            pick[pos] = 0;
            ++pos;
          }
          if (pos == pick.size()) break;
        }
      } else {
        uint64_t state = opt.seed;
        for (uint64_t s = 0; s < opt.pred_samples; ++s) {
          std::vector<size_t> pick;
          for (int i = 0; i <= d; ++i) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            pick.push_back(size_t((state >> 17) % zwin.size()));
          }
          run_case(pick);
        }
      }
    }
  }
  return rep;
}

// ------------------------------------------------------------- preparation

nlohmann::json PreparationReport::to_json() const {
  nlohmann::json j;
  j["success"] = success;
  j["q_used"] = q_used;
  j["centers"] = centers;
  j["fibers"] = fibers;
  j["partition_ok"] = partition_ok;
  if (!offending_fiber.empty()) j["offending_fiber"] = offending_fiber;
  return j;
}

namespace {

// Certified root representatives mod π^M of a univariate polynomial:
// solution residues carrying a smooth-point certificate (or exactly zero),
// deduplicated by their mod-π^M image.
std::vector<Padic> certified_roots(const PolyExpr& f, const FieldPtr& field, int m_prec) {
  std::vector<Padic> out;
  if (f.is_zero() || f.variables().empty()) return out;
  // probe past the target so the Newton distance bound can reach m_prec
  const int deep = std::min(field->max_precision() - 2, m_prec + 4);
  const int probe = std::min(field->max_precision(), deep + 2);
  BoundPoly bp(f, field, probe);
  BoundPoly dbp = bp.derivative(0);
  std::set<std::vector<uint32_t>> seen;
  const Fq& fq = field->fq();
  uint64_t q = field->q();
  std::vector<std::vector<uint32_t>> frontier{{}};
  for (int l = 1; l <= deep; ++l) {
    std::vector<std::vector<uint32_t>> next;
    for (const auto& digits : frontier) {
      for (uint64_t d = 0; d < q; ++d) {
        std::vector<uint32_t> cand = digits;
        cand.push_back(uint32_t(d));
        detail::DigitMat rows;
        for (uint32_t idx : cand) rows.push_back(fq.from_index(idx));
        Padic x(field, l, std::move(rows));
        Padic v = bp.eval(std::vector<Padic>{x});
        if (v.is_zero()) next.push_back(std::move(cand));
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) return out;
  }
  for (const auto& digits : frontier) {
    detail::DigitMat rows;
    for (uint32_t idx : digits) rows.push_back(fq.from_index(idx));
    Padic x0 = Padic(field, deep, std::move(rows)).pad_exact(probe);
    Padic fv = bp.eval(std::vector<Padic>{x0});
    Valuation fo = fv.ord();
    long f_lower = fo.is_known() ? fo.value : fv.precision();
    bool is_exact_root = !fo.is_known() && exact_poly_zero(f, field, nullptr, {x0});
    if (!is_exact_root) {
      Padic dv = dbp.eval(std::vector<Padic>{x0});
      Valuation to = dv.ord();
      if (!to.is_known()) continue;
      long t = to.value;
      if (!(f_lower > 2 * t && f_lower - t >= m_prec)) continue;  // no certificate
    }
    std::vector<uint32_t> image(digits.begin(), digits.begin() + m_prec);
    if (seen.insert(image).second) {
      detail::DigitMat img_rows;
      for (uint32_t idx : image) img_rows.push_back(fq.from_index(idx));
      out.emplace_back(field, m_prec, std::move(img_rows));
    }
  }
  return out;
}

std::string fiber_key_string(size_t center_idx, const std::string& rv_key) {
  return "c" + std::to_string(center_idx) + "|" + rv_key;
}

}  // namespace

namespace {

// One attempted cell verification at a fixed cell depth N·q'. The domain tree
// refines digit prefixes; a subtree collapses once every center distance, the
// assigned fiber class, and the value class are pinned by the prefix. This
// keeps the sweep exhaustive while the visited node count stays near
// #centers · M · q instead of q^M.
struct CellSweep {
  const FieldPtr& field;
  const BoundPoly& bp;
  const PolyExpr& f;
  const std::vector<Padic>& centers;
  uint64_t value_depth;
  uint64_t cell_depth;
  int m_prec;
  int work;

  std::map<std::string, std::pair<bool, RvElement>> fiber_value;  // key -> (is zero, class)
  std::map<std::string, unsigned __int128> fiber_size;
  unsigned __int128 covered = 0;
  uint64_t nodes = 0;
  bool consistent = true;
  std::string offending;

  unsigned __int128 subtree_size(int level) const {
    unsigned __int128 s = 1;
    for (int i = level; i < m_prec; ++i) s *= field->q();
    return s;
  }

  void record(const std::string& key, bool value_zero, const RvElement& value,
              unsigned __int128 size) {
    covered += size;
    fiber_size[key] += size;
    auto it = fiber_value.find(key);
    if (it == fiber_value.end()) {
      fiber_value.emplace(key, std::make_pair(value_zero, value));
      return;
    }
    bool same = (it->second.first == value_zero) && (value_zero || it->second.second == value);
    if (!same) {
      consistent = false;
      if (offending.empty()) offending = key;
    }
  }

  // exact leaf: the prefix is the entire point
  void leaf_point(const Padic& t) {
    size_t best = 0;
    long best_ord = -1;
    bool at_center = false;
    for (size_t ci = 0; ci < centers.size(); ++ci) {
      Padic diff = t.sub(centers[ci]);
      Valuation v = diff.ord();
      long o;
      if (!v.is_known()) {
        o = m_prec;  // t equals this center as a representative
        if (best_ord < o) at_center = true;
      } else {
        o = v.value;
      }
      if (o > best_ord) {
        best_ord = o;
        best = ci;
        at_center = !v.is_known();
      }
    }
    std::string rv_key = "Z";
    if (!at_center) {
      Padic diff = t.pad_exact(work).sub(centers[best].pad_exact(work));
      rv_key = rv_of(diff, cell_depth).to_string();
    }
    std::string key = fiber_key_string(best, rv_key);

    Padic ft = bp.eval(std::vector<Padic>{t.pad_exact(work)});
    if (ft.is_zero()) {
      if (exact_poly_zero(f, field, nullptr, {t.pad_exact(work)})) {
        record(key, true, RvElement::zero(field, value_depth), 1);
      } else {
        consistent = false;
        offending = key + " (value ord unresolved at working precision)";
      }
      return;
    }
    record(key, false, rv_of(ft, value_depth), 1);
  }

  void visit(const Padic& prefix, int level) {
    if (!consistent) return;
    if (++nodes > 10000000) fail(ErrorCode::CapExceeded, "preparation tree exceeded the node cap");
    if (level >= m_prec) {
      leaf_point(prefix.truncate(m_prec));
      return;
    }
    // try to collapse the whole subtree below this prefix
    if (level > 0) {
      int w_cell = RvElement::unit_width(*field, cell_depth);
      int w_val = RvElement::unit_width(*field, value_depth);
      bool pinned = true;
      size_t best = 0;
      long best_ord = -1;
      for (size_t ci = 0; ci < centers.size() && pinned; ++ci) {
        Padic diff = prefix.truncate(level).sub(centers[ci].truncate(level));
        Valuation v = diff.ord();
        if (!v.is_known() || v.value + w_cell > level) pinned = false;
        else if (v.value > best_ord) {
          best_ord = v.value;
          best = ci;
        }
      }
      if (pinned) {
        Padic ft = bp.eval(std::vector<Padic>{prefix.pad_exact(work)});
        Valuation fo = ft.ord();
        if (fo.is_known() && fo.value + w_val <= level) {
          Padic diff = prefix.pad_exact(work).sub(centers[best].pad_exact(work));
          std::string key = fiber_key_string(best, rv_of(diff, cell_depth).to_string());
          record(key, false, rv_of(ft, value_depth), subtree_size(level));
          return;
        }
      }
    }
    const Fq& fq = field->fq();
    for (uint64_t d = 0; d < field->q(); ++d) {
      detail::DigitMat rows = prefix.digits();
      rows.resize(size_t(m_prec), FqElem(fq.f(), 0));
      rows[size_t(level)] = fq.from_index(d);
      visit(Padic(field, m_prec, std::move(rows)), level + 1);
      if (!consistent) return;
    }
  }
};

}  // namespace

PreparationReport prepare_univariate(const PolyExpr& f, uint64_t depth, const FieldPtr& field,
                                     int domain_precision, int q_exponent_cap) {
  auto vars = f.variables();
  if (vars.size() != 1) fail(ErrorCode::UsageError, "preparation takes a univariate polynomial");
  if (f.total_degree() > 4) fail(ErrorCode::CapExceeded, "preparation caps the degree at 4");
  const int m_prec = domain_precision;
  if (m_prec < 1 || m_prec > field->max_precision() / 2)
    fail(ErrorCode::UsageError, "domain precision out of range");

  PreparationReport rep;

  // candidate centers: 0 plus certified roots of f and all derivatives
  std::vector<Padic> centers{Padic::zero(field, m_prec)};
  PolyExpr g = f;
  for (uint32_t d = 0; d <= f.total_degree(); ++d) {
    for (const auto& root : certified_roots(g, field, m_prec)) {
      bool fresh = true;
      for (const auto& c : centers) fresh = fresh && !c.equal_digits(root);
      if (fresh) centers.push_back(root);
    }
    g = g.derivative(vars[0]);
    if (g.is_zero()) break;
  }
  for (const auto& c : centers) rep.centers.push_back(c.to_string());

  const int work = std::min(field->max_precision(), 2 * m_prec + int(field->ord_of_int(depth)) + 8);
  BoundPoly bp(f, field, work);

  unsigned __int128 domain = 1;
  for (int i = 0; i < m_prec; ++i) domain *= field->q();

  for (int qe = 0; qe <= q_exponent_cap; ++qe) {
    uint64_t qfactor = 1;
    for (int i = 0; i < qe; ++i) qfactor *= field->p();
    uint64_t cell_depth = depth * qfactor;
    if (field->equichar() && cell_depth % field->p() == 0) break;  // depth must stay prime to p

    CellSweep sweep{field, bp, f, centers, depth, cell_depth, m_prec, work, {}, {}, 0, 0, true, {}};
    sweep.visit(Padic::zero(field, m_prec), 0);

    if (sweep.consistent) {
      rep.success = true;
      rep.q_used = qfactor;
      rep.fibers = sweep.fiber_size.size();
      unsigned __int128 total = 0;
      for (const auto& [k, s] : sweep.fiber_size) total += s;
      rep.partition_ok = (total == domain) && (sweep.covered == domain);
      return rep;
    }
    rep.offending_fiber = sweep.offending;
  }
  rep.success = false;
  return rep;
}

// ------------------------------------------------------------- suite

SuiteOutcome run_descent_suite(const nlohmann::json& manifest, const LambdaOptions& opt) {
  SuiteOutcome out;
  nlohmann::json reports = nlohmann::json::array();
  int violations = 0, advisories = 0;
  for (const auto& entry : manifest) {
    PolySystem sys = PolySystem::parse({entry.at("poly").get<std::string>()});
    FieldPtr base;
    if (entry.contains("base_field") && entry["base_field"].is_object())
      base = Field::from_json(entry["base_field"]);
    else
      base = Field::make(FieldSpec::qp(entry.at("p").get<uint32_t>()));
    SeriesKind kind = (entry.value("kind", std::string("raw")) == "serre") ? SeriesKind::Serre
                                                                           : SeriesKind::Raw;
    int n_max = entry.value("n_max", 12);
    for (const auto& ext : entry.at("extensions")) {
      auto steps = parse_extension_spec(ext.get<std::string>(), base);
      DescentReport rep = check_descent(sys, base, steps, kind, n_max, opt);
      if (!rep.holds) ++violations;
      if (rep.advisory) ++advisories;
      reports.push_back(rep.to_json());
    }
  }
  out.report["reports"] = reports;
  out.report["violations"] = violations;
  out.report["advisories"] = advisories;
  out.exit_code = violations ? 1 : (advisories ? 2 : 0);
  return out;
}

}  // namespace rvlab

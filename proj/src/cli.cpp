#include "rvlab/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rvlab/descent.hpp"

namespace rvlab {

namespace {

struct CommonFlags {
  uint32_t p = 0;
  std::string mode = "mixed";
  std::string g_poly;
  std::string eis_poly;
  std::string field_json;
  std::vector<std::string> exts;
  std::string cache_dir;
  bool no_cache = false;
  int threads = 1;
  std::string format = "json";
  int max_precision = 64;
};

void add_field_flags(CLI::App* cmd, CommonFlags& ff) {
  cmd->add_option("--p", ff.p, "prime p (shorthand for Q_p or F_p((t)))");
  cmd->add_option("--mode", ff.mode, "mixed | equichar")->check(CLI::IsMember({"mixed", "equichar"}));
  cmd->add_option("--g", ff.g_poly, "residue polynomial in y (monic, irreducible over F_p)");
  cmd->add_option("--eis", ff.eis_poly, "Eisenstein polynomial in x over the unramified subring");
  cmd->add_option("--field-json", ff.field_json, "field descriptor JSON file");
  cmd->add_option("--ext", ff.exts, "extension spec, e.g. eis:x^2-3 or unram:y^2+1")
      ->take_all();
  cmd->add_option("--max-precision", ff.max_precision, "precision ceiling in π-digits");
}

void add_common_flags(CLI::App* cmd, CommonFlags& ff) {
  cmd->add_option("--cache-dir", ff.cache_dir, "count cache directory");
  cmd->add_flag("--no-cache", ff.no_cache, "disable the count cache");
  cmd->add_option("--threads", ff.threads, "worker threads for enumeration");
  cmd->add_option("--format", ff.format, "json | table")->check(CLI::IsMember({"json", "table"}));
}

FieldPtr build_base_field(const CommonFlags& ff) {
  if (!ff.field_json.empty()) {
    std::ifstream in(ff.field_json);
    if (!in) fail(ErrorCode::UsageError, "cannot open " + ff.field_json);
    nlohmann::json j;
    in >> j;
    return Field::from_json(j);
  }
  if (ff.p == 0) fail(ErrorCode::UsageError, "a field needs --p or --field-json");
  FieldSpec spec;
  spec.mode = (ff.mode == "equichar") ? FieldMode::Equichar : FieldMode::Mixed;
  spec.p = ff.p;
  spec.max_precision = ff.max_precision;
  if (!ff.g_poly.empty()) {
    PolyExpr e = PolyExpr::parse(ff.g_poly);
    auto vars = e.variables();
    if (vars.size() != 1) fail(ErrorCode::UsageError, "--g must be univariate");
    std::vector<uint32_t> g;
    for (uint32_t d = 0; d <= e.degree_in(vars[0]); ++d) g.push_back(0);
    for (const auto& [mono, coeffs] : e.terms()) {
      uint32_t deg = mono.empty() ? 0 : mono.begin()->second;
      long long v = 0;
      for (const auto& c : coeffs) v += c.n;
      v %= (long long)spec.p;
      if (v < 0) v += spec.p;
      g[deg] = uint32_t(v);
    }
    spec.g = g;
  }
  if (spec.mode == FieldMode::Mixed) {
    if (!ff.eis_poly.empty()) {
      PolyExpr e = PolyExpr::parse(ff.eis_poly);
      auto vars = e.variables();
      if (vars.size() != 1) fail(ErrorCode::UsageError, "--eis must be univariate");
      std::vector<std::vector<long long>> eis(e.degree_in(vars[0]) + 1, std::vector<long long>{0});
      for (const auto& [mono, coeffs] : e.terms()) {
        uint32_t deg = mono.empty() ? 0 : mono.begin()->second;
        for (const auto& c : coeffs) {
          if (c.pi_pow) fail(ErrorCode::UsageError, "--eis takes integer coefficients");
          auto& row = eis[deg];
          if (row.size() <= size_t(c.u_pow)) row.resize(size_t(c.u_pow) + 1, 0);
          row[size_t(c.u_pow)] += c.n;
        }
      }
      spec.eis = eis;
    } else {
      spec.eis = {{-(long long)spec.p}, {1}};
    }
  }
  return Field::make(spec);
}

FieldPtr build_field(const CommonFlags& ff) {
  FieldPtr base = build_base_field(ff);
  if (ff.exts.empty()) return base;
  std::vector<ExtensionStep> steps;
  for (const auto& e : ff.exts) {
    auto part = parse_extension_spec(e, base);
    steps.insert(steps.end(), part.begin(), part.end());
  }
  return Field::extend(base, steps);
}

nlohmann::json config_json(const CommonFlags& ff, const nlohmann::json& extra) {
  nlohmann::json j = extra;
  j["version"] = kVersion;
  j["threads"] = ff.threads;
  j["cache"] = ff.no_cache ? "off" : (ff.cache_dir.empty() ? CountCache::default_dir() : ff.cache_dir);
  j["format"] = ff.format;
  return j;
}

void print_table(std::ostream& out, const nlohmann::json& j, const std::string& prefix = "") {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      print_table(out, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
  } else if (j.is_array()) {
    size_t i = 0;
    for (const auto& e : j) print_table(out, e, prefix + "[" + std::to_string(i++) + "]");
  } else {
    out << prefix << " = " << j.dump() << "\n";
  }
}

void emit(std::ostream& out, const CommonFlags& ff, const nlohmann::json& report) {
  if (ff.format == "table")
    print_table(out, report);
  else
    out << report.dump(2) << "\n";
}

CountCache make_cache(const CommonFlags& ff) {
  if (ff.no_cache) return CountCache("");
  return CountCache(ff.cache_dir.empty() ? CountCache::default_dir() : ff.cache_dir);
}

SeriesKind parse_kind(const std::string& s) {
  if (s == "raw") return SeriesKind::Raw;
  if (s == "serre") return SeriesKind::Serre;
  fail(ErrorCode::UsageError, "kind must be raw or serre");
}

// rv literal: rvN(int) or plain int at a given default depth
RvElement parse_rv_literal(const std::string& text, const FieldPtr& field, uint64_t default_depth) {
  std::string s = text;
  uint64_t depth = default_depth;
  if (s.rfind("rv", 0) == 0) {
    size_t open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
      fail(ErrorCode::UsageError, "rv literal must look like rvN(int)");
    depth = std::stoull(s.substr(2, open - 2));
    s = s.substr(open + 1, s.size() - open - 2);
  }
  long long v = std::stoll(s);
  return rv_of_int(field, v, depth);
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact p-adic counting, leading-term structures, and pole descent checks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags ff;

  // ---- field ----
  auto* c_field = app.add_subcommand("field", "construct and print a field descriptor");
  add_field_flags(c_field, ff);
  add_common_flags(c_field, ff);

  // ---- count ----
  auto* c_count = app.add_subcommand("count", "solution counts in O/π^n");
  std::vector<std::string> polys;
  int n_arg = 3, budget = 4;
  std::string kind_arg = "raw";
  c_count->add_option("--poly", polys, "polynomial (repeatable for systems)")->required()->take_all();
  c_count->add_option("--n", n_arg, "precision level n")->required();
  c_count->add_option("--kind", kind_arg, "raw | serre");
  c_count->add_option("--budget", budget, "serre lifting budget B");
  add_field_flags(c_count, ff);
  add_common_flags(c_count, ff);

  // ---- series ----
  auto* c_series = app.add_subcommand("series", "exact Poincaré / Serre-Poincaré terms");
  int nmax = 12;
  c_series->add_option("--poly", polys, "polynomial")->required()->take_all();
  c_series->add_option("--nmax", nmax, "largest n");
  c_series->add_option("--kind", kind_arg, "raw | serre");
  c_series->add_option("--budget", budget, "serre budget ceiling");
  add_field_flags(c_series, ff);
  add_common_flags(c_series, ff);

  // ---- lambda ----
  auto* c_lambda = app.add_subcommand("lambda", "largest-pole invariant from the fitted series");
  int guard = 3, snap_bound = 24;
  c_lambda->add_option("--poly", polys, "polynomial")->required()->take_all();
  c_lambda->add_option("--nmax", nmax, "largest n");
  c_lambda->add_option("--kind", kind_arg, "raw | serre");
  c_lambda->add_option("--budget", budget, "serre budget ceiling");
  c_lambda->add_option("--guard", guard, "terms held back for prediction");
  c_lambda->add_option("--snap-bound", snap_bound, "denominator bound for the rational snap");
  add_field_flags(c_lambda, ff);
  add_common_flags(c_lambda, ff);

  // ---- descent ----
  auto* c_descent = app.add_subcommand("descent", "λ descent across field extensions");
  std::string manifest_file;
  c_descent->add_option("--manifest", manifest_file, "JSON manifest of descent jobs");
  c_descent->add_option("--poly", polys, "polynomial (inline job)")->take_all();
  c_descent->add_option("--nmax", nmax, "largest n");
  c_descent->add_option("--kind", kind_arg, "raw | serre");
  c_descent->add_option("--budget", budget, "serre budget ceiling");
  c_descent->add_option("--guard", guard, "fit guard");
  c_descent->add_option("--snap-bound", snap_bound, "snap denominator bound");
  add_field_flags(c_descent, ff);
  add_common_flags(c_descent, ff);

  // ---- index ----
  auto* c_index = app.add_subcommand("index", "K-indices: catalog-exact or windowed estimate");
  std::string catalog, formula_text, rv_var = "xi";
  int window = 6, vf_precision = 6;
  c_index->add_option("--catalog", catalog, "catalog entry: recip:a1,a2 | gated | norm:a");
  c_index->add_option("--formula", formula_text, "fiber formula with a free RV(1) variable");
  c_index->add_option("--rv-var", rv_var, "name of the fiber variable");
  c_index->add_option("--window", window, "γ window depth for the estimate");
  c_index->add_option("--vf-precision", vf_precision, "VF precision for fiber volumes");
  add_field_flags(c_index, ff);
  add_common_flags(c_index, ff);

  // ---- hensel ----
  auto* c_hensel = app.add_subcommand("hensel", "RV-Hensel predicate and certified lift");
  long long xi_int = 1;
  uint64_t depth = 1;
  int target = 6, coeff_precision = 0;
  c_hensel->add_option("--poly", polys, "univariate polynomial")->required()->take_all();
  c_hensel->add_option("--depth", depth, "RV depth N")->required();
  c_hensel->add_option("--xi", xi_int, "integer whose depth-N class is the lift target")->required();
  c_hensel->add_option("--target", target, "precision M of the returned root");
  c_hensel->add_option("--coeff-precision", coeff_precision, "coefficient working precision");
  add_field_flags(c_hensel, ff);
  add_common_flags(c_hensel, ff);

  // ---- rv ----
  auto* c_rv = app.add_subcommand("rv", "leading-term arithmetic");
  std::string op = "sum", rv_args, project_to;
  uint64_t rv_depth = 1;
  c_rv->add_option("--op", op, "of | sum | mul | divides | project | embed")->required();
  c_rv->add_option("--args", rv_args, "comma-separated rv literals, e.g. rv1(1),rv1(-1)")->required();
  c_rv->add_option("--depth", rv_depth, "default depth for bare integers");
  c_rv->add_option("--to", project_to, "projection target depth");
  add_field_flags(c_rv, ff);
  add_common_flags(c_rv, ff);

  // ---- eval ----
  auto* c_eval = app.add_subcommand("eval", "three-valued formula evaluation / enumeration");
  std::string eval_formula_text;
  std::vector<std::string> assigns;
  long gamma_lo = -2, gamma_hi = 2;
  bool enumerate = false;
  c_eval->add_option("--formula", eval_formula_text, "L_RV formula")->required();
  c_eval->add_option("--assign", assigns, "assignments var=int")->take_all();
  c_eval->add_option("--vf-precision", vf_precision, "window precision M");
  c_eval->add_option("--gamma-lo", gamma_lo, "RV window lower γ");
  c_eval->add_option("--gamma-hi", gamma_hi, "RV window upper γ");
  c_eval->add_flag("--enumerate", enumerate, "enumerate solutions over free variables");
  add_field_flags(c_eval, ff);
  add_common_flags(c_eval, ff);

  // ---- prepare ----
  auto* c_prepare = app.add_subcommand("prepare", "one-variable cell preparation check");
  int qcap = 3;
  c_prepare->add_option("--poly", polys, "univariate polynomial")->required()->take_all();
  c_prepare->add_option("--depth", depth, "RV depth N");
  c_prepare->add_option("--precision", vf_precision, "domain precision M");
  c_prepare->add_option("--qcap", qcap, "largest p-exponent tried for the cell depth");
  add_field_flags(c_prepare, ff);
  add_common_flags(c_prepare, ff);

  // ---- transfer ----
  auto* c_transfer = app.add_subcommand("transfer", "λ̃ over Q_p vs F_p((t))");
  c_transfer->add_option("--poly", polys, "polynomial (pi means p resp. t)")->required()->take_all();
  c_transfer->add_option("--p", ff.p, "odd prime")->required();
  c_transfer->add_option("--nmax", nmax, "largest n");
  c_transfer->add_option("--guard", guard, "fit guard");
  add_common_flags(c_transfer, ff);

  // ---- cache ----
  auto* c_cache = app.add_subcommand("cache", "cache operations: ls | clear | verify");
  std::string cache_op;
  c_cache->add_option("op", cache_op, "ls | clear | verify")->required();
  add_common_flags(c_cache, ff);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << "\n";
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 64;
  }

  try {
    CountCache cache = make_cache(ff);
    CountOptions copt;
    copt.threads = ff.threads;
    copt.cache = cache.enabled() ? &cache : nullptr;

    if (app.got_subcommand(c_field)) {
      FieldPtr k = build_field(ff);
      nlohmann::json rep;
      rep["field"] = k->to_json();
      rep["display"] = k->display_name();
      rep["config"] = config_json(ff, {});
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_count)) {
      FieldPtr k = build_field(ff);
      PolySystem sys = PolySystem::parse(polys);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = sys.canonical_text();
      cfg["n"] = n_arg;
      cfg["kind"] = kind_arg;
      rep["config"] = config_json(ff, cfg);
      if (kind_arg == "raw") {
        rep["count"] = count_raw(sys, n_arg, k, copt);
      } else {
        IntervalCount ic = auto_refine(sys, n_arg, k, budget, copt);
        rep["interval"] = ic.to_json();
      }
      rep["field"] = k->display_name();
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_series)) {
      FieldPtr k = build_field(ff);
      PolySystem sys = PolySystem::parse(polys);
      SeriesOptions sopt;
      sopt.serre_budget = budget;
      sopt.count = copt;
      SeriesTerms terms = poincare_terms(sys, k, nmax, parse_kind(kind_arg), sopt);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = sys.canonical_text();
      cfg["nmax"] = nmax;
      cfg["kind"] = kind_arg;
      rep["config"] = config_json(ff, cfg);
      rep["field"] = k->display_name();
      rep["terms"] = terms.to_json();
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_lambda)) {
      FieldPtr k = build_field(ff);
      PolySystem sys = PolySystem::parse(polys);
      LambdaOptions lopt;
      lopt.guard = guard;
      lopt.snap_bound = snap_bound;
      lopt.series.serre_budget = budget;
      lopt.series.count = copt;
      LambdaResult res = run_lambda(sys, k, parse_kind(kind_arg), nmax, lopt);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = sys.canonical_text();
      cfg["nmax"] = nmax;
      cfg["kind"] = kind_arg;
      cfg["guard"] = guard;
      cfg["snap_bound"] = snap_bound;
      rep["config"] = config_json(ff, cfg);
      rep["field"] = k->display_name();
      rep["lambda"] = res.pole.lambda.str();
      rep["series"] = res.series.to_json();
      rep["pole"] = res.pole.to_json();
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_descent)) {
      LambdaOptions lopt;
      lopt.guard = guard;
      lopt.snap_bound = snap_bound;
      lopt.series.serre_budget = budget;
      lopt.series.count = copt;
      if (!manifest_file.empty()) {
        std::ifstream in(manifest_file);
        if (!in) fail(ErrorCode::UsageError, "cannot open " + manifest_file);
        nlohmann::json manifest;
        in >> manifest;
        SuiteOutcome outcome = run_descent_suite(manifest, lopt);
        outcome.report["config"] = config_json(ff, {{"manifest", manifest_file}});
        emit(out, ff, outcome.report);
        return outcome.exit_code;
      }
      if (polys.empty() || ff.exts.empty())
        fail(ErrorCode::UsageError, "descent needs --manifest or --poly with --ext");
      FieldPtr base = build_base_field(ff);
      PolySystem sys = PolySystem::parse(polys);
      nlohmann::json reports = nlohmann::json::array();
      int violations = 0, advisories = 0;
      for (const auto& e : ff.exts) {
        auto steps = parse_extension_spec(e, base);
        DescentReport rep = check_descent(sys, base, steps, parse_kind(kind_arg), nmax, lopt);
        if (!rep.holds) ++violations;
        if (rep.advisory) ++advisories;
        reports.push_back(rep.to_json());
      }
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = sys.canonical_text();
      cfg["kind"] = kind_arg;
      cfg["nmax"] = nmax;
      rep["config"] = config_json(ff, cfg);
      rep["reports"] = reports;
      rep["violations"] = violations;
      rep["advisories"] = advisories;
      emit(out, ff, rep);
      return violations ? 1 : (advisories ? 2 : 0);
    }

    if (app.got_subcommand(c_index)) {
      FieldPtr k = build_field(ff);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["window"] = window;
      cfg["vf_precision"] = vf_precision;
      if (!catalog.empty()) {
        cfg["catalog"] = catalog;
        rep["config"] = config_json(ff, cfg);
        rep["result"] = index_catalog(CatalogSpec::parse(catalog), k).to_json();
      } else if (!formula_text.empty()) {
        cfg["formula"] = formula_text;
        rep["config"] = config_json(ff, cfg);
        FormulaPtr phi = parse_formula(formula_text);
        rep["result"] = index_estimate(phi, rv_var, k, window, vf_precision).to_json();
      } else {
        fail(ErrorCode::UsageError, "index needs --catalog or --formula");
      }
      rep["field"] = k->display_name();
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_hensel)) {
      FieldPtr k = build_field(ff);
      PolySystem sys = PolySystem::parse(polys);
      if (sys.polys.size() != 1 || sys.nvars() != 1)
        fail(ErrorCode::UsageError, "hensel takes one univariate polynomial");
      int cp = coeff_precision ? coeff_precision
                               : std::min(k->max_precision(),
                                          target + 2 * RvElement::unit_width(*k, depth) + 8);
      BoundPoly bp(sys.polys[0], k, cp);
      std::vector<Padic> coeffs = bp.univariate_coeffs();
      RvElement xi = rv_of_int(k, xi_int, depth);
      uint64_t d2 = depth * depth;
      std::vector<RvElement> zeta;
      for (const auto& c : coeffs)
        zeta.push_back(c.is_zero() ? RvElement::zero(k, d2) : rv_of(c, d2));
      bool pred = hensel_predicate(depth, int(coeffs.size()) - 1, xi, zeta);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = sys.canonical_text();
      cfg["depth"] = depth;
      cfg["xi"] = xi_int;
      cfg["target"] = target;
      rep["config"] = config_json(ff, cfg);
      rep["field"] = k->display_name();
      rep["predicate"] = pred;
      if (pred) {
        Padic root = hensel_lift(coeffs, depth, xi, target);
        rep["root_digits"] = root.digits_json();
        rep["root"] = root.to_string();
      }
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_rv)) {
      FieldPtr k = build_field(ff);
      std::vector<RvElement> elems;
      std::stringstream ss(rv_args);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) elems.push_back(parse_rv_literal(tok, k, rv_depth));
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["op"] = op;
      cfg["args"] = rv_args;
      rep["config"] = config_json(ff, cfg);
      rep["field"] = k->display_name();
      if (op == "sum") {
        rep["result"] = oplus_sum(elems).to_json();
      } else if (op == "mul") {
        if (elems.size() < 2) fail(ErrorCode::UsageError, "mul needs two arguments");
        RvElement acc = elems[0];
        for (size_t i = 1; i < elems.size(); ++i) acc = rv_mul(acc, elems[i]);
        rep["result"] = acc.to_json();
      } else if (op == "divides") {
        if (elems.size() != 2) fail(ErrorCode::UsageError, "divides needs two arguments");
        rep["result"] = rv_divides(elems[0], elems[1]);
      } else if (op == "of") {
        rep["result"] = elems.at(0).to_json();
      } else if (op == "project") {
        uint64_t to = std::stoull(project_to);
        rep["result"] = rv_project(elems.at(0), to).to_json();
      } else if (op == "embed") {
        if (ff.exts.empty()) fail(ErrorCode::UsageError, "embed needs --ext");
        FieldPtr base = build_base_field(ff);
        std::vector<ExtensionStep> steps;
        for (const auto& e : ff.exts) {
          auto part = parse_extension_spec(e, base);
          steps.insert(steps.end(), part.begin(), part.end());
        }
        FieldPtr l = Field::extend(base, steps);
        RvElement src = parse_rv_literal(rv_args, base, rv_depth);
        rep["result"] = rv_embed(src, l).to_json();
      } else {
        fail(ErrorCode::UsageError, "unknown rv op '" + op + "'");
      }
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_eval)) {
      FieldPtr k = build_field(ff);
      FormulaPtr phi = parse_formula(eval_formula_text);
      SearchWindow w;
      w.vf_precision = vf_precision;
      w.gamma_lo = gamma_lo;
      w.gamma_hi = gamma_hi;
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["formula"] = eval_formula_text;
      cfg["vf_precision"] = vf_precision;
      cfg["gamma_lo"] = gamma_lo;
      cfg["gamma_hi"] = gamma_hi;
      rep["config"] = config_json(ff, cfg);
      rep["field"] = k->display_name();
      if (enumerate) {
        SolutionSet sols = enumerate_solutions(phi, k, w);
        rep["solutions"] = sols.to_json();
      } else {
        Assignment a;
        for (const auto& s : assigns) {
          auto eq = s.find('=');
          if (eq == std::string::npos) fail(ErrorCode::UsageError, "assignments look like x=17");
          std::string name = s.substr(0, eq);
          long long v = std::stoll(s.substr(eq + 1));
          int prec = std::min(k->max_precision(), vf_precision + 8);
          a.vf[name] = AssignedValue::exact_rep(Padic::from_int(k, v, prec), vf_precision);
        }
        EvalResult r = eval_formula(phi, k, a, w);
        rep["level"] = verdict_name(r.level);
        rep["certified"] = verdict_name(r.cert);
      }
      emit(out, ff, rep);
      return 0;
    }

    if (app.got_subcommand(c_prepare)) {
      FieldPtr k = build_field(ff);
      PolySystem sys = PolySystem::parse(polys);
      if (sys.polys.size() != 1) fail(ErrorCode::UsageError, "prepare takes one polynomial");
      PreparationReport prep = prepare_univariate(sys.polys[0], depth, k, vf_precision, qcap);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = sys.canonical_text();
      cfg["depth"] = depth;
      cfg["precision"] = vf_precision;
      cfg["qcap"] = qcap;
      rep["config"] = config_json(ff, cfg);
      rep["field"] = k->display_name();
      rep["result"] = prep.to_json();
      emit(out, ff, rep);
      return prep.success ? 0 : 1;
    }

    if (app.got_subcommand(c_transfer)) {
      if (polys.size() != 1) fail(ErrorCode::UsageError, "transfer takes one polynomial");
      LambdaOptions lopt;
      lopt.guard = guard;
      lopt.series.count = copt;
      TransferReport tr = transfer_check(polys[0], ff.p, nmax, lopt);
      nlohmann::json rep;
      nlohmann::json cfg;
      cfg["poly"] = polys[0];
      cfg["p"] = ff.p;
      cfg["nmax"] = nmax;
      rep["config"] = config_json(ff, cfg);
      rep["result"] = tr.to_json();
      emit(out, ff, rep);
      return tr.equal ? 0 : 1;
    }

    if (app.got_subcommand(c_cache)) {
      nlohmann::json rep;
      rep["config"] = config_json(ff, {{"op", cache_op}});
      if (cache_op == "ls") {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& e : cache.list()) {
          nlohmann::json ej;
          ej["file"] = e.file;
          ej["key"] = e.key;
          entries.push_back(ej);
        }
        rep["entries"] = entries;
      } else if (cache_op == "clear") {
        rep["removed"] = cache.clear();
      } else if (cache_op == "verify") {
        auto recompute = [&](const nlohmann::json& key) -> nlohmann::json {
          FieldPtr k = Field::from_json(nlohmann::json::parse(key.at("field").get<std::string>()));
          // rebuild the system from its canonical text: "[vars] p1 ; p2"
          std::string canon = key.at("system").get<std::string>();
          auto close = canon.find(']');
          std::string vars_part = canon.substr(1, close - 1);
          std::string polys_part = canon.substr(close + 2);
          std::vector<std::string> texts;
          size_t pos = 0;
          while (pos < polys_part.size()) {
            size_t sep = polys_part.find(" ; ", pos);
            texts.push_back(polys_part.substr(pos, sep == std::string::npos ? std::string::npos
                                                                            : sep - pos));
            pos = (sep == std::string::npos) ? polys_part.size() : sep + 3;
          }
          PolySystem sys = PolySystem::parse(texts);
          std::vector<std::string> vars;
          std::stringstream vs(vars_part);
          std::string v;
          while (std::getline(vs, v, ','))
            if (!v.empty()) vars.push_back(v);
          sys.with_vars(vars);
          CountOptions vopt;
          vopt.threads = ff.threads;
          int n = key.at("n").get<int>();
          if (key.at("kind").get<std::string>() == "raw") {
            nlohmann::json r;
            r["count"] = count_raw(sys, n, k, vopt);
            return r;
          }
          IntervalCount ic = count_serre(sys, n, k, key.at("B").get<int>(), vopt);
          nlohmann::json r;
          r["lower"] = ic.lower;
          r["upper"] = ic.upper;
          r["certified"] = ic.certified;
          return r;
        };
        auto vr = cache.verify(recompute);
        rep["total"] = vr.total;
        rep["checked"] = vr.checked;
        rep["mismatched"] = vr.mismatched;
        rep["bad_files"] = vr.bad_files;
        emit(out, ff, rep);
        return vr.mismatched ? 1 : 0;
      } else {
        fail(ErrorCode::UsageError, "cache op must be ls, clear, or verify");
      }
      emit(out, ff, rep);
      return 0;
    }

    fail(ErrorCode::UsageError, "no subcommand");
  } catch (const Error& e) {
    nlohmann::json ej;
    ej["error"]["code"] = error_code_name(e.code());
    ej["error"]["message"] = e.what();
    err << ej.dump(2) << "\n";
    return e.code() == ErrorCode::UsageError ? 64 : 1;
  } catch (const std::exception& e) {
    nlohmann::json ej;
    ej["error"]["code"] = "Unhandled";
    ej["error"]["message"] = e.what();
    err << ej.dump(2) << "\n";
    return 1;
  }
}

}  // namespace rvlab

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rvlab/poly.hpp"
#include "rvlab/rv.hpp"

namespace rvlab {

// ----- terms of the RV sorts -----

struct RvTerm;
using RvTermPtr = std::shared_ptr<const RvTerm>;

struct RvTerm {
  enum class Kind { Var, OfVf, Product, Project, Const };
  Kind kind = Kind::Const;
  // depth of the term's sort; 0 = unresolved wildcard (bare 0/1 literals and
  // free variables before inference)
  uint64_t depth = 0;
  std::string var;                 // Var
  PolyExpr poly;                   // OfVf
  std::vector<RvTermPtr> factors;  // Product
  RvTermPtr inner;                 // Project
  int const_val = 0;               // Const: 0 or 1
};

// ----- formulas -----

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { RvEq, Divides, OplusRel, Pred, And, Or, Not, ExistsRv, ExistsVf };
  Kind kind;
  std::vector<RvTermPtr> args;  // atoms
  uint64_t pred_depth = 0;      // Pred: N
  int pred_degree = 0;          // Pred: d
  std::vector<FormulaPtr> sub;  // connectives / quantifier body
  std::string bound_var;
  uint64_t bound_depth = 0;  // ExistsRv
};

FormulaPtr parse_formula(const std::string& text);
std::string print_formula(const FormulaPtr& f);
std::string print_term(const RvTermPtr& t);

struct FreeVars {
  std::vector<std::string> vf;                          // sorted
  std::vector<std::pair<std::string, uint64_t>> rv;     // sorted, with depths
};
FreeVars free_variables(const FormulaPtr& f);

bool is_quantifier_free(const FormulaPtr& f);
// ExistsRv-prefix over a quantifier-free body (Def. of the strict shape).
bool is_exists_simple(const FormulaPtr& f);
// The shape monotonicity certification accepts: an existential prefix (any
// sort) over a quantifier-free body, negation never above a quantifier and
// never under a VF quantifier. Returns a reason when rejected.
std::optional<std::string> monotone_shape_violation(const FormulaPtr& f);

// ----- evaluation -----

struct SearchWindow {
  int vf_precision = 4;  // M: VF variables range over representatives mod π^M
  long gamma_lo = -2;
  long gamma_hi = 2;
  uint64_t cap = 2000000;  // enumerated-assignment budget
};

enum class Verdict3 { False, Unknown, True };
const char* verdict_name(Verdict3 v);

struct AssignedValue {
  Padic value;
  int radius;  // the underlying element is only known to agree mod π^radius
  bool exact;  // finite digit string (safe to pad with zeros)

  static AssignedValue approx(Padic v) {
    int r = v.precision();
    return {std::move(v), r, false};
  }
  static AssignedValue exact_rep(Padic v, int radius) { return {std::move(v), radius, true}; }
};

struct Assignment {
  std::map<std::string, AssignedValue> vf;
  std::map<std::string, RvElement> rv;
};

struct EvalResult {
  Verdict3 level;  // window-level (congruence mod π^M) verdict
  Verdict3 cert;   // certified for exact semantics; True and False are sound
};

EvalResult eval_formula(const FormulaPtr& f, const FieldPtr& field, const Assignment& a,
                        const SearchWindow& w);

struct SolutionRecord {
  Assignment assignment;
  bool certified;  // cert verdict True; otherwise on the unknown frontier
};

struct SolutionSet {
  std::vector<SolutionRecord> solutions;  // level-True assignments
  uint64_t window_cardinality = 0;
  nlohmann::json to_json() const;
};

// All free-variable assignments in the window whose level verdict is True,
// tagged certified / unknown-frontier. Free VF variables are capped.
SolutionSet enumerate_solutions(const FormulaPtr& f, const FieldPtr& field, const SearchWindow& w,
                                int max_vf_vars = 3);

// Same, but variables present in `fixed` keep their given values.
SolutionSet enumerate_solutions_fixed(const FormulaPtr& f, const FieldPtr& field,
                                      const SearchWindow& w, const Assignment& fixed,
                                      int max_vf_vars = 3);

struct MonotonicityReport {
  uint64_t k_certified_true = 0;
  uint64_t l_true_at_embedded = 0;
  uint64_t violations = 0;
  std::vector<std::string> violation_examples;
  nlohmann::json to_json() const;
};

// Verifies that certified-True points stay certified-True under K -> L with
// the window scaled by e(L/K). NotExistential when the shape check fails.
MonotonicityReport check_monotonicity(const FormulaPtr& f, const FieldPtr& base,
                                      const FieldPtr& ext, const SearchWindow& w);

}  // namespace rvlab

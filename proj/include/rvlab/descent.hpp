#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rvlab/formula.hpp"
#include "rvlab/series.hpp"

namespace rvlab {

// ----- extension specs (CLI text form) -----
// "unram:<monic poly in y>" | "eis:<monic poly in x>"; stages chain with ';'.
std::vector<ExtensionStep> parse_extension_spec(const std::string& text, const FieldPtr& base);

// ----- λ pipelines -----

struct LambdaOptions {
  int guard = 3;
  int snap_bound = 24;
  SeriesOptions series;
};

struct LambdaResult {
  SeriesTerms terms;
  RationalSeries series;
  PoleReport pole;
  nlohmann::json to_json() const;
};

LambdaResult run_lambda(const PolySystem& sys, const FieldPtr& field, SeriesKind kind, int n_max,
                        const LambdaOptions& opt = {});

struct DescentReport {
  std::string poly;
  std::string base_field;
  std::string ext_field;
  SeriesKind kind = SeriesKind::Raw;
  LambdaResult base;
  LambdaResult ext;
  bool holds = false;     // λ_L <= λ_K with +inf on top
  bool advisory = false;  // uncertified ingredient somewhere
  nlohmann::json to_json() const;
};

DescentReport check_descent(const PolySystem& sys, const FieldPtr& base,
                            const std::vector<ExtensionStep>& ext, SeriesKind kind, int n_max,
                            const LambdaOptions& opt = {});

// ----- limsup table (Cor. on asymptotics; explicitly non-certifying) -----

struct LimsupTable {
  std::vector<int> n;
  std::vector<double> base_values;  // (N_{n,K}/q_K^{n(m+1)})^{1/n}
  std::vector<double> ext_values;
  nlohmann::json to_json() const;
};

LimsupTable limsup_report(const PolySystem& sys, const FieldPtr& base, const FieldPtr& ext,
                          int n_max, const SeriesOptions& opt = {});

// ----- K-indices -----

struct CatalogSpec {
  enum class Kind {
    ReciprocalMonomial,  // 1/(x_1^{a_1}...x_m^{a_m}) on O^m
    GatedReciprocal,     // the solvability-gated 1/x at P = 0
    MonomialNorm,        // |g|^s for monomial g: bounded, index +inf
  };
  Kind kind = Kind::ReciprocalMonomial;
  std::vector<uint32_t> exponents;

  static CatalogSpec parse(const std::string& text);  // "recip:1,2" | "gated" | "norm:2"
  std::string str() const;
};

struct IndexResult {
  RatOrInf value;
  bool exact = false;  // catalog-exact; otherwise a windowed estimate
  double estimate = 0;
  double regression_residual = 0;
  int window = 0;
  nlohmann::json to_json() const;
};

IndexResult index_catalog(const CatalogSpec& spec, const FieldPtr& field);

// Windowed volume regression per the integral decomposition over rv-fibers;
// `rv_var` is the formula's free RV(1) variable naming the fiber.
IndexResult index_estimate(const FormulaPtr& fiber_formula, const std::string& rv_var,
                           const FieldPtr& field, int gamma_window, int vf_precision,
                           uint64_t cap = 2000000);

// Whether -1 is a square in K, decided through the Hensel predicate on y^2+1
// (depth 1 for odd residue characteristic, depth 4 for p = 2).
bool minus_one_is_square(const FieldPtr& field);

// ----- transfer (desk evidence for equal indices over equal residue fields) -----

struct TransferReport {
  uint32_t p = 0;
  std::string poly;
  LambdaResult mixed;   // over Q_p
  LambdaResult laurent; // over F_p((t))
  bool equal = false;
  nlohmann::json to_json() const;
};

TransferReport transfer_check(const std::string& poly_text, uint32_t p, int n_max,
                              const LambdaOptions& opt = {});

// ----- substructure (preserve and reflect =, |, ⊕, P_{N,d}) -----

struct SubstructureOptions {
  long gamma_lo = -2;
  long gamma_hi = 2;
  std::vector<int> pred_degrees = {1, 2};
  uint64_t pred_exhaustive_limit = 4000;  // tuple budget before sampling
  uint64_t pred_samples = 150;
  uint64_t seed = 1;
};

struct SubstructureReport {
  uint64_t checks = 0;
  uint64_t failures = 0;
  std::vector<std::string> witnesses;
  nlohmann::json to_json() const;
};

SubstructureReport check_substructure(const FieldPtr& base, const FieldPtr& ext,
                                      const std::vector<uint64_t>& depths,
                                      const SubstructureOptions& opt = {});

// ----- cell preparation (empirical form of the one-variable statement) -----

struct PreparationReport {
  bool success = false;
  uint64_t q_used = 1;  // the power of p the cell depth was raised by
  std::vector<std::string> centers;
  uint64_t fibers = 0;
  bool partition_ok = false;
  std::string offending_fiber;
  nlohmann::json to_json() const;
};

PreparationReport prepare_univariate(const PolyExpr& f, uint64_t depth, const FieldPtr& field,
                                     int domain_precision, int q_exponent_cap);

// ----- manifest-driven suite -----

struct SuiteOutcome {
  int exit_code = 0;  // 0 all hold, 2 advisory present, 1 violation
  nlohmann::json report;
};

SuiteOutcome run_descent_suite(const nlohmann::json& manifest, const LambdaOptions& opt = {});

}  // namespace rvlab

#pragma once

#include <string>
#include <vector>

#include "rvlab/cache.hpp"
#include "rvlab/poly.hpp"

namespace rvlab {

// A tuple of polynomials over O_K in shared variables.
struct PolySystem {
  std::vector<PolyExpr> polys;
  std::vector<std::string> vars;  // union of variables, sorted

  static PolySystem parse(const std::vector<std::string>& texts);
  static PolySystem from_exprs(std::vector<PolyExpr> exprs);
  // Declares extra ambient variables (needed when a polynomial degenerates
  // to 0 but the point count still ranges over (O/π^n)^m).
  PolySystem& with_vars(const std::vector<std::string>& extra);

  int nvars() const { return int(vars.size()); }
  int npolys() const { return int(polys.size()); }
  std::string canonical_text() const;
};

struct CountOptions {
  uint64_t state_cap = 100000000;  // frontier-extension budget
  int threads = 1;
  const CountCache* cache = nullptr;
  // pi/u in coefficients mean this field's; embedded when counting over an
  // extension (defaults to the counting field itself)
  FieldPtr constants_from;
};

// Exact number of solutions of the system in (O_K/π^n)^m; n = 0 gives 1.
uint64_t count_raw(const PolySystem& sys, int n, const FieldPtr& field,
                   const CountOptions& opt = {});

// All counts for n = 0..n_max from one frontier sweep.
std::vector<uint64_t> count_raw_range(const PolySystem& sys, int n_max, const FieldPtr& field,
                                      const CountOptions& opt = {});

struct IntervalCount {
  int n = 0;
  uint64_t lower = 0;
  uint64_t upper = 0;
  bool certified = false;  // lower == upper and the certificates apply
  int budget_used = 0;
  bool degenerate_warning = false;  // the zero system: everything counts

  nlohmann::json to_json() const;
};

// Certified interval for N_{n,K}: reductions mod π^n of exact roots. The
// upper bound projects solutions mod π^{n+B}; the lower bound keeps images
// holding a smooth-point Newton certificate.
IntervalCount count_serre(const PolySystem& sys, int n, const FieldPtr& field, int budget,
                          const CountOptions& opt = {});

// Raises the budget until the interval certifies or b_max is reached.
IntervalCount auto_refine(const PolySystem& sys, int n, const FieldPtr& field, int b_max,
                          const CountOptions& opt = {});

}  // namespace rvlab

#pragma once

#include <string>
#include <vector>

#include "rvlab/counting.hpp"
#include "rvlab/rational.hpp"

namespace rvlab {

enum class SeriesKind { Raw, Serre };
const char* series_kind_name(SeriesKind k);

// Exact series coefficients c_n, n = 0..n_max.
struct SeriesTerms {
  SeriesKind kind = SeriesKind::Raw;
  std::vector<Rat> c;
  std::vector<bool> certified;  // raw terms are always certified
  uint64_t q = 0;
  int m = 0;  // number of variables

  nlohmann::json to_json() const;
};

struct SeriesOptions {
  int serre_budget = 8;  // auto_refine ceiling per term
  CountOptions count;
};

// c_n = Ñ_n / q^{nm} (raw) or N_n / q^{n(m+1)} (serre). UncertifiedTerm when
// a serre interval stays open at the budget.
SeriesTerms poincare_terms(const PolySystem& sys, const FieldPtr& field, int n_max,
                           SeriesKind kind, const SeriesOptions& opt = {});

// P(T)/D(T) with D(0) = 1, coprime, reproducing every supplied term.
struct RationalSeries {
  std::vector<Rat> num;
  std::vector<Rat> den;
  int order = 0;           // recurrence order used by the fit
  int guard_verified = 0;  // trailing terms predicted, not fitted

  std::vector<Rat> expand(int n_terms) const;  // Taylor coefficients
  std::string str() const;
  nlohmann::json to_json() const;
};

// Minimal-recurrence fit on exact rationals: the final `guard` terms must be
// predicted by a recurrence fitted on the rest. NeedMoreTerms / GuardFailed.
RationalSeries fit_rational(const std::vector<Rat>& terms, int guard);

struct PoleRootInfo {
  double modulus = 0;
  int multiplicity = 1;
  bool cancelled = false;
};

struct PoleReport {
  RatOrInf lambda;       // -max Re s over the poles; +inf when poleless
  std::string sigma_max; // "-lambda" or "-inf"
  std::vector<PoleRootInfo> roots;
  int recurrence_order = 0;
  int guard = 0;
  int snap_bound = 0;    // denominator bound used by the snap
  double residual = 0;   // max |D(root)| over isolated roots
  bool flagged = false;  // kept-but-unverified cancellation (conservative)

  nlohmann::json to_json() const;
};

// Substitutes T = q^{-s} and extracts the largest real part of the poles.
// Denominator root moduli are isolated numerically at high precision, then
// λ snaps to a rational with denominator <= snap_bound * e.
PoleReport largest_pole(const RationalSeries& series, uint64_t q, uint32_t e,
                        int snap_bound = 24);

}  // namespace rvlab

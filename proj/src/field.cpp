#include "rvlab/field.hpp"

#include <algorithm>
#include <sstream>

#include "rvlab/digits.hpp"

namespace rvlab {

using detail::DigitCtx;
using detail::DigitMat;

bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; uint64_t(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

FieldSpec FieldSpec::qp(uint32_t p) {
  FieldSpec s;
  s.p = p;
  s.g = {0, 1};
  s.eis = {{-(long long)p}, {1}};
  return s;
}

FieldSpec FieldSpec::laurent(uint32_t p, std::vector<uint32_t> g) {
  FieldSpec s;
  s.mode = FieldMode::Equichar;
  s.p = p;
  s.g = std::move(g);
  s.eis = {{0}, {1}};
  return s;
}

ExtensionStep ExtensionStep::unramified(std::vector<uint32_t> h) {
  ExtensionStep s;
  s.kind = Kind::Unramified;
  s.unram_poly = std::move(h);
  return s;
}

ExtensionStep ExtensionStep::eisenstein(std::vector<std::vector<long long>> E) {
  ExtensionStep s;
  s.kind = Kind::Eisenstein;
  s.eis_poly = std::move(E);
  return s;
}

ExtensionStep ExtensionStep::eisenstein_int(std::vector<long long> E) {
  std::vector<std::vector<long long>> coeffs;
  coeffs.reserve(E.size());
  for (long long c : E) coeffs.push_back({c});
  return eisenstein(std::move(coeffs));
}

namespace {

// Reduce an integer y-polynomial modulo the monic integer lift of g.
std::vector<long long> reduce_mod_g(std::vector<long long> c, const std::vector<uint32_t>& g) {
  size_t f = g.size() - 1;
  while (c.size() > f) {
    size_t d = c.size() - 1;
    long long lead = c.back();
    c.pop_back();
    if (lead)
      for (size_t j = 0; j < f; ++j) c[d - f + j] -= lead * (long long)g[j];
  }
  c.resize(f, 0);
  return c;
}

// Checks the Eisenstein criterion over the unramified ring with residue
// polynomial g, and returns the quotients E_i / p for i < e.
std::vector<std::vector<long long>> eisenstein_quotients(
    uint32_t p, const std::vector<uint32_t>& g,
    const std::vector<std::vector<long long>>& eis) {
  if (eis.size() < 2) fail(ErrorCode::NotEisenstein, "Eisenstein polynomial must have degree >= 1");
  const auto& lead = eis.back();
  bool monic = !lead.empty() && lead[0] == 1;
  for (size_t j = 1; monic && j < lead.size(); ++j)
    if (lead[j] != 0) monic = false;
  if (!monic) fail(ErrorCode::NotEisenstein, "Eisenstein polynomial must be monic");

  std::vector<std::vector<long long>> quots;
  for (size_t i = 0; i + 1 < eis.size(); ++i) {
    auto c = reduce_mod_g(eis[i], g);
    for (long long& v : c) {
      if (v % (long long)p != 0)
        fail(ErrorCode::NotEisenstein, "lower coefficient has p-valuation 0");
      v /= (long long)p;
    }
    quots.push_back(std::move(c));
  }
  // constant coefficient must have p-valuation exactly 1
  bool unit = false;
  for (long long v : quots[0])
    if (v % (long long)p != 0) unit = true;
  if (!unit)
    fail(ErrorCode::NotEisenstein, "constant coefficient has p-valuation >= 2");
  return quots;
}

}  // namespace

Field::Field(FieldMode mode, uint32_t p, std::vector<uint32_t> g,
             std::vector<std::vector<long long>> eis, int mmax)
    : mode_(mode), p_(p), fq_(p, std::move(g)), eis_(std::move(eis)), mmax_(mmax) {
  e_ = uint32_t(eis_.size() - 1);
}

FieldPtr Field::make(const FieldSpec& spec) {
  if (!is_prime_u32(spec.p)) fail(ErrorCode::UsageError, "p must be prime");
  if (spec.max_precision < 8) fail(ErrorCode::UsageError, "max_precision too small");
  auto eis = spec.eis;
  if (eis.empty()) {
    if (spec.mode == FieldMode::Mixed)
      eis = {{-(long long)spec.p}, {1}};
    else
      eis = {{0}, {1}};
  }
  if (spec.mode == FieldMode::Equichar) {
    if (eis.size() != 2)
      fail(ErrorCode::UnsupportedEquichar, "equicharacteristic mode supports e = 1 only");
  } else {
    eisenstein_quotients(spec.p, spec.g, eis);  // validates
  }
  // canonicalize coefficients: reduced mod g's integer lift
  for (size_t i = 0; i + 1 < eis.size(); ++i) eis[i] = reduce_mod_g(eis[i], spec.g);
  eis.back() = {1};

  auto field = std::shared_ptr<Field>(
      new Field(spec.mode, spec.p, spec.g, std::move(eis), spec.max_precision));
  field->compute_p_expansion();
  return field;
}

void Field::compute_p_expansion() {
  const uint32_t f = fq_.f();
  pexp_.assign(mmax_, FqElem(f, 0));
  if (mode_ == FieldMode::Equichar) return;  // p = 0 in F_q((t))

  auto quots = eisenstein_quotients(p_, fq_.modulus(), eis_);

  // p = -π^e * S^{-1} with S = sum_{i<e} (E_i/p) π^i. Digits of p below e
  // vanish, so arithmetic at precision m needs only already-known rows; each
  // round extends the known prefix by e digits.
  int known = int(e_);
  while (known < mmax_) {
    int target = std::min(known + int(e_), mmax_);
    int work = target - int(e_);
    if (work <= 0) break;
    DigitCtx ctx(mode_ == FieldMode::Equichar, &fq_, e_, &pexp_);
    detail::Loose l(work, 2 * f);
    for (uint32_t i = 0; i < e_ && int(i) < work; ++i)
      for (size_t j = 0; j < quots[i].size() && j < f; ++j) l.at(int(i), uint32_t(j)) = quots[i][j];
    DigitMat s = detail::canonicalize(ctx, l);
    DigitMat sinv = detail::digits_unit_inv(ctx, s, work);
    DigitMat t = detail::digits_neg(ctx, sinv);
    for (int k = 0; k < work; ++k) pexp_[size_t(e_) + k] = t[k];
    known = target;
  }

  // self-check: feeding the integer p through the carry machinery must
  // reproduce the expansion itself
  DigitCtx ctx(false, &fq_, e_, &pexp_);
  DigitMat pd = detail::digits_from_int(ctx, (long long)p_, mmax_);
  for (int i = 0; i < mmax_; ++i)
    if (pd[i] != pexp_[i]) fail(ErrorCode::Internal, "p-expansion self-check failed");
}

int Field::ord_of_int(uint64_t n) const {
  if (n == 0) fail(ErrorCode::Internal, "ord_of_int(0)");
  if (mode_ == FieldMode::Equichar) {
    if (n % p_ == 0) fail(ErrorCode::UnsupportedEquichar, "depth divisible by p in equicharacteristic mode");
    return 0;
  }
  int v = 0;
  while (n % p_ == 0) {
    n /= p_;
    ++v;
  }
  return v * int(e_);
}

FieldPtr Field::extend(const FieldPtr& base, const std::vector<ExtensionStep>& steps) {
  if (steps.empty()) fail(ErrorCode::UsageError, "no extension steps");
  FieldPtr cur = base;
  for (const auto& st : steps) {
    if (cur->equichar())
      fail(ErrorCode::UnsupportedExtension, "extensions of F_q((t)) are not supported");
    std::shared_ptr<Field> next;
    if (st.kind == ExtensionStep::Kind::Unramified) {
      if (cur->f_deg() != 1)
        fail(ErrorCode::UnsupportedExtension,
             "unramified extension requires prime residue field on the base");
      if (st.unram_poly.size() < 3)
        fail(ErrorCode::UsageError, "unramified degree must be >= 2");
      if (!fp_poly_irreducible(cur->p(), st.unram_poly))
        fail(ErrorCode::ReduciblePolynomial, "unramified polynomial is reducible over F_p");
      next = std::shared_ptr<Field>(new Field(FieldMode::Mixed, cur->p(), st.unram_poly,
                                              cur->eis_, cur->mmax_));
      next->rel_e_ = 1;
      next->rel_f_ = uint32_t(st.unram_poly.size() - 1);
    } else {
      if (cur->e() != 1)
        fail(ErrorCode::UnsupportedExtension,
             "Eisenstein extension requires an unramified base");
      eisenstein_quotients(cur->p(), cur->fq().modulus(), st.eis_poly);  // validates
      auto eis = st.eis_poly;
      for (size_t i = 0; i + 1 < eis.size(); ++i)
        eis[i] = reduce_mod_g(eis[i], cur->fq().modulus());
      eis.back() = {1};
      next = std::shared_ptr<Field>(new Field(FieldMode::Mixed, cur->p(),
                                              cur->fq().modulus(), std::move(eis), cur->mmax_));
      next->rel_e_ = uint32_t(st.eis_poly.size() - 1);
      next->rel_f_ = 1;
    }
    next->parent_ = cur;
    next->compute_p_expansion();
    cur = next;
  }
  return cur;
}

bool Field::same_as(const Field& other) const {
  return mode_ == other.mode_ && p_ == other.p_ && fq_.modulus() == other.fq_.modulus() &&
         eis_ == other.eis_;
}

uint32_t Field::rel_e_over(const FieldPtr& base) const {
  uint32_t acc = 1;
  const Field* cur = this;
  while (true) {
    if (cur->same_as(*base)) return acc;
    if (!cur->parent_) fail(ErrorCode::UnrelatedFields, "field was not built from the given base");
    acc *= cur->rel_e_;
    cur = cur->parent_.get();
  }
}

nlohmann::json Field::to_json() const {
  nlohmann::json j;
  j["mode"] = equichar() ? "equichar" : "mixed";
  j["p"] = p_;
  j["f_deg"] = f_deg();
  j["e"] = e_;
  j["q"] = q();
  j["g"] = fq_.modulus();
  j["eis"] = eis_;
  if (parent_) {
    j["parent"] = parent_->to_json();
    j["rel_e"] = rel_e_;
    j["rel_f"] = rel_f_;
  }
  return j;
}

std::string Field::canonical_key() const {
  nlohmann::json j;
  j["mode"] = equichar() ? "equichar" : "mixed";
  j["p"] = p_;
  j["g"] = fq_.modulus();
  j["eis"] = eis_;
  return j.dump();
}

std::string Field::display_name() const {
  std::ostringstream os;
  if (equichar()) {
    os << "F_" << q() << "((t))";
    return os.str();
  }
  if (f_deg() == 1 && e_ == 1) {
    os << "Q_" << p_;
    return os.str();
  }
  os << "Q_" << p_;
  if (f_deg() > 1) os << "^unr" << f_deg();
  if (e_ > 1) {
    os << "[x: ";
    bool first = true;
    for (size_t i = eis_.size(); i-- > 0;) {
      bool zero = true;
      for (long long c : eis_[i])
        if (c) zero = false;
      if (i + 1 == eis_.size()) {
        os << "x^" << i;
        first = false;
        continue;
      }
      if (zero) continue;
      os << (first ? "" : " + ") << "(";
      for (size_t j = 0; j < eis_[i].size(); ++j) {
        if (j) os << ",";
        os << eis_[i][j];
      }
      os << ")";
      if (i == 1)
        os << "x";
      else if (i > 1)
        os << "x^" << i;
      first = false;
    }
    os << "]";
  }
  return os.str();
}

FieldPtr Field::from_json(const nlohmann::json& j) {
  FieldSpec spec;
  spec.mode = (j.at("mode").get<std::string>() == "equichar") ? FieldMode::Equichar : FieldMode::Mixed;
  spec.p = j.at("p").get<uint32_t>();
  spec.g = j.at("g").get<std::vector<uint32_t>>();
  if (j.contains("eis")) spec.eis = j.at("eis").get<std::vector<std::vector<long long>>>();
  FieldPtr self = Field::make(spec);
  if (j.contains("parent")) {
    // rebuilt fields keep their chain so embeddings stay valid
    FieldPtr par = Field::from_json(j.at("parent"));
    auto mut = std::const_pointer_cast<Field>(self);
    mut->parent_ = par;
    mut->rel_e_ = j.at("rel_e").get<uint32_t>();
    mut->rel_f_ = j.at("rel_f").get<uint32_t>();
  }
  return self;
}

}  // namespace rvlab

#include "rvlab/padic.hpp"

#include <algorithm>
#include <sstream>

namespace rvlab {

using detail::DigitCtx;
using detail::DigitMat;

Padic::Padic(FieldPtr field, int prec, DigitMat digits)
    : field_(std::move(field)), prec_(prec), dig_(std::move(digits)) {
  if (int(dig_.size()) != prec_) fail(ErrorCode::Internal, "digit row count != precision");
}

Padic Padic::zero(const FieldPtr& k, int prec) {
  return Padic(k, prec, DigitMat(prec, FqElem(k->f_deg(), 0)));
}

Padic Padic::one(const FieldPtr& k, int prec) { return from_int(k, 1, prec); }

Padic Padic::from_int(const FieldPtr& k, long long v, int prec) {
  if (prec < 1) fail(ErrorCode::UsageError, "precision must be >= 1");
  if (prec > k->max_precision())
    fail(ErrorCode::PrecisionExhausted, "requested precision exceeds the field's ceiling");
  DigitCtx ctx(*k);
  return Padic(k, prec, detail::digits_from_int(ctx, v, prec));
}

Padic Padic::from_ypoly(const FieldPtr& k, const std::vector<long long>& c, int prec) {
  if (prec < 1) fail(ErrorCode::UsageError, "precision must be >= 1");
  if (prec > k->max_precision())
    fail(ErrorCode::PrecisionExhausted, "requested precision exceeds the field's ceiling");
  DigitCtx ctx(*k);
  return Padic(k, prec, detail::digits_from_ypoly(ctx, c, prec));
}

Padic Padic::uniformizer(const FieldPtr& k, int prec) {
  Padic r = zero(k, prec);
  if (prec > 1) r.dig_[1][0] = 1;
  return r;
}

Padic Padic::unram_gen(const FieldPtr& k, int prec) {
  Padic r = zero(k, prec);
  if (k->f_deg() == 1) return one(k, prec);
  r.dig_[0][1] = 1;
  return r;
}

bool Padic::is_zero() const { return detail::digits_ord(dig_, field_->fq()) < 0; }

Valuation Padic::ord() const {
  int k = detail::digits_ord(dig_, field_->fq());
  return k < 0 ? Valuation::at_least(prec_) : Valuation::known(k);
}

namespace {
int common_prec(const Padic& x, const Padic& y, bool strict) {
  if (!x.field()->same_as(*y.field()))
    fail(ErrorCode::UnrelatedFields, "operands live in different fields");
  if (strict && x.precision() != y.precision())
    fail(ErrorCode::PrecisionMismatch, "strict mode requires equal precisions");
  return std::min(x.precision(), y.precision());
}
}  // namespace

Padic Padic::add(const Padic& o, bool strict) const {
  int prec = common_prec(*this, o, strict);
  DigitCtx ctx(*field_);
  return Padic(field_, prec, detail::digits_add(ctx, dig_, o.dig_));
}

Padic Padic::sub(const Padic& o, bool strict) const {
  int prec = common_prec(*this, o, strict);
  DigitCtx ctx(*field_);
  return Padic(field_, prec, detail::digits_sub(ctx, dig_, o.dig_));
}

Padic Padic::mul(const Padic& o, bool strict) const {
  int prec = common_prec(*this, o, strict);
  DigitCtx ctx(*field_);
  return Padic(field_, prec, detail::digits_mul(ctx, dig_, o.dig_));
}

Padic Padic::neg() const {
  DigitCtx ctx(*field_);
  return Padic(field_, prec_, detail::digits_neg(ctx, dig_));
}

Padic Padic::unit_inv() const {
  Valuation v = ord();
  if (!v.is_known() || v.value != 0)
    fail(ErrorCode::NonUnitInverse, "unit_inv requires valuation exactly 0");
  DigitCtx ctx(*field_);
  return Padic(field_, prec_, detail::digits_unit_inv(ctx, dig_, prec_));
}

Padic Padic::pow(uint64_t n) const {
  Padic r = one(field_, prec_);
  Padic b = *this;
  while (n) {
    if (n & 1) r = r.mul(b);
    b = b.mul(b);
    n >>= 1;
  }
  return r;
}

Padic Padic::truncate(int prec) const {
  if (prec > prec_) fail(ErrorCode::InsufficientPrecision, "truncate cannot extend precision");
  return Padic(field_, prec, detail::digits_truncate(dig_, prec));
}

Padic Padic::pad_exact(int prec) const {
  if (prec > field_->max_precision())
    fail(ErrorCode::PrecisionExhausted, "requested precision exceeds the field's ceiling");
  if (prec <= prec_) return truncate(prec);
  return Padic(field_, prec, detail::digits_pad(dig_, field_->fq(), prec));
}

Padic Padic::shift_up(int k) const {
  return Padic(field_, prec_, detail::digits_shift_up(dig_, field_->fq(), k));
}

Padic Padic::shift_down_exact(int k) const {
  for (int i = 0; i < k && i < prec_; ++i)
    if (!field_->fq().is_zero(dig_[i]))
      fail(ErrorCode::NotIntegral, "division by π^k with nonzero low digits");
  return Padic(field_, std::max(0, prec_ - k), detail::digits_shift_down_exact(dig_, k));
}

bool Padic::equal_digits(const Padic& o) const {
  return prec_ == o.prec_ && detail::digits_equal(dig_, o.dig_);
}

nlohmann::json Padic::digits_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : dig_) arr.push_back(d);
  return arr;
}

std::string Padic::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < prec_; ++i) {
    if (i) os << ",";
    if (field_->f_deg() == 1) {
      os << dig_[i][0];
    } else {
      os << "(";
      for (uint32_t j = 0; j < field_->f_deg(); ++j) {
        if (j) os << " ";
        os << dig_[i][j];
      }
      os << ")";
    }
  }
  os << "]";
  return os.str();
}

namespace {

// Chain of extension steps leading from base to target, innermost first.
std::vector<FieldPtr> chain_from(const FieldPtr& base, const FieldPtr& target) {
  std::vector<FieldPtr> chain;
  FieldPtr cur = target;
  while (!cur->same_as(*base)) {
    chain.push_back(cur);
    if (!cur->parent()) fail(ErrorCode::UnrelatedFields, "target field not built from source");
    cur = cur->parent();
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

}  // namespace

Padic Padic::embed_into(const FieldPtr& target) const {
  if (target->same_as(*field_)) return *this;
  auto chain = chain_from(field_, target);

  Padic cur = *this;
  for (const FieldPtr& step : chain) {
    int out_prec = cur.precision() * int(step->rel_e());
    if (out_prec > step->max_precision())
      fail(ErrorCode::PrecisionExhausted, "embedding exceeds the target precision ceiling");
    if (step->rel_f() > 1) {
      // unramified: digits carry over, residue vectors widen
      DigitMat rows(out_prec, FqElem(step->f_deg(), 0));
      for (int i = 0; i < cur.precision(); ++i) rows[i][0] = cur.digit(i)[0];
      cur = Padic(step, out_prec, std::move(rows));
    } else {
      // totally ramified: re-expand sum c_i p^i through Horner in the new digits
      Padic pl = Padic::from_int(step, (long long)step->p(), out_prec);
      Padic acc = Padic::zero(step, out_prec);
      for (int i = cur.precision(); i-- > 0;) {
        std::vector<long long> ly(cur.digit(i).begin(), cur.digit(i).end());
        Padic digit = Padic::from_ypoly(step, ly, out_prec);
        acc = acc.mul(pl).add(digit);
      }
      cur = acc;
    }
  }
  return cur;
}

Padic arith(ArithOp op, const Padic& x, const Padic& y, bool strict) {
  switch (op) {
    case ArithOp::Add: return x.add(y, strict);
    case ArithOp::Sub: return x.sub(y, strict);
    case ArithOp::Mul: return x.mul(y, strict);
    case ArithOp::UnitInv: return x.unit_inv();
  }
  fail(ErrorCode::Internal, "bad arith op");
}

}  // namespace rvlab

#include "rvlab/exactring.hpp"

namespace rvlab {

ExactRing::ExactRing(FieldPtr field) : field_(std::move(field)) {
  if (field_->equichar())
    fail(ErrorCode::Internal, "exact ring is for mixed-characteristic fields");
  e_ = field_->e();
  f_ = field_->f_deg();
  for (const auto& c : field_->eisenstein()) {
    std::vector<Int> row(f_, Int(0));
    for (size_t j = 0; j < c.size() && j < f_; ++j) row[j] = Int(c[j]);
    eis_.push_back(std::move(row));
  }
}

ExactRing::Elem ExactRing::zero() const { return Elem{std::vector<Int>(size_t(e_) * f_, Int(0))}; }

ExactRing::Elem ExactRing::from_int(long long v) const {
  Elem r = zero();
  r.c[0] = Int(v);
  return r;
}

ExactRing::Elem ExactRing::from_padic_digits(const Padic& x) const {
  // x = sum c_i π^i exactly; fold every π-power through the Eisenstein relation
  Elem acc = zero();
  if (e_ == 1) {
    // π = p in the unramified case: accumulate integer multiples
    Int ppow(1);
    Int p((long long)field_->p());
    for (int i = 0; i < x.precision(); ++i) {
      for (uint32_t j = 0; j < f_; ++j) acc.c[j] += Int((long long)x.digit(i)[j]) * ppow;
      ppow *= p;
    }
    return acc;
  }
  // general case: Horner in π
  Elem pi_elem = zero();
  pi_elem.c[size_t(1) * f_] = Int(1);
  for (int i = x.precision(); i-- > 0;) {
    Elem digit = zero();
    for (uint32_t j = 0; j < f_; ++j) digit.c[j] = Int((long long)x.digit(i)[j]);
    acc = add(mul(acc, pi_elem), digit);
  }
  return acc;
}

ExactRing::Elem ExactRing::add(const Elem& a, const Elem& b) const {
  Elem r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

ExactRing::Elem ExactRing::sub(const Elem& a, const Elem& b) const {
  Elem r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

ExactRing::Elem ExactRing::scale(const Elem& a, const Int& k) const {
  Elem r = a;
  for (auto& v : r.c) v *= k;
  return r;
}

void ExactRing::reduce(std::vector<Int>& wide) const {
  const uint32_t wf = 2 * f_;
  const auto& g = field_->fq().modulus();
  auto y_reduce_row = [&](uint32_t xi) {
    for (uint32_t yj = wf; yj-- > f_;) {
      Int v = wide[size_t(xi) * wf + yj];
      if (v.is_zero()) continue;
      wide[size_t(xi) * wf + yj] = Int(0);
      for (uint32_t j = 0; j < f_; ++j)
        if (g[j]) wide[size_t(xi) * wf + yj - f_ + j] -= v * Int((long long)g[j]);
    }
  };
  // Fold x^e = -sum eis_[i] x^i top-down; each row is y-reduced just before
  // folding so the y-degree of every write stays below 2f.
  for (uint32_t xi = 2 * e_; xi-- > e_;) {
    y_reduce_row(xi);
    for (uint32_t yj = 0; yj < f_; ++yj) {
      Int v = wide[size_t(xi) * wf + yj];
      if (v.is_zero()) continue;
      wide[size_t(xi) * wf + yj] = Int(0);
      for (uint32_t i = 0; i < e_; ++i)
        for (uint32_t j = 0; j < f_; ++j)
          if (!(eis_[i][j].is_zero()))
            wide[size_t(xi - e_ + i) * wf + yj + j] -= v * eis_[i][j];
    }
  }
  for (uint32_t xi = 0; xi < e_; ++xi) y_reduce_row(xi);
}

ExactRing::Elem ExactRing::mul(const Elem& a, const Elem& b) const {
  const uint32_t wf = 2 * f_;
  std::vector<Int> wide(size_t(2 * e_) * wf, Int(0));
  for (uint32_t i1 = 0; i1 < e_; ++i1)
    for (uint32_t j1 = 0; j1 < f_; ++j1) {
      const Int& va = a.c[size_t(i1) * f_ + j1];
      if (va.is_zero()) continue;
      for (uint32_t i2 = 0; i2 < e_; ++i2)
        for (uint32_t j2 = 0; j2 < f_; ++j2) {
          const Int& vb = b.c[size_t(i2) * f_ + j2];
          if (vb.is_zero()) continue;
          wide[size_t(i1 + i2) * wf + j1 + j2] += va * vb;
        }
    }
  // y-reduction may be needed before the x-fold when y-degrees exceeded f
  // inside high x-rows; the x-fold only shifts y-degrees by < f, so reducing
  // x first and y second stays inside the wide buffer.
  reduce(wide);
  Elem r = zero();
  for (uint32_t i = 0; i < e_; ++i)
    for (uint32_t j = 0; j < f_; ++j) r.c[size_t(i) * f_ + j] = wide[size_t(i) * wf + j];
  return r;
}

bool ExactRing::is_zero(const Elem& a) const {
  for (const auto& v : a.c)
    if (!v.is_zero()) return false;
  return true;
}

bool equichar_exact_zero(const Padic& x) { return x.is_zero(); }

bool exact_poly_zero(const PolyExpr& f, const FieldPtr& field, const FieldPtr& const_base,
                     const std::vector<Padic>& values) {
  const std::vector<std::string> vars = f.variables();
  if (vars.size() != values.size())
    fail(ErrorCode::UsageError, "exact zero test arity mismatch");

  if (field->equichar()) {
    int max_val_prec = 1;
    for (const auto& v : values) max_val_prec = std::max(max_val_prec, v.precision());
    int maxpi = 0;
    for (const auto& [mono, coeffs] : f.terms())
      for (const auto& ct : coeffs) maxpi = std::max(maxpi, ct.pi_pow);
    int need = int(f.total_degree()) * max_val_prec + maxpi + 2;
    if (need > field->max_precision()) return false;
    std::vector<Padic> wide;
    for (const auto& v : values) wide.push_back(v.pad_exact(need));
    BoundPoly bp(f, field, need, const_base);
    return bp.eval(wide).is_zero();
  }

  ExactRing ring(field);
  const Field& cb = const_base ? *const_base : *field;
  ExactRing::Elem pi_elem = ring.zero();
  if (cb.e() == 1)
    pi_elem = ring.from_int((long long)field->p());
  else
    pi_elem.c[size_t(field->f_deg())] = Int(1);  // the class of x
  ExactRing::Elem u_elem = ring.zero();
  if (cb.f_deg() == 1)
    u_elem = ring.from_int(1);
  else
    u_elem.c[1] = Int(1);  // the class of y
  std::vector<ExactRing::Elem> vals;
  for (const auto& v : values) vals.push_back(ring.from_padic_digits(v));
  ExactRing::Elem acc = ring.zero();
  for (const auto& [mono, coeffs] : f.terms()) {
    ExactRing::Elem c = ring.zero();
    for (const auto& ct : coeffs) {
      ExactRing::Elem part = ring.from_int(ct.n);
      for (int i = 0; i < ct.pi_pow; ++i) part = ring.mul(part, pi_elem);
      for (int i = 0; i < ct.u_pow; ++i) part = ring.mul(part, u_elem);
      c = ring.add(c, part);
    }
    for (const auto& [var, exp] : mono) {
      size_t idx = size_t(std::find(vars.begin(), vars.end(), var) - vars.begin());
      for (uint32_t i = 0; i < exp; ++i) c = ring.mul(c, vals[idx]);
    }
    acc = ring.add(acc, c);
  }
  return ring.is_zero(acc);
}

}  // namespace rvlab

#include "rvlab/rv.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rvlab {

namespace {

long gcd_long(long a, long b) {
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

std::string normalized_gamma(long gamma, uint32_t e) {
  long num = gamma, den = long(e);
  long g = gcd_long(num, den);
  if (g) {
    num /= g;
    den /= g;
  }
  std::ostringstream os;
  os << num;
  if (den != 1) os << "/" << den;
  return os.str();
}

void require_same_depth(const RvElement& a, const RvElement& b) {
  if (a.depth() != b.depth()) fail(ErrorCode::DepthMismatch, "RV depths differ");
  if (!a.field()->same_as(*b.field()))
    fail(ErrorCode::UnrelatedFields, "RV elements live over different fields");
}

}  // namespace

int RvElement::unit_width(const Field& k, uint64_t depth) {
  if (depth == 0) fail(ErrorCode::UsageError, "RV depth must be positive");
  return k.ord_of_int(depth) + 1;
}

RvElement RvElement::zero(FieldPtr field, uint64_t depth) {
  RvElement r;
  r.field_ = std::move(field);
  r.depth_ = depth;
  r.zero_ = true;
  RvElement::unit_width(*r.field_, depth);  // validates depth for the mode
  return r;
}

RvElement RvElement::make(FieldPtr field, uint64_t depth, long gamma, Padic unit) {
  int w = unit_width(*field, depth);
  if (unit.precision() < w)
    fail(ErrorCode::InsufficientPrecision, "unit class narrower than the depth width");
  Padic u = unit.truncate(w);
  Valuation v = u.ord();
  if (!v.is_known() || v.value != 0)
    fail(ErrorCode::UsageError, "unit class must have valuation 0");
  RvElement r;
  r.field_ = std::move(field);
  r.depth_ = depth;
  r.zero_ = false;
  r.gamma_ = gamma;
  r.unit_ = std::move(u);
  return r;
}

bool RvElement::operator==(const RvElement& o) const {
  if (depth_ != o.depth_ || !field_->same_as(*o.field_)) return false;
  if (zero_ || o.zero_) return zero_ == o.zero_;
  return gamma_ == o.gamma_ && unit_.equal_digits(o.unit_);
}

std::pair<Padic, long> RvElement::shifted_lift(int prec, long shift) const {
  if (zero_) return {Padic::zero(field_, prec), shift};
  long up = gamma_ + shift;
  if (up < 0) fail(ErrorCode::Internal, "shifted lift would be non-integral");
  return {unit_.pad_exact(prec).shift_up(int(up)), shift};
}

nlohmann::json RvElement::to_json() const {
  nlohmann::json j;
  j["depth"] = depth_;
  j["zero"] = zero_;
  if (!zero_) {
    j["gamma_pi_units"] = gamma_;
    j["gamma_normalized"] = normalized_gamma(gamma_, field_->e());
    j["unit_digits"] = unit_.digits_json();
  }
  return j;
}

std::string RvElement::to_string() const {
  std::ostringstream os;
  if (zero_) {
    os << "rv" << depth_ << "(0)";
    return os.str();
  }
  os << "rv" << depth_ << "[γ=" << gamma_ << ", u=" << unit_.to_string() << "]";
  return os.str();
}

RvElement rv_of(const Padic& x, uint64_t depth, bool declared_zero) {
  const FieldPtr& k = x.field();
  int w = RvElement::unit_width(*k, depth);
  if (declared_zero) {
    if (!x.is_zero())
      fail(ErrorCode::UsageError, "element declared zero has a nonzero digit");
    return RvElement::zero(k, depth);
  }
  Valuation v = x.ord();
  if (!v.is_known())
    fail(ErrorCode::InsufficientPrecision,
         "all digits vanish; declare the element zero or supply more precision");
  if (x.precision() < v.value + w)
    fail(ErrorCode::InsufficientPrecision, "class not determined at this precision");
  Padic unit = x.shift_down_exact(v.value).truncate(w);
  return RvElement::make(k, depth, v.value, std::move(unit));
}

RvElement rv_project(const RvElement& xi, uint64_t coarser_depth) {
  if (coarser_depth == 0 || xi.depth() % coarser_depth != 0)
    fail(ErrorCode::NotDivisor, "projection target depth must divide the source depth");
  if (xi.is_zero()) return RvElement::zero(xi.field(), coarser_depth);
  int w = RvElement::unit_width(*xi.field(), coarser_depth);
  return RvElement::make(xi.field(), coarser_depth, xi.gamma(), xi.unit().truncate(w));
}

RvMulDiv rv_mul_div(const RvElement& a, const RvElement& b) {
  require_same_depth(a, b);
  RvMulDiv r{RvElement::zero(a.field(), a.depth()), false};
  // 0 divides only 0; everything divides 0
  if (b.is_zero())
    r.divides = true;
  else if (a.is_zero())
    r.divides = false;
  else
    r.divides = a.gamma() <= b.gamma();
  if (a.is_zero() || b.is_zero()) return r;
  r.product = RvElement::make(a.field(), a.depth(), a.gamma() + b.gamma(),
                              a.unit().mul(b.unit()));
  return r;
}

RvElement rv_mul(const RvElement& a, const RvElement& b) { return rv_mul_div(a, b).product; }
bool rv_divides(const RvElement& a, const RvElement& b) { return rv_mul_div(a, b).divides; }

RvElement rv_pow(const RvElement& a, uint64_t k) {
  RvElement r = rv_one(a.field(), a.depth());
  RvElement base = a;
  if (k == 0) return r;
  if (a.is_zero()) return a;
  while (k) {
    if (k & 1) r = rv_mul(r, base);
    base = rv_mul(base, base);
    k >>= 1;
  }
  return r;
}

RvElement rv_neg(const RvElement& a) {
  if (a.is_zero()) return a;
  int w = a.unit().precision();
  Padic minus_one = Padic::from_int(a.field(), -1, w);
  return RvElement::make(a.field(), a.depth(), a.gamma(), a.unit().mul(minus_one));
}

RvElement rv_inv(const RvElement& a) {
  if (a.is_zero()) fail(ErrorCode::ZeroLeadingTermQuery, "0 has no inverse in RV_N");
  return RvElement::make(a.field(), a.depth(), -a.gamma(), a.unit().unit_inv());
}

RvElement rv_one(const FieldPtr& k, uint64_t depth) {
  int w = RvElement::unit_width(*k, depth);
  return RvElement::make(k, depth, 0, Padic::one(k, w));
}

RvElement rv_of_int(const FieldPtr& k, long long v, uint64_t depth) {
  if (v == 0) return RvElement::zero(k, depth);
  int w = RvElement::unit_width(*k, depth);
  // enough precision for any int64: e * 63 digits would be overkill; grow until known
  int prec = w + 2;
  while (prec <= k->max_precision()) {
    Padic x = Padic::from_int(k, v, prec);
    Valuation ord = x.ord();
    if (ord.is_known() && x.precision() >= ord.value + w) return rv_of(x, depth);
    if (!ord.is_known() && k->equichar()) return RvElement::zero(k, depth);  // p | v
    prec = std::min(2 * prec, k->max_precision() + 1);
  }
  fail(ErrorCode::PrecisionExhausted, "integer has valuation beyond the precision ceiling");
}

RvSum RvSum::singleton(RvElement v) {
  RvSum s;
  s.shape_ = Shape::Singleton;
  s.value_ = std::move(v);
  return s;
}

RvSum RvSum::ball_with_zero(FieldPtr field, uint64_t depth, long radius) {
  RvSum s;
  s.shape_ = Shape::Ball;
  s.contains_zero_ = true;
  s.radius_ = radius;
  s.center_ = RvElement::zero(std::move(field), depth);
  s.value_ = s.center_;
  return s;
}

RvSum RvSum::ball_no_zero(RvElement center, long radius) {
  RvSum s;
  s.shape_ = Shape::Ball;
  s.contains_zero_ = false;
  s.radius_ = radius;
  s.center_ = std::move(center);
  s.value_ = RvElement::zero(s.center_.field(), s.center_.depth());
  return s;
}

namespace {

// Classifies rv_N(B(a, radius)) where a = lift / π^shift and lift is integral
// with enough digits to decide ord(a) against the radius and to read off the
// class when needed.
RvSum classify_ball_image(const Padic& lift, long shift, long radius, uint64_t depth) {
  const FieldPtr& k = lift.field();
  int w = RvElement::unit_width(*k, depth);
  long ord_n = k->ord_of_int(depth);
  Valuation v = lift.ord();
  long ord_a_shifted = v.is_known() ? v.value : lift.precision();
  long ord_a = ord_a_shifted - shift;
  bool deep = !v.is_known();
  if (deep && ord_a <= radius)
    fail(ErrorCode::Internal, "ball classification lacks precision");
  if (ord_a > radius)
    return RvSum::ball_with_zero(k, depth, radius);
  if (lift.precision() < v.value + w)
    fail(ErrorCode::Internal, "ball classification lacks class precision");
  RvElement cls = RvElement::make(k, depth, ord_a, lift.shift_down_exact(v.value).truncate(w));
  if (radius >= ord_a + ord_n) return RvSum::singleton(std::move(cls));
  return RvSum::ball_no_zero(std::move(cls), radius);
}

}  // namespace

RvSum oplus_sum(const std::vector<RvElement>& summands) {
  if (summands.empty()) fail(ErrorCode::UsageError, "empty ⊕-sum");
  const FieldPtr& k = summands.front().field();
  uint64_t depth = summands.front().depth();
  std::vector<const RvElement*> nz;
  for (const auto& s : summands) {
    require_same_depth(summands.front(), s);
    if (!s.is_zero()) nz.push_back(&s);
  }
  if (nz.empty()) return RvSum::singleton(RvElement::zero(k, depth));
  if (nz.size() == 1) return RvSum::singleton(*nz.front());

  long gamma_min = nz.front()->gamma();
  for (const auto* s : nz) gamma_min = std::min(gamma_min, s->gamma());
  long ord_n = k->ord_of_int(depth);
  int w = RvElement::unit_width(*k, depth);
  long radius = gamma_min + ord_n;

  int prec = int(ord_n) + w + 1;
  long shift = -gamma_min;
  Padic acc = Padic::zero(k, prec);
  for (const auto* s : nz) acc = acc.add(s->shifted_lift(prec, shift).first);
  return classify_ball_image(acc, shift, radius, depth);
}

RvSum rv_sum_plus(const RvSum& s, const RvElement& xi) {
  if (xi.is_zero()) return s;
  if (s.shape() == RvSum::Shape::Singleton) {
    if (s.value().is_zero()) return RvSum::singleton(xi);
    return oplus_sum({s.value(), xi});
  }
  const FieldPtr& k = xi.field();
  uint64_t depth = xi.depth();
  long ord_n = k->ord_of_int(depth);
  int w = RvElement::unit_width(*k, depth);
  long new_radius = std::min(s.radius(), xi.gamma() + ord_n);

  long gamma_min = xi.gamma();
  if (!s.contains_zero()) gamma_min = std::min(gamma_min, s.center().gamma());
  long shift = std::max(0L, -gamma_min);
  if (new_radius + shift < 0)  // every integral lift sits above the radius
    return RvSum::ball_with_zero(k, depth, new_radius);
  int prec = std::max(int(new_radius + shift) + w + 1, w + 1);
  Padic acc = xi.shifted_lift(prec, shift).first;
  if (!s.contains_zero()) acc = acc.add(s.center().shifted_lift(prec, shift).first);
  return classify_ball_image(acc, shift, new_radius, depth);
}

std::optional<long> RvSum::uniform_gamma() const {
  if (shape_ == Shape::Singleton) {
    if (value_.is_zero()) return std::nullopt;
    return value_.gamma();
  }
  if (contains_zero_) return std::nullopt;
  return center_.gamma();
}

bool RvSum::contains(const RvElement& xi) const {
  if (shape_ == Shape::Singleton) return xi == value_;
  if (contains_zero_) {
    if (xi.is_zero()) return true;
    if (xi.depth() != center_.depth()) fail(ErrorCode::DepthMismatch, "membership across depths");
    return xi.gamma() > radius_;
  }
  if (xi.is_zero()) return false;
  if (xi.depth() != center_.depth()) fail(ErrorCode::DepthMismatch, "membership across depths");
  if (xi.gamma() != center_.gamma()) return false;
  long ord_n = xi.field()->ord_of_int(xi.depth());
  long eff = std::min(radius_, center_.gamma() + ord_n);
  int digits_to_match = int(eff - center_.gamma()) + 1;
  for (int i = 0; i < digits_to_match; ++i)
    if (xi.unit().digit(i) != center_.unit().digit(i)) return false;
  return true;
}

bool RvSum::same_set(const RvSum& other) const {
  if (shape_ != other.shape_) return false;
  if (shape_ == Shape::Singleton) return value_ == other.value_;
  if (contains_zero_ != other.contains_zero_) return false;
  if (contains_zero_) return radius_ == other.radius_;
  if (center_.gamma() != other.center_.gamma()) return false;
  long ord_n = center_.field()->ord_of_int(center_.depth());
  long eff1 = std::min(radius_, center_.gamma() + ord_n);
  long eff2 = std::min(other.radius_, other.center_.gamma() + ord_n);
  if (eff1 != eff2) return false;
  int digits_to_match = int(eff1 - center_.gamma()) + 1;
  for (int i = 0; i < digits_to_match; ++i)
    if (center_.unit().digit(i) != other.center_.unit().digit(i)) return false;
  return true;
}

nlohmann::json RvSum::to_json() const {
  nlohmann::json j;
  if (shape_ == Shape::Singleton) {
    j["shape"] = "singleton";
    j["value"] = value_.to_json();
  } else {
    j["shape"] = "ball_image";
    j["radius_pi_units"] = radius_;
    j["contains_zero"] = contains_zero_;
    if (!contains_zero_) j["center"] = center_.to_json();
  }
  return j;
}

bool oplus_rel(const RvElement& a, const RvElement& b, const RvElement& c) {
  return oplus_sum({a, b}).contains(c);
}

namespace {

// Condition (a) of the RV-Hensel lemma: the derivative sum is singleton-ord
// and bounded by min ord(a_i ξ^{i-1}) + ord N.
bool hensel_condition_a(uint64_t depth, int degree, const RvElement& xi,
                        const std::vector<RvElement>& zeta) {
  const FieldPtr& k = xi.field();
  long ord_n = k->ord_of_int(depth);
  std::vector<RvElement> terms;
  bool have_rhs = false;
  long rhs_min = 0;
  for (int i = 1; i <= degree; ++i) {
    const RvElement& zi = zeta[size_t(i)];
    if (zi.is_zero()) continue;
    long cand = zi.gamma() + long(i - 1) * xi.gamma();
    if (!have_rhs || cand < rhs_min) rhs_min = cand;
    have_rhs = true;
    RvElement iv = rv_of_int(k, i, depth);
    if (iv.is_zero()) continue;  // residue characteristic divides i
    RvElement term = rv_mul(rv_mul(iv, rv_project(zi, depth)), rv_pow(xi, uint64_t(i - 1)));
    terms.push_back(std::move(term));
  }
  if (!have_rhs || terms.empty()) return false;
  RvSum s = oplus_sum(terms);
  auto g = s.uniform_gamma();
  if (!g) return false;  // 0 in the derivative sum: ord not bounded above
  return *g <= rhs_min + ord_n;
}

}  // namespace

std::optional<RvElement> hensel_collision_witness(uint64_t depth, int degree,
                                                  const RvElement& xi,
                                                  const std::vector<RvElement>& zeta,
                                                  uint64_t fiber_cap) {
  if (xi.is_zero()) fail(ErrorCode::ZeroLeadingTermQuery, "P_{N,d} requires ξ in RV_N^×");
  if (int(zeta.size()) != degree + 1)
    fail(ErrorCode::UsageError, "P_{N,d} needs d+1 leading terms");
  const FieldPtr& k = xi.field();
  uint64_t depth2 = depth * depth;
  for (const auto& z : zeta) {
    if (z.depth() != depth2) fail(ErrorCode::DepthMismatch, "coefficient terms must live at depth N^2");
  }
  if (!hensel_condition_a(depth, degree, xi, zeta)) return std::nullopt;

  int w1 = RvElement::unit_width(*k, depth);
  int w2 = RvElement::unit_width(*k, depth2);
  // fiber of ξ under RV_{N^2} -> RV_N: all digit extensions of the unit class
  uint64_t ext_digits = uint64_t(w2 - w1);
  uint64_t fiber_size = 1;
  for (uint64_t i = 0; i < ext_digits; ++i) {
    fiber_size *= k->q();
    if (fiber_size > fiber_cap)
      fail(ErrorCode::CapExceeded, "collision fiber exceeds the enumeration cap");
  }
  const Fq& fq = k->fq();
  for (uint64_t code = 0; code < fiber_size; ++code) {
    detail::DigitMat rows = xi.unit().digits();
    rows.resize(size_t(w2), FqElem(fq.f(), 0));
    uint64_t c = code;
    for (int i = w1; i < w2; ++i) {
      rows[size_t(i)] = fq.from_index(c % k->q());
      c /= k->q();
    }
    RvElement cand = RvElement::make(k, depth2, xi.gamma(), Padic(k, w2, rows));
    std::vector<RvElement> terms;
    for (int i = 0; i <= degree; ++i) {
      if (zeta[size_t(i)].is_zero()) continue;
      terms.push_back(rv_mul(zeta[size_t(i)], rv_pow(cand, uint64_t(i))));
    }
    if (terms.empty()) continue;
    RvSum s = oplus_sum(terms);
    if (s.shape() == RvSum::Shape::Ball && s.contains_zero()) return cand;
    if (s.shape() == RvSum::Shape::Singleton && s.value().is_zero()) return cand;
  }
  return std::nullopt;
}

bool hensel_predicate(uint64_t depth, int degree, const RvElement& xi,
                      const std::vector<RvElement>& zeta, uint64_t fiber_cap) {
  return hensel_collision_witness(depth, degree, xi, zeta, fiber_cap).has_value();
}

namespace {

Padic eval_poly(const std::vector<Padic>& coeffs, const Padic& x) {
  Padic acc = Padic::zero(x.field(), x.precision());
  for (size_t i = coeffs.size(); i-- > 0;) acc = acc.mul(x).add(coeffs[i].truncate(
      std::min(coeffs[i].precision(), x.precision())));
  return acc;
}

std::vector<Padic> derivative(const std::vector<Padic>& coeffs) {
  std::vector<Padic> d;
  for (size_t i = 1; i < coeffs.size(); ++i) {
    Padic c = coeffs[i];
    d.push_back(c.mul(Padic::from_int(c.field(), (long long)i, c.precision())));
  }
  return d;
}

}  // namespace

Padic hensel_lift(const std::vector<Padic>& coeffs, uint64_t depth, const RvElement& xi,
                  int target_prec) {
  if (coeffs.empty()) fail(ErrorCode::UsageError, "empty coefficient list");
  const FieldPtr& k = coeffs.front().field();
  if (xi.is_zero()) fail(ErrorCode::ZeroLeadingTermQuery, "cannot lift the zero class");
  if (xi.gamma() < 0)
    fail(ErrorCode::UsageError, "lift target must be integral (γ >= 0)");
  uint64_t depth2 = depth * depth;
  int w1 = RvElement::unit_width(*k, depth);
  int w2 = RvElement::unit_width(*k, depth2);

  int min_coeff_prec = coeffs.front().precision();
  for (const auto& c : coeffs) min_coeff_prec = std::min(min_coeff_prec, c.precision());

  // leading terms of the coefficients at depth N^2 (all-zero digits read as 0)
  std::vector<RvElement> zeta;
  for (const auto& c : coeffs) {
    if (c.is_zero()) {
      zeta.push_back(RvElement::zero(k, depth2));
      continue;
    }
    Valuation v = c.ord();
    if (c.precision() < v.value + w2)
      fail(ErrorCode::PrecisionExhausted, "coefficient precision below its depth-N^2 class");
    zeta.push_back(rv_of(c, depth2));
  }
  int degree = int(coeffs.size()) - 1;
  auto witness = hensel_collision_witness(depth, degree, xi, zeta);
  if (!witness) fail(ErrorCode::PredicateFails, "P_{N,d} fails for these leading terms");

  // Newton from the collision witness
  int probe_prec = std::min(min_coeff_prec, k->max_precision());
  Padic seed = witness->shifted_lift(probe_prec, 0).first;
  auto dcoeffs = derivative(coeffs);
  Padic fpb = eval_poly(dcoeffs, seed);
  Valuation tv = fpb.ord();
  if (!tv.is_known())
    fail(ErrorCode::PrecisionExhausted, "derivative valuation unresolved at seed precision");
  int t = tv.value;

  int needed = target_prec + 2 * w1 + t;
  if (min_coeff_prec < needed)
    fail(ErrorCode::PrecisionExhausted,
         "coefficients need precision >= M + 2(e·v_p(N)+1) + ord f'(seed)");
  int work = std::min({min_coeff_prec, k->max_precision(), needed + 2 * t + 4});

  Padic x = witness->shifted_lift(work, 0).first;
  Padic fx = eval_poly(coeffs, x);
  {
    Valuation fv = fx.ord();
    int ordf = fv.is_known() ? fv.value : fx.precision();
    if (ordf <= 2 * t)
      fail(ErrorCode::PredicateFails, "seed does not satisfy ord f > 2 ord f'");
  }
  int last_ord = -1;
  for (int iter = 0; iter < 64; ++iter) {
    Valuation fv = fx.ord();
    int ordf = fv.is_known() ? fv.value : fx.precision();
    if (ordf >= target_prec + t) break;
    if (ordf <= last_ord)
      fail(ErrorCode::PrecisionExhausted, "Newton stalled before certifying the target precision");
    last_ord = ordf;
    Padic fpx = eval_poly(dcoeffs, x);
    Valuation tv_cur = fpx.ord();
    if (!tv_cur.is_known())
      fail(ErrorCode::PrecisionExhausted, "derivative vanished to working precision");
    int tc = tv_cur.value;
    Padic delta = fx.shift_down_exact(tc).mul(fpx.shift_down_exact(tc).unit_inv());
    // iterates are kept as exact finite digit strings; padding picks the
    // representative with zero tail, which stays inside the Newton basin
    x = x.sub(delta).pad_exact(work);
    fx = eval_poly(coeffs, x);
  }
  Padic result = x.truncate(target_prec);
  // postconditions: rv_N(result) = ξ and f(result) = 0 mod π^M
  if (!(rv_of(x, depth) == rv_project(*witness, depth)) || !(rv_project(*witness, depth) == xi))
    fail(ErrorCode::Internal, "lift left the rv-fiber");
  Padic check = eval_poly(coeffs, x).truncate(target_prec);
  if (!check.is_zero()) fail(ErrorCode::Internal, "lift failed to certify f = 0 at target precision");
  return result;
}

RvElement rv_embed(const RvElement& xi, const FieldPtr& target) {
  const FieldPtr& k = xi.field();
  if (target->same_as(*k)) return xi;
  uint32_t e_rel = target->rel_e_over(k);
  if (xi.is_zero()) return RvElement::zero(target, xi.depth());

  int w_target = RvElement::unit_width(*target, xi.depth());
  Padic unit_l = xi.unit().embed_into(target);

  // change-of-uniformizer correction: embed(π_K) = c · π_L^{e_rel} with c a unit
  int src_prec = w_target + 2;
  Padic pi_k = Padic::uniformizer(k, src_prec);
  Padic pi_img = pi_k.embed_into(target);
  Padic c = pi_img.shift_down_exact(int(e_rel)).truncate(w_target);
  Padic cpow = (xi.gamma() >= 0) ? c.pow(uint64_t(xi.gamma()))
                                 : c.unit_inv().pow(uint64_t(-xi.gamma()));
  Padic unit = unit_l.truncate(std::min(unit_l.precision(), w_target));
  unit = unit.pad_exact(w_target).mul(cpow.pad_exact(w_target));
  return RvElement::make(target, xi.depth(), long(e_rel) * xi.gamma(), unit.truncate(w_target));
}

std::vector<Padic> enumerate_unit_classes(const FieldPtr& k, uint64_t depth) {
  int w = RvElement::unit_width(*k, depth);
  const Fq& fq = k->fq();
  uint64_t q = k->q();
  uint64_t total = q - 1;
  for (int i = 1; i < w; ++i) total *= q;
  std::vector<Padic> out;
  out.reserve(total);
  std::vector<uint64_t> idx(size_t(w), 0);
  idx[0] = 1;  // leading digit nonzero
  while (true) {
    detail::DigitMat rows;
    rows.resize(size_t(w));
    for (int i = 0; i < w; ++i) rows[size_t(i)] = fq.from_index(idx[size_t(i)]);
    out.emplace_back(k, w, std::move(rows));
    int pos = 0;
    while (pos < w) {
      ++idx[size_t(pos)];
      uint64_t lim = q;
      if (idx[size_t(pos)] < lim) break;
      idx[size_t(pos)] = (pos == 0) ? 1 : 0;
      ++pos;
    }
    if (pos == w) break;
  }
  return out;
}

}  // namespace rvlab

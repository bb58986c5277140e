#include "rvlab/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace rvlab {

namespace {

struct Lexer {
  const std::string& s;
  size_t pos = 0;

  explicit Lexer(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos));
  }
  long long number() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) error("expected a number");
    return std::stoll(s.substr(start, pos - start));
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (start == pos) error("expected an identifier");
    return s.substr(start, pos - start);
  }
};

struct Parser {
  Lexer lex;
  explicit Parser(const std::string& text) : lex(text) {}

  PolyExpr parse_expr() {
    PolyExpr acc;
    bool negate = lex.accept('-');
    acc = parse_term();
    if (negate) acc = acc.neg();
    while (true) {
      if (lex.accept('+'))
        acc = acc.add(parse_term());
      else if (lex.accept('-'))
        acc = acc.sub(parse_term());
      else
        break;
    }
    return acc;
  }

  PolyExpr parse_term() {
    PolyExpr acc = parse_factor();
    while (true) {
      char c = lex.peek();
      if (c == '*') {
        lex.accept('*');
        acc = acc.mul(parse_factor());
      } else if (c == '(' || std::isalpha(static_cast<unsigned char>(c))) {
        acc = acc.mul(parse_factor());  // implicit product, e.g. "3x" or "2(x+1)"
      } else {
        break;
      }
    }
    return acc;
  }

  PolyExpr parse_factor() {
    PolyExpr base = parse_base();
    while (lex.accept('^')) {
      long long k = lex.number();
      if (k < 0 || k > 64) lex.error("exponent out of range");
      base = base.pow(uint32_t(k));
    }
    return base;
  }

  PolyExpr parse_base() {
    char c = lex.peek();
    if (c == '(') {
      lex.accept('(');
      PolyExpr e = parse_expr();
      if (!lex.accept(')')) lex.error("expected ')'");
      return e;
    }
    if (c == '-') {
      lex.accept('-');
      return parse_base().neg();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return PolyExpr::constant(lex.number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = lex.ident();
      if (name == "pi" || name == "t") return PolyExpr::const_pi();
      if (name == "u") return PolyExpr::const_u();
      return PolyExpr::variable(name);
    }
    lex.error("unexpected character");
  }
};

}  // namespace

// Private helpers exposed through friend-free design: implemented as members.
PolyExpr PolyExpr::constant(long long v) {
  PolyExpr e;
  if (v != 0) e.terms_[{}] = {CoeffTerm{v, 0, 0}};
  return e;
}

PolyExpr PolyExpr::variable(const std::string& name) {
  PolyExpr e;
  Monomial m;
  m[name] = 1;
  e.terms_[m] = {CoeffTerm{1, 0, 0}};
  return e;
}

PolyExpr PolyExpr::const_pi() {
  PolyExpr e;
  e.terms_[{}] = {CoeffTerm{1, 1, 0}};
  return e;
}

PolyExpr PolyExpr::const_u() {
  PolyExpr e;
  e.terms_[{}] = {CoeffTerm{1, 0, 1}};
  return e;
}

PolyExpr PolyExpr::parse(const std::string& text) {
  Parser p(text);
  PolyExpr e = p.parse_expr();
  if (!p.lex.eof()) p.lex.error("trailing input");
  return e;
}

void PolyExpr::consolidate() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    auto& v = it->second;
    std::sort(v.begin(), v.end(), [](const CoeffTerm& a, const CoeffTerm& b) {
      return std::tie(a.pi_pow, a.u_pow) < std::tie(b.pi_pow, b.u_pow);
    });
    std::vector<CoeffTerm> merged;
    for (const auto& t : v) {
      if (!merged.empty() && merged.back().pi_pow == t.pi_pow && merged.back().u_pow == t.u_pow)
        merged.back().n += t.n;
      else
        merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const CoeffTerm& t) { return t.n == 0; }),
                 merged.end());
    if (merged.empty())
      it = terms_.erase(it);
    else {
      it->second = std::move(merged);
      ++it;
    }
  }
}

PolyExpr PolyExpr::add(const PolyExpr& o) const {
  PolyExpr r = *this;
  for (const auto& [m, v] : o.terms_) {
    auto& dst = r.terms_[m];
    dst.insert(dst.end(), v.begin(), v.end());
  }
  r.consolidate();
  return r;
}

PolyExpr PolyExpr::neg() const {
  PolyExpr r = *this;
  for (auto& [m, v] : r.terms_)
    for (auto& t : v) t.n = -t.n;
  return r;
}

PolyExpr PolyExpr::sub(const PolyExpr& o) const { return add(o.neg()); }

PolyExpr PolyExpr::mul(const PolyExpr& o) const {
  PolyExpr r;
  for (const auto& [m1, v1] : terms_) {
    for (const auto& [m2, v2] : o.terms_) {
      Monomial m = m1;
      for (const auto& [var, e] : m2) m[var] += e;
      auto& dst = r.terms_[m];
      for (const auto& a : v1)
        for (const auto& b : v2)
          dst.push_back(CoeffTerm{a.n * b.n, a.pi_pow + b.pi_pow, a.u_pow + b.u_pow});
    }
  }
  r.consolidate();
  return r;
}

PolyExpr PolyExpr::pow(uint32_t k) const {
  PolyExpr r = constant(1);
  PolyExpr b = *this;
  while (k) {
    if (k & 1) r = r.mul(b);
    b = b.mul(b);
    k >>= 1;
  }
  return r;
}

PolyExpr PolyExpr::derivative(const std::string& var) const {
  PolyExpr r;
  for (const auto& [m, v] : terms_) {
    auto it = m.find(var);
    if (it == m.end() || it->second == 0) continue;
    uint32_t e = it->second;
    Monomial m2 = m;
    if (e == 1)
      m2.erase(var);
    else
      m2[var] = e - 1;
    auto& dst = r.terms_[m2];
    for (const auto& t : v) dst.push_back(CoeffTerm{t.n * (long long)e, t.pi_pow, t.u_pow});
  }
  r.consolidate();
  return r;
}

std::vector<std::string> PolyExpr::variables() const {
  std::vector<std::string> vars;
  for (const auto& [m, v] : terms_)
    for (const auto& [name, e] : m)
      if (e) vars.push_back(name);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

uint32_t PolyExpr::total_degree() const {
  uint32_t d = 0;
  for (const auto& [m, v] : terms_) {
    uint32_t s = 0;
    for (const auto& [name, e] : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

uint32_t PolyExpr::degree_in(const std::string& var) const {
  uint32_t d = 0;
  for (const auto& [m, v] : terms_) {
    auto it = m.find(var);
    if (it != m.end()) d = std::max(d, it->second);
  }
  return d;
}

bool PolyExpr::uses_constants() const {
  for (const auto& [m, v] : terms_)
    for (const auto& t : v)
      if (t.pi_pow || t.u_pow) return true;
  return false;
}

std::string PolyExpr::canonical_text() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, v] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(";
    bool cfirst = true;
    for (const auto& t : v) {
      if (!cfirst) os << " + ";
      cfirst = false;
      os << t.n;
      if (t.pi_pow) os << "*pi^" << t.pi_pow;
      if (t.u_pow) os << "*u^" << t.u_pow;
    }
    os << ")";
    for (const auto& [name, e] : m) {
      if (!e) continue;
      os << "*" << name;
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

BoundPoly::BoundPoly(const PolyExpr& expr, FieldPtr field, int prec, FieldPtr constants_from)
    : field_(std::move(field)), prec_(prec), vars_(expr.variables()) {
  FieldPtr cbase = constants_from ? constants_from : field_;
  bool embed_constants = !cbase->same_as(*field_);
  uint32_t e_rel = embed_constants ? field_->rel_e_over(cbase) : 1;

  for (const auto& [m, v] : expr.terms()) {
    Padic coeff = Padic::zero(field_, prec_);
    for (const auto& t : v) {
      Padic part = Padic::from_int(field_, t.n, prec_);
      if (t.pi_pow || t.u_pow) {
        int src_prec = (prec_ + int(e_rel) - 1) / int(e_rel) + 1;
        Padic pi_c = Padic::uniformizer(cbase, src_prec);
        Padic u_c = Padic::unram_gen(cbase, src_prec);
        if (embed_constants) {
          pi_c = pi_c.embed_into(field_);
          u_c = u_c.embed_into(field_);
        }
        if (t.pi_pow) part = part.mul(pi_c.pad_exact(prec_).pow(uint64_t(t.pi_pow)));
        if (t.u_pow) part = part.mul(u_c.pad_exact(prec_).pow(uint64_t(t.u_pow)));
      }
      coeff = coeff.add(part);
    }
    if (coeff.is_zero()) continue;  // exact-zero coefficients drop (e.g. p - pi^e forms)
    BoundMonomial bm;
    bm.exps.resize(vars_.size(), 0);
    for (size_t i = 0; i < vars_.size(); ++i) {
      auto it = m.find(vars_[i]);
      bm.exps[i] = (it == m.end()) ? 0 : it->second;
    }
    bm.coeff = std::move(coeff);
    monomials_.push_back(std::move(bm));
  }
}

Padic BoundPoly::eval(const std::vector<Padic>& values) const {
  if (values.size() != vars_.size())
    fail(ErrorCode::UsageError, "assignment arity does not match the polynomial");
  int prec = prec_;
  for (const auto& v : values) prec = std::min(prec, v.precision());
  Padic acc = Padic::zero(field_, prec);
  for (const auto& bm : monomials_) {
    Padic term = bm.coeff.truncate(prec);
    for (size_t i = 0; i < vars_.size(); ++i)
      if (bm.exps[i]) term = term.mul(values[i].truncate(std::min(values[i].precision(), prec)).pow(bm.exps[i]));
    acc = acc.add(term);
  }
  return acc;
}

BoundPoly BoundPoly::derivative(size_t var_index) const {
  BoundPoly d;
  d.field_ = field_;
  d.prec_ = prec_;
  d.vars_ = vars_;
  for (const auto& bm : monomials_) {
    if (var_index >= bm.exps.size() || bm.exps[var_index] == 0) continue;
    BoundMonomial nm = bm;
    uint32_t e = nm.exps[var_index];
    nm.exps[var_index] = e - 1;
    nm.coeff = bm.coeff.mul(Padic::from_int(field_, (long long)e, prec_));
    if (nm.coeff.is_zero()) continue;
    d.monomials_.push_back(std::move(nm));
  }
  return d;
}

std::vector<Padic> BoundPoly::univariate_coeffs() const {
  if (vars_.size() > 1)
    fail(ErrorCode::UsageError, "univariate coefficient extraction needs one variable");
  uint32_t deg = 0;
  for (const auto& bm : monomials_)
    if (!bm.exps.empty()) deg = std::max(deg, bm.exps[0]);
  std::vector<Padic> out(deg + 1, Padic::zero(field_, prec_));
  for (const auto& bm : monomials_) {
    uint32_t e = bm.exps.empty() ? 0 : bm.exps[0];
    out[e] = out[e].add(bm.coeff);
  }
  return out;
}

uint32_t BoundPoly::degree_in(size_t var_index) const {
  uint32_t d = 0;
  for (const auto& bm : monomials_)
    if (var_index < bm.exps.size()) d = std::max(d, bm.exps[var_index]);
  return d;
}

Padic canonicalize_expr(const PolyExpr& expr, const FieldPtr& field, int prec) {
  if (!expr.variables().empty())
    fail(ErrorCode::UsageError, "canonicalize takes a variable-free expression");
  BoundPoly bound(expr, field, prec);
  return bound.eval({});
}

}  // namespace rvlab

#include "rvlab/formula.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstring>
#include <sstream>

#include "rvlab/exactring.hpp"

namespace rvlab {

const char* verdict_name(Verdict3 v) {
  switch (v) {
    case Verdict3::False: return "false";
    case Verdict3::Unknown: return "unknown";
    case Verdict3::True: return "true";
  }
  return "?";
}

// ---------------------------------------------------------------- parsing

namespace {

struct FLexer {
  const std::string& s;
  size_t pos = 0;
  explicit FLexer(const std::string& t) : s(t) {}

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
  void expect(char c, const char* what) {
    if (!accept(c)) error(std::string("expected '") + c + "' " + what);
  }
  bool accept_word(const char* w) {
    skip_ws();
    size_t n = std::strlen(w);
    if (pos + n > s.size() || s.compare(pos, n, w) != 0) return false;
    size_t end = pos + n;
    if (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
      return false;
    pos = end;
    return true;
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
  uint64_t number() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) error("expected a number");
    return std::stoull(s.substr(start, pos - start));
  }
  // the balanced-paren slice after an opening '(' already consumed
  std::string balanced_slice() {
    int depth = 1;
    size_t start = pos;
    while (pos < s.size() && depth > 0) {
      if (s[pos] == '(') ++depth;
      if (s[pos] == ')') --depth;
      ++pos;
    }
    if (depth != 0) error("unbalanced parentheses");
    return s.substr(start, pos - 1 - start);
  }
  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos));
  }
};

struct FParser {
  FLexer lex;
  // depths of bound RV variables in scope (0 for VF-bound names)
  std::vector<std::pair<std::string, uint64_t>> scope;

  explicit FParser(const std::string& t) : lex(t) {}

  std::optional<uint64_t> lookup(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return it->second;
    return std::nullopt;
  }

  FormulaPtr parse() {
    FormulaPtr f = parse_quantified();
    if (!lex.eof()) lex.error("trailing input");
    return f;
  }

  FormulaPtr parse_quantified() {
    if (lex.accept_word("exists")) {
      auto node = std::make_shared<Formula>();
      node->bound_var = lex.ident();
      lex.expect(':', "after the bound variable");
      if (lex.accept_word("VF")) {
        node->kind = Formula::Kind::ExistsVf;
        scope.emplace_back(node->bound_var, 0);
      } else if (lex.accept_word("RV")) {
        lex.expect('(', "after RV");
        node->kind = Formula::Kind::ExistsRv;
        node->bound_depth = lex.number();
        if (node->bound_depth == 0) lex.error("RV depth must be positive");
        lex.expect(')', "after the RV depth");
        scope.emplace_back(node->bound_var, node->bound_depth);
      } else {
        lex.error("expected sort VF or RV(n)");
      }
      lex.expect('.', "after the quantifier");
      node->sub.push_back(parse_quantified());
      scope.pop_back();
      return node;
    }
    return parse_disj();
  }

  FormulaPtr parse_disj() {
    FormulaPtr acc = parse_conj();
    while (lex.accept_word("or")) {
      FormulaPtr rhs = parse_conj();
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Or;
      node->sub = {acc, rhs};
      acc = node;
    }
    return acc;
  }

  FormulaPtr parse_conj() {
    FormulaPtr acc = parse_neg();
    while (lex.accept_word("and")) {
      FormulaPtr rhs = parse_neg();
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::And;
      node->sub = {acc, rhs};
      acc = node;
    }
    return acc;
  }

  FormulaPtr parse_neg() {
    if (lex.accept_word("not")) {
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Not;
      node->sub = {parse_neg()};
      return node;
    }
    // a parenthesized formula vs a parenthesized term: parse speculatively
    if (lex.peek() == '(') {
      size_t save = lex.pos;
      auto save_scope = scope;
      lex.accept('(');
      try {
        FormulaPtr inner = parse_quantified();
        lex.expect(')', "after the subformula");
        return inner;
      } catch (const Error&) {
        lex.pos = save;
        scope = save_scope;
      }
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    lex.skip_ws();
    // Hensel predicate P[N,d](xi; z0, ..., zd)
    if (lex.peek() == 'P') {
      size_t save = lex.pos;
      ++lex.pos;
      if (lex.accept('[')) {
        auto node = std::make_shared<Formula>();
        node->kind = Formula::Kind::Pred;
        node->pred_depth = lex.number();
        lex.expect(',', "in P[N,d]");
        node->pred_degree = int(lex.number());
        lex.expect(']', "in P[N,d]");
        lex.expect('(', "after P[N,d]");
        node->args.push_back(parse_term());
        if (!lex.accept(';')) lex.expect(',', "between predicate arguments");
        node->args.push_back(parse_term());
        while (lex.accept(',')) node->args.push_back(parse_term());
        lex.expect(')', "closing the predicate");
        if (int(node->args.size()) != node->pred_degree + 2)
          fail(ErrorCode::SortError, "P[N,d] takes 1 + (d+1) arguments");
        return node;
      }
      lex.pos = save;
    }
    if (lex.accept_word("oplus")) {
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::OplusRel;
      lex.expect('(', "after oplus");
      node->args.push_back(parse_term());
      lex.expect(',', "between oplus arguments");
      node->args.push_back(parse_term());
      lex.expect(',', "between oplus arguments");
      node->args.push_back(parse_term());
      lex.expect(')', "closing oplus");
      return node;
    }
    // keep parse calls out of braced initializer lists: a throwing element
    // initializer would leak the earlier elements under gcc
    RvTermPtr lhs = parse_term();
    if (lex.accept('=')) {
      RvTermPtr rhs = parse_term();
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::RvEq;
      node->args = {lhs, rhs};
      return node;
    }
    if (lex.accept('!')) {
      lex.expect('=', "after '!'");
      RvTermPtr rhs = parse_term();
      auto eq = std::make_shared<Formula>();
      eq->kind = Formula::Kind::RvEq;
      eq->args = {lhs, rhs};
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Not;
      node->sub = {eq};
      return node;
    }
    if (lex.accept('|')) {
      RvTermPtr rhs = parse_term();
      auto node = std::make_shared<Formula>();
      node->kind = Formula::Kind::Divides;
      node->args = {lhs, rhs};
      return node;
    }
    lex.error("expected =, !=, or | after a term");
  }

  RvTermPtr parse_term() {
    RvTermPtr acc = parse_term_factor();
    std::vector<RvTermPtr> factors{acc};
    while (true) {
      lex.skip_ws();
      if (lex.peek() == '*' ||
          (lex.pos + 1 < lex.s.size() && lex.s.compare(lex.pos, 2, "\xc2\xb7") == 0)) {
        if (!lex.accept('*')) lex.pos += 2;  // the · character
        factors.push_back(parse_term_factor());
      } else {
        break;
      }
    }
    if (factors.size() == 1) return factors[0];
    auto node = std::make_shared<RvTerm>();
    node->kind = RvTerm::Kind::Product;
    node->factors = std::move(factors);
    return node;
  }

  RvTermPtr parse_term_factor() {
    RvTermPtr base = parse_term_base();
    while (lex.accept('^')) {
      uint64_t k = lex.number();
      if (k > 32) lex.error("exponent out of range");
      auto node = std::make_shared<RvTerm>();
      node->kind = RvTerm::Kind::Product;
      for (uint64_t i = 0; i < k; ++i) node->factors.push_back(base);
      if (k == 0) {
        auto one = std::make_shared<RvTerm>();
        one->kind = RvTerm::Kind::Const;
        one->const_val = 1;
        base = one;
      } else {
        base = node;
      }
    }
    return base;
  }

  RvTermPtr parse_term_base() {
    lex.skip_ws();
    char c = lex.peek();
    if (c == '(') {
      lex.accept('(');
      RvTermPtr t = parse_term();
      lex.expect(')', "closing the term");
      return t;
    }
    if (c == '0' || c == '1') {
      size_t after = lex.pos + 1;
      if (after >= lex.s.size() || !std::isalnum(static_cast<unsigned char>(lex.s[after]))) {
        lex.pos = after;
        auto node = std::make_shared<RvTerm>();
        node->kind = RvTerm::Kind::Const;
        node->const_val = c - '0';
        return node;
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = lex.ident();
      if (name.size() > 2 && name.compare(0, 2, "rv") == 0 &&
          std::all_of(name.begin() + 2, name.end(),
                      [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        uint64_t depth = std::stoull(name.substr(2));
        if (depth == 0) lex.error("rv depth must be positive");
        lex.expect('(', "after the rv map");
        std::string inner = lex.balanced_slice();
        auto node = std::make_shared<RvTerm>();
        node->kind = RvTerm::Kind::OfVf;
        node->depth = depth;
        node->poly = PolyExpr::parse(inner);
        return node;
      }
      if (name == "proj") {
        lex.expect('[', "after proj");
        uint64_t depth = lex.number();
        lex.expect(']', "after the projection depth");
        lex.expect('(', "after proj[N]");
        auto node = std::make_shared<RvTerm>();
        node->kind = RvTerm::Kind::Project;
        node->depth = depth;
        node->inner = parse_term();
        lex.expect(')', "closing proj");
        return node;
      }
      auto bound = lookup(name);
      if (bound && *bound == 0)
        fail(ErrorCode::SortError, "VF variable '" + name + "' used in an RV position");
      auto node = std::make_shared<RvTerm>();
      node->kind = RvTerm::Kind::Var;
      node->var = name;
      node->depth = bound ? *bound : 0;  // free variables resolve by unification
      return node;
    }
    lex.error("expected an RV term");
  }
};

// -------- depth inference: wildcard depths (0) adopt sibling depths --------

struct DepthInference {
  std::map<std::string, uint64_t>& var_depths;

  uint64_t term_depth(const RvTermPtr& t) {
    switch (t->kind) {
      case RvTerm::Kind::OfVf:
        return t->depth;
      case RvTerm::Kind::Project:
        term_depth(t->inner);
        return t->depth;
      case RvTerm::Kind::Const:
        return t->depth;  // possibly 0 (wildcard)
      case RvTerm::Kind::Var: {
        auto it = var_depths.find(t->var);
        if (t->depth) {
          var_depths[t->var] = t->depth;
          return t->depth;
        }
        return it == var_depths.end() ? 0 : it->second;
      }
      case RvTerm::Kind::Product: {
        uint64_t d = 0;
        for (const auto& f : t->factors) {
          uint64_t fd = term_depth(f);
          if (fd == 0) continue;
          if (d == 0) d = fd;
          if (fd != d)
            fail(ErrorCode::SortError, "product factors live at different depths (" +
                                           std::to_string(d) + " vs " + std::to_string(fd) + ")");
        }
        return d;
      }
    }
    return 0;
  }

  void push_depth(const RvTermPtr& t, uint64_t d) {
    auto* mt = const_cast<RvTerm*>(t.get());
    switch (t->kind) {
      case RvTerm::Kind::Const:
        if (mt->depth == 0) mt->depth = d;
        break;
      case RvTerm::Kind::Var:
        if (mt->depth == 0) {
          auto it = var_depths.find(t->var);
          if (it != var_depths.end() && it->second != d && it->second != 0)
            fail(ErrorCode::SortError, "variable '" + t->var + "' used at depths " +
                                           std::to_string(it->second) + " and " + std::to_string(d));
          var_depths[t->var] = d;
          mt->depth = d;
        } else if (mt->depth != d) {
          fail(ErrorCode::SortError, "variable '" + t->var + "' used at depth " +
                                         std::to_string(d) + " but declared at " +
                                         std::to_string(mt->depth));
        }
        break;
      case RvTerm::Kind::Product:
        if (mt->depth == 0) mt->depth = d;
        for (const auto& f : t->factors) push_depth(f, d);
        break;
      case RvTerm::Kind::Project:
        if (t->depth != d)
          fail(ErrorCode::SortError, "projection target depth mismatch");
        if (term_depth(t->inner)) {
          if (term_depth(t->inner) % t->depth != 0)
            fail(ErrorCode::SortError, "projection depth must divide the source depth");
        }
        break;
      case RvTerm::Kind::OfVf:
        if (t->depth != d)
          fail(ErrorCode::SortError, "term depth mismatch (" + std::to_string(t->depth) +
                                         " vs " + std::to_string(d) + ")");
        break;
    }
  }

  void unify_atom(const std::vector<RvTermPtr>& args,
                  const std::vector<uint64_t>& expected) {
    // expected[i] == 0: share one depth across those arguments
    uint64_t shared = 0;
    for (size_t i = 0; i < args.size(); ++i) {
      if (expected[i]) continue;
      uint64_t d = term_depth(args[i]);
      if (d == 0) continue;
      if (shared == 0) shared = d;
      if (d != shared)
        fail(ErrorCode::SortError, "atom arguments live at different depths (" +
                                       std::to_string(shared) + " vs " + std::to_string(d) + ")");
    }
    if (shared == 0) shared = 1;  // fully wildcard atoms default to RV_1
    for (size_t i = 0; i < args.size(); ++i) {
      uint64_t want = expected[i] ? expected[i] : shared;
      uint64_t d = term_depth(args[i]);
      if (d != 0 && d != want)
        fail(ErrorCode::SortError, "argument depth " + std::to_string(d) + ", expected " +
                                       std::to_string(want));
      push_depth(args[i], want);
    }
  }

  void run(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::RvEq:
      case Formula::Kind::Divides:
        unify_atom(f->args, {0, 0});
        break;
      case Formula::Kind::OplusRel:
        unify_atom(f->args, {0, 0, 0});
        break;
      case Formula::Kind::Pred: {
        std::vector<uint64_t> expected(f->args.size(), f->pred_depth * f->pred_depth);
        expected[0] = f->pred_depth;
        unify_atom(f->args, expected);
        break;
      }
      default:
        for (const auto& s : f->sub) run(s);
    }
  }
};

void collect_vf_vars(const FormulaPtr& f, std::set<std::string>& bound,
                     std::set<std::string>& vf_free) {
  switch (f->kind) {
    case Formula::Kind::RvEq:
    case Formula::Kind::Divides:
    case Formula::Kind::OplusRel:
    case Formula::Kind::Pred: {
      std::vector<RvTermPtr> stack(f->args.begin(), f->args.end());
      while (!stack.empty()) {
        RvTermPtr t = stack.back();
        stack.pop_back();
        if (t->kind == RvTerm::Kind::OfVf) {
          for (const auto& v : t->poly.variables())
            if (!bound.count(v)) vf_free.insert(v);
        } else if (t->kind == RvTerm::Kind::Product) {
          stack.insert(stack.end(), t->factors.begin(), t->factors.end());
        } else if (t->kind == RvTerm::Kind::Project) {
          stack.push_back(t->inner);
        }
      }
      break;
    }
    case Formula::Kind::ExistsVf: {
      bool added = bound.insert(f->bound_var).second;
      collect_vf_vars(f->sub[0], bound, vf_free);
      if (added) bound.erase(f->bound_var);
      break;
    }
    default:
      for (const auto& s : f->sub) collect_vf_vars(s, bound, vf_free);
  }
}

void collect_rv_vars(const FormulaPtr& f, std::set<std::string>& bound,
                     std::map<std::string, uint64_t>& rv_free) {
  switch (f->kind) {
    case Formula::Kind::RvEq:
    case Formula::Kind::Divides:
    case Formula::Kind::OplusRel:
    case Formula::Kind::Pred: {
      std::vector<RvTermPtr> stack(f->args.begin(), f->args.end());
      while (!stack.empty()) {
        RvTermPtr t = stack.back();
        stack.pop_back();
        if (t->kind == RvTerm::Kind::Var && !bound.count(t->var)) rv_free[t->var] = t->depth;
        if (t->kind == RvTerm::Kind::Product)
          stack.insert(stack.end(), t->factors.begin(), t->factors.end());
        if (t->kind == RvTerm::Kind::Project) stack.push_back(t->inner);
      }
      break;
    }
    case Formula::Kind::ExistsRv: {
      bool added = bound.insert(f->bound_var).second;
      collect_rv_vars(f->sub[0], bound, rv_free);
      if (added) bound.erase(f->bound_var);
      break;
    }
    default:
      for (const auto& s : f->sub) collect_rv_vars(s, bound, rv_free);
  }
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  FParser p(text);
  FormulaPtr f = p.parse();
  std::map<std::string, uint64_t> var_depths;
  DepthInference inf{var_depths};
  inf.run(f);
  inf.run(f);  // second pass lets late bindings flow back into earlier atoms
  // every free RV variable must have a resolved depth
  std::set<std::string> bound;
  std::map<std::string, uint64_t> rv_free;
  collect_rv_vars(f, bound, rv_free);
  for (const auto& [name, d] : rv_free)
    if (d == 0)
      fail(ErrorCode::SortError, "cannot infer the depth of RV variable '" + name + "'");
  return f;
}

// ---------------------------------------------------------------- printing

std::string print_term(const RvTermPtr& t) {
  std::ostringstream os;
  switch (t->kind) {
    case RvTerm::Kind::Var:
      os << t->var;
      break;
    case RvTerm::Kind::Const:
      os << t->const_val;
      break;
    case RvTerm::Kind::OfVf:
      os << "rv" << t->depth << "(" << t->poly.canonical_text() << ")";
      break;
    case RvTerm::Kind::Project:
      os << "proj[" << t->depth << "](" << print_term(t->inner) << ")";
      break;
    case RvTerm::Kind::Product: {
      bool first = true;
      for (const auto& f : t->factors) {
        if (!first) os << " * ";
        first = false;
        bool paren = f->kind == RvTerm::Kind::Product;
        if (paren) os << "(";
        os << print_term(f);
        if (paren) os << ")";
      }
      break;
    }
  }
  return os.str();
}

std::string print_formula(const FormulaPtr& f) {
  std::ostringstream os;
  switch (f->kind) {
    case Formula::Kind::RvEq:
      os << print_term(f->args[0]) << " = " << print_term(f->args[1]);
      break;
    case Formula::Kind::Divides:
      os << print_term(f->args[0]) << " | " << print_term(f->args[1]);
      break;
    case Formula::Kind::OplusRel:
      os << "oplus(" << print_term(f->args[0]) << ", " << print_term(f->args[1]) << ", "
         << print_term(f->args[2]) << ")";
      break;
    case Formula::Kind::Pred: {
      os << "P[" << f->pred_depth << "," << f->pred_degree << "](" << print_term(f->args[0])
         << "; ";
      for (size_t i = 1; i < f->args.size(); ++i) {
        if (i > 1) os << ", ";
        os << print_term(f->args[i]);
      }
      os << ")";
      break;
    }
    case Formula::Kind::And:
      os << "(" << print_formula(f->sub[0]) << " and " << print_formula(f->sub[1]) << ")";
      break;
    case Formula::Kind::Or:
      os << "(" << print_formula(f->sub[0]) << " or " << print_formula(f->sub[1]) << ")";
      break;
    case Formula::Kind::Not:
      os << "not (" << print_formula(f->sub[0]) << ")";
      break;
    case Formula::Kind::ExistsRv:
      os << "exists " << f->bound_var << ":RV(" << f->bound_depth << "). "
         << print_formula(f->sub[0]);
      break;
    case Formula::Kind::ExistsVf:
      os << "exists " << f->bound_var << ":VF. " << print_formula(f->sub[0]);
      break;
  }
  return os.str();
}

FreeVars free_variables(const FormulaPtr& f) {
  std::set<std::string> bound;
  std::set<std::string> vf;
  std::map<std::string, uint64_t> rv;
  collect_vf_vars(f, bound, vf);
  bound.clear();
  collect_rv_vars(f, bound, rv);
  FreeVars out;
  out.vf.assign(vf.begin(), vf.end());
  for (const auto& [name, d] : rv) out.rv.emplace_back(name, d);
  return out;
}

bool is_quantifier_free(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::ExistsRv:
    case Formula::Kind::ExistsVf:
      return false;
    default:
      for (const auto& s : f->sub)
        if (!is_quantifier_free(s)) return false;
      return true;
  }
}

bool is_exists_simple(const FormulaPtr& f) {
  const Formula* cur = f.get();
  while (cur->kind == Formula::Kind::ExistsRv) cur = cur->sub[0].get();
  std::vector<const Formula*> stack{cur};
  while (!stack.empty()) {
    const Formula* n = stack.back();
    stack.pop_back();
    if (n->kind == Formula::Kind::ExistsRv || n->kind == Formula::Kind::ExistsVf) return false;
    for (const auto& s : n->sub) stack.push_back(s.get());
  }
  return true;
}

namespace {
bool negation_free(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::Not) return false;
  for (const auto& s : f->sub)
    if (!negation_free(s)) return false;
  return true;
}
}  // namespace

std::optional<std::string> monotone_shape_violation(const FormulaPtr& f) {
  // strip the existential prefix
  const FormulaPtr* cur = &f;
  while ((*cur)->kind == Formula::Kind::ExistsRv || (*cur)->kind == Formula::Kind::ExistsVf) {
    if ((*cur)->kind == Formula::Kind::ExistsVf && !negation_free((*cur)->sub[0]))
      return "negation under a VF quantifier";
    cur = &(*cur)->sub[0];
  }
  if (!is_quantifier_free(*cur)) return "quantifier below a connective (not an existential prefix)";
  return std::nullopt;
}

// ---------------------------------------------------------------- evaluation

namespace {

constexpr long kInfRadius = LONG_MAX / 4;

struct CertV {
  Verdict3 v = Verdict3::Unknown;
  std::set<std::string> ws;  // enumeration balls the truth is witness-based in

  static CertV robust_true() { return {Verdict3::True, {}}; }
  static CertV f() { return {Verdict3::False, {}}; }
  static CertV u() { return {Verdict3::Unknown, {}}; }
};

CertV cert_and(const CertV& a, const CertV& b) {
  if (a.v == Verdict3::False || b.v == Verdict3::False) return CertV::f();
  if (a.v == Verdict3::Unknown || b.v == Verdict3::Unknown) return CertV::u();
  for (const auto& w : a.ws)
    if (b.ws.count(w)) return CertV::u();  // two witnesses fighting over one ball
  CertV r = a;
  r.ws.insert(b.ws.begin(), b.ws.end());
  return r;
}

CertV cert_or(const CertV& a, const CertV& b) {
  if (a.v == Verdict3::True && a.ws.empty()) return a;
  if (b.v == Verdict3::True && b.ws.empty()) return b;
  if (a.v == Verdict3::True) return a;
  if (b.v == Verdict3::True) return b;
  if (a.v == Verdict3::Unknown || b.v == Verdict3::Unknown) return CertV::u();
  return CertV::f();
}

CertV cert_not(const CertV& a) {
  if (a.v == Verdict3::False) return CertV::robust_true();
  if (a.v == Verdict3::True && a.ws.empty()) return CertV::f();
  return CertV::u();
}

Verdict3 level_and(Verdict3 a, Verdict3 b) {
  if (a == Verdict3::False || b == Verdict3::False) return Verdict3::False;
  if (a == Verdict3::Unknown || b == Verdict3::Unknown) return Verdict3::Unknown;
  return Verdict3::True;
}
Verdict3 level_or(Verdict3 a, Verdict3 b) {
  if (a == Verdict3::True || b == Verdict3::True) return Verdict3::True;
  if (a == Verdict3::Unknown || b == Verdict3::Unknown) return Verdict3::Unknown;
  return Verdict3::False;
}
Verdict3 level_not(Verdict3 a) {
  if (a == Verdict3::True) return Verdict3::False;
  if (a == Verdict3::False) return Verdict3::True;
  return Verdict3::Unknown;
}

struct TermVal {
  bool deep = false;  // every digit vanished: ord >= bound, value unknown
  RvElement val;      // when !deep, the exact class at the representative
  long bound = 0;
  bool class_robust = true;  // class constant over the assignment balls
  long min_radius = kInfRadius;
  // certificate hook for single-polynomial terms
  const RvTerm* of_vf = nullptr;
};

struct EvalCtx {
  FieldPtr field;
  const SearchWindow* window;
  int work_prec;        // padding precision for exact representatives
  uint64_t budget;      // remaining enumeration steps
  FieldPtr const_base;  // field whose pi/u the coefficients mean
  std::map<const RvTerm*, BoundPoly> binds;
  std::map<const RvTerm*, std::vector<BoundPoly>> deriv_binds;

  const BoundPoly& bind(const RvTerm* t) {
    auto it = binds.find(t);
    if (it != binds.end()) return it->second;
    auto [it2, ok] = binds.emplace(t, BoundPoly(t->poly, field, work_prec, const_base));
    return it2->second;
  }
  const std::vector<BoundPoly>& derivs(const RvTerm* t) {
    auto it = deriv_binds.find(t);
    if (it != deriv_binds.end()) return it->second;
    const BoundPoly& b = bind(t);
    std::vector<BoundPoly> ds;
    for (size_t i = 0; i < b.variables().size(); ++i) ds.push_back(b.derivative(i));
    auto [it2, ok] = deriv_binds.emplace(t, std::move(ds));
    return it2->second;
  }
};

// gathered VF values for one polynomial
struct PolyPoint {
  std::vector<Padic> values;
  std::vector<long> radii;
  bool all_exact = true;
  long min_radius = kInfRadius;
};

PolyPoint gather_point(EvalCtx& ctx, const BoundPoly& bp, const Assignment& a) {
  PolyPoint pt;
  for (const auto& var : bp.variables()) {
    auto it = a.vf.find(var);
    if (it == a.vf.end())
      fail(ErrorCode::UsageError, "VF variable '" + var + "' has no assigned value");
    const AssignedValue& av = it->second;
    Padic v = av.exact ? av.value.pad_exact(std::min(ctx.work_prec, ctx.field->max_precision()))
                       : av.value;
    pt.values.push_back(std::move(v));
    pt.radii.push_back(av.radius);
    pt.all_exact = pt.all_exact && av.exact;
    pt.min_radius = std::min(pt.min_radius, long(av.radius));
  }
  return pt;
}

TermVal eval_term(EvalCtx& ctx, const RvTermPtr& t, const Assignment& a) {
  TermVal out;
  switch (t->kind) {
    case RvTerm::Kind::Const: {
      uint64_t d = t->depth ? t->depth : 1;
      out.val = (t->const_val == 0) ? RvElement::zero(ctx.field, d) : rv_one(ctx.field, d);
      return out;
    }
    case RvTerm::Kind::Var: {
      auto it = a.rv.find(t->var);
      if (it == a.rv.end())
        fail(ErrorCode::UsageError, "RV variable '" + t->var + "' has no assigned value");
      if (t->depth && it->second.depth() != t->depth)
        fail(ErrorCode::SortError, "RV variable '" + t->var + "' bound at a different depth");
      out.val = it->second;
      return out;
    }
    case RvTerm::Kind::Project: {
      TermVal inner = eval_term(ctx, t->inner, a);
      if (inner.deep) {
        out = inner;
        return out;
      }
      out = inner;
      out.val = rv_project(inner.val, t->depth);
      return out;
    }
    case RvTerm::Kind::Product: {
      std::vector<TermVal> vals;
      for (const auto& f : t->factors) vals.push_back(eval_term(ctx, f, a));
      bool any_deep = false;
      long bound_sum = 0;
      for (const auto& v : vals) {
        out.min_radius = std::min(out.min_radius, v.min_radius);
        out.class_robust = out.class_robust && v.class_robust;
        if (v.deep) {
          any_deep = true;
          bound_sum += v.bound;
        } else if (v.val.is_zero()) {
          out.deep = false;
          out.val = RvElement::zero(ctx.field, t->depth);
          return out;  // exact zero absorbs
        } else {
          bound_sum += v.val.gamma();
        }
      }
      if (any_deep) {
        out.deep = true;
        out.bound = bound_sum;
        return out;
      }
      RvElement acc = vals[0].val;
      for (size_t i = 1; i < vals.size(); ++i) acc = rv_mul(acc, vals[i].val);
      out.val = std::move(acc);
      return out;
    }
    case RvTerm::Kind::OfVf: {
      const BoundPoly& bp = ctx.bind(t.get());
      PolyPoint pt = gather_point(ctx, bp, a);
      Padic v = bp.eval(pt.values);
      out.min_radius = pt.min_radius;
      out.of_vf = t.get();
      Valuation ord = v.ord();
      int w = RvElement::unit_width(*ctx.field, t->depth);
      long ord_n = ctx.field->ord_of_int(t->depth);
      if (!ord.is_known() || v.precision() < ord.value + w) {
        out.deep = true;
        out.bound = ord.is_known() ? ord.value : v.precision();
        out.class_robust = false;
        return out;
      }
      out.val = rv_of(v, t->depth);
      out.class_robust = (ord.value + ord_n) < pt.min_radius;
      return out;
    }
  }
  fail(ErrorCode::Internal, "unhandled term kind");
}

struct AtomVerdicts {
  Verdict3 level;
  CertV cert;
};

std::set<std::string> ball_vars_of(EvalCtx& ctx, const RvTerm* term, const Assignment& a) {
  std::set<std::string> ws;
  if (!term) return ws;
  const BoundPoly& bp = ctx.bind(term);
  for (const auto& var : bp.variables()) {
    auto it = a.vf.find(var);
    if (it != a.vf.end() && it->second.radius < kInfRadius) ws.insert(var);
  }
  return ws;
}

// Certificate that some exact point in the assignment's balls zeroes the
// polynomial: either an exact-zero evaluation or a Newton contraction in one
// variable. Requires every occurring value to be an exact representative.
bool zero_certificate(EvalCtx& ctx, const RvTerm* term, const Assignment& a, long ord_lower) {
  const BoundPoly& bp = ctx.bind(term);
  PolyPoint pt = gather_point(ctx, bp, a);
  if (!pt.all_exact) return false;

  if (exact_poly_zero(term->poly, ctx.field, ctx.const_base, pt.values)) return true;

  // Newton contraction in a single variable
  const auto& ds = ctx.derivs(term);
  for (size_t j = 0; j < ds.size(); ++j) {
    Padic dv = ds[j].eval(pt.values);
    Valuation tv = dv.ord();
    if (!tv.is_known()) continue;
    long t = tv.value;
    if (ord_lower > 2 * t && ord_lower - t >= pt.radii[j]) return true;
  }
  return false;
}

AtomVerdicts eval_zero_atom(EvalCtx& ctx, const TermVal& side, const Assignment& a) {
  AtomVerdicts out{Verdict3::Unknown, CertV::u()};
  long eff_ord = side.deep ? side.bound : (side.val.is_zero() ? kInfRadius : side.val.gamma());
  out.level = (eff_ord >= ctx.window->vf_precision) ? Verdict3::True : Verdict3::False;

  if (!side.deep && side.val.is_zero()) {
    out.cert = CertV::robust_true();  // literal zero
    return out;
  }
  if (!side.deep && side.val.gamma() < side.min_radius) {
    out.cert = CertV::f();  // nonvanishing robust on the balls
    return out;
  }
  if (side.of_vf) {
    long lower = side.deep ? side.bound : side.val.gamma();
    if (zero_certificate(ctx, side.of_vf, a, lower)) {
      CertV c;
      c.v = Verdict3::True;
      c.ws = ball_vars_of(ctx, side.of_vf, a);
      out.cert = c;
      return out;
    }
  }
  out.cert = CertV::u();
  return out;
}

bool is_zero_side(const TermVal& v) { return !v.deep && v.val.is_zero(); }

AtomVerdicts eval_rveq(EvalCtx& ctx, const FormulaPtr& f, const Assignment& a) {
  TermVal l = eval_term(ctx, f->args[0], a);
  TermVal r = eval_term(ctx, f->args[1], a);
  if (is_zero_side(r) && !is_zero_side(l)) return eval_zero_atom(ctx, l, a);
  if (is_zero_side(l) && !is_zero_side(r)) return eval_zero_atom(ctx, r, a);
  if (is_zero_side(l) && is_zero_side(r)) return {Verdict3::True, CertV::robust_true()};

  AtomVerdicts out{Verdict3::Unknown, CertV::u()};
  if (!l.deep && !r.deep) {
    bool eq = (l.val == r.val);
    out.level = eq ? Verdict3::True : Verdict3::False;
    if (l.class_robust && r.class_robust)
      out.cert = eq ? CertV::robust_true() : CertV::f();
    return out;
  }
  if (l.deep && r.deep) {
    out.level = Verdict3::True;  // both vanish at window level
    return out;
  }
  const TermVal& deep = l.deep ? l : r;
  const TermVal& exact = l.deep ? r : l;
  if (exact.val.gamma() < deep.bound) {
    out.level = Verdict3::False;
    long robust_bound = std::min(deep.bound, deep.min_radius);
    if (exact.class_robust && exact.val.gamma() + ctx.field->ord_of_int(exact.val.depth()) <
                                  robust_bound)
      out.cert = CertV::f();
  }
  return out;
}

AtomVerdicts eval_divides(EvalCtx& ctx, const FormulaPtr& f, const Assignment& a) {
  TermVal l = eval_term(ctx, f->args[0], a);
  TermVal r = eval_term(ctx, f->args[1], a);
  AtomVerdicts out{Verdict3::Unknown, CertV::u()};

  auto ord_robust = [](const TermVal& v) {
    if (v.deep) return false;
    if (v.val.is_zero()) return true;
    return v.val.gamma() < v.min_radius;
  };

  // level verdict: deep sides read as the zero element
  bool lz = l.deep || l.val.is_zero();
  bool rz = r.deep || r.val.is_zero();
  if (rz)
    out.level = Verdict3::True;
  else if (lz)
    out.level = Verdict3::False;
  else
    out.level = (l.val.gamma() <= r.val.gamma()) ? Verdict3::True : Verdict3::False;

  // certified verdict
  if (!l.deep && !r.deep) {
    if (ord_robust(l) && ord_robust(r))
      out.cert = rv_divides(l.val, r.val) ? CertV::robust_true() : CertV::f();
    return out;
  }
  if (!l.deep && r.deep) {
    // r is 0 (divisible by anything) or has ord >= bound-ish
    if (!l.val.is_zero() && ord_robust(l) && l.val.gamma() <= std::min(r.bound, r.min_radius))
      out.cert = CertV::robust_true();
    return out;
  }
  if (l.deep && !r.deep) {
    // l is 0 (divides only 0) or ord >= bound > ord r: both read false
    if (!r.val.is_zero() && ord_robust(r) && r.val.gamma() < std::min(l.bound, l.min_radius))
      out.cert = CertV::f();
    return out;
  }
  return out;
}

RvElement level_value(const EvalCtx& ctx, const TermVal& v, uint64_t depth) {
  if (v.deep) return RvElement::zero(ctx.field, depth);
  return v.val;
}

AtomVerdicts eval_oplus(EvalCtx& ctx, const FormulaPtr& f, const Assignment& a) {
  TermVal t1 = eval_term(ctx, f->args[0], a);
  TermVal t2 = eval_term(ctx, f->args[1], a);
  TermVal t3 = eval_term(ctx, f->args[2], a);
  uint64_t depth = f->args[0]->depth ? f->args[0]->depth : 1;
  AtomVerdicts out{Verdict3::Unknown, CertV::u()};
  bool rel_level = oplus_rel(level_value(ctx, t1, depth), level_value(ctx, t2, depth),
                             level_value(ctx, t3, depth));
  out.level = rel_level ? Verdict3::True : Verdict3::False;
  if (!t1.deep && !t2.deep && !t3.deep && t1.class_robust && t2.class_robust &&
      t3.class_robust) {
    bool rel = oplus_rel(t1.val, t2.val, t3.val);
    out.cert = rel ? CertV::robust_true() : CertV::f();
    out.level = rel ? Verdict3::True : Verdict3::False;
  }
  return out;
}

AtomVerdicts eval_pred(EvalCtx& ctx, const FormulaPtr& f, const Assignment& a) {
  std::vector<TermVal> vals;
  for (const auto& t : f->args) vals.push_back(eval_term(ctx, t, a));
  AtomVerdicts out{Verdict3::Unknown, CertV::u()};

  auto run_pred = [&](bool level_mode) -> Verdict3 {
    const TermVal& xiv = vals[0];
    RvElement xi = level_mode ? level_value(ctx, xiv, f->pred_depth)
                              : xiv.val;
    if (xi.is_zero()) return Verdict3::False;  // P_{N,d} holds only on RV_N^×
    std::vector<RvElement> zeta;
    for (size_t i = 1; i < vals.size(); ++i)
      zeta.push_back(level_mode ? level_value(ctx, vals[i], f->pred_depth * f->pred_depth)
                                : vals[i].val);
    return hensel_predicate(f->pred_depth, f->pred_degree, xi, zeta) ? Verdict3::True
                                                                     : Verdict3::False;
  };

  out.level = run_pred(true);
  bool all_exact_robust = true;
  for (const auto& v : vals) all_exact_robust = all_exact_robust && !v.deep && v.class_robust;
  if (all_exact_robust) {
    Verdict3 v = run_pred(false);
    out.cert = (v == Verdict3::True) ? CertV::robust_true() : CertV::f();
  }
  return out;
}

struct FullVerdict {
  Verdict3 level;
  CertV cert;
};

FullVerdict eval_node(EvalCtx& ctx, const FormulaPtr& f, Assignment& a);

FullVerdict eval_exists_vf(EvalCtx& ctx, const FormulaPtr& f, Assignment& a) {
  const int m = ctx.window->vf_precision;
  const Fq& fq = ctx.field->fq();
  uint64_t q = ctx.field->q();
  uint64_t count = 1;
  for (int i = 0; i < m; ++i) {
    count *= q;
    if (count > ctx.budget) fail(ErrorCode::WindowTooLarge, "VF window exceeds the budget");
  }
  if (ctx.budget < count) fail(ErrorCode::WindowTooLarge, "VF window exceeds the budget");
  ctx.budget -= count;

  Verdict3 level = Verdict3::False;
  CertV cert = CertV::f();
  std::vector<uint64_t> idx(size_t(m), 0);
  while (true) {
    detail::DigitMat rows;
    rows.resize(size_t(m));
    for (int i = 0; i < m; ++i) rows[size_t(i)] = fq.from_index(idx[size_t(i)]);
    Padic rep(ctx.field, m, std::move(rows));
    a.vf[f->bound_var] = AssignedValue::exact_rep(rep, m);
    FullVerdict body = eval_node(ctx, f->sub[0], a);
    level = level_or(level, body.level);
    CertV c = body.cert;
    c.ws.erase(f->bound_var);  // the witness ball is consumed by the quantifier
    cert = cert_or(cert, c);
    if (level == Verdict3::True && cert.v == Verdict3::True && cert.ws.empty()) break;
    int pos = 0;
    while (pos < m) {
      ++idx[size_t(pos)];
      if (idx[size_t(pos)] < q) break;
      idx[size_t(pos)] = 0;
      ++pos;
    }
    if (pos == m) break;
  }
  a.vf.erase(f->bound_var);
  return {level, cert};
}

FullVerdict eval_exists_rv(EvalCtx& ctx, const FormulaPtr& f, Assignment& a) {
  std::vector<RvElement> candidates;
  candidates.push_back(RvElement::zero(ctx.field, f->bound_depth));
  auto units = enumerate_unit_classes(ctx.field, f->bound_depth);
  for (long g = ctx.window->gamma_lo; g <= ctx.window->gamma_hi; ++g)
    for (const auto& u : units)
      candidates.push_back(RvElement::make(ctx.field, f->bound_depth, g, u));
  if (ctx.budget < candidates.size())
    fail(ErrorCode::WindowTooLarge, "RV window exceeds the budget");
  ctx.budget -= candidates.size();

  Verdict3 level = Verdict3::False;
  CertV cert = CertV::f();
  for (const auto& cand : candidates) {
    a.rv[f->bound_var] = cand;
    FullVerdict body = eval_node(ctx, f->sub[0], a);
    level = level_or(level, body.level);
    CertV c = body.cert;
    c.ws.erase(f->bound_var);
    cert = cert_or(cert, c);
    if (level == Verdict3::True && cert.v == Verdict3::True && cert.ws.empty()) break;
  }
  a.rv.erase(f->bound_var);
  // the RV window is a bounded slice of an infinite sort: an all-false sweep
  // does not refute the existential claim
  if (level == Verdict3::False) level = Verdict3::Unknown;
  if (cert.v == Verdict3::False) cert = CertV::u();
  return {level, cert};
}

FullVerdict eval_node(EvalCtx& ctx, const FormulaPtr& f, Assignment& a) {
  switch (f->kind) {
    case Formula::Kind::RvEq: {
      AtomVerdicts v = eval_rveq(ctx, f, a);
      return {v.level, v.cert};
    }
    case Formula::Kind::Divides: {
      AtomVerdicts v = eval_divides(ctx, f, a);
      return {v.level, v.cert};
    }
    case Formula::Kind::OplusRel: {
      AtomVerdicts v = eval_oplus(ctx, f, a);
      return {v.level, v.cert};
    }
    case Formula::Kind::Pred: {
      AtomVerdicts v = eval_pred(ctx, f, a);
      return {v.level, v.cert};
    }
    case Formula::Kind::And: {
      FullVerdict x = eval_node(ctx, f->sub[0], a);
      if (x.level == Verdict3::False && x.cert.v == Verdict3::False) return x;
      FullVerdict y = eval_node(ctx, f->sub[1], a);
      return {level_and(x.level, y.level), cert_and(x.cert, y.cert)};
    }
    case Formula::Kind::Or: {
      FullVerdict x = eval_node(ctx, f->sub[0], a);
      if (x.level == Verdict3::True && x.cert.v == Verdict3::True && x.cert.ws.empty()) return x;
      FullVerdict y = eval_node(ctx, f->sub[1], a);
      return {level_or(x.level, y.level), cert_or(x.cert, y.cert)};
    }
    case Formula::Kind::Not: {
      FullVerdict x = eval_node(ctx, f->sub[0], a);
      return {level_not(x.level), cert_not(x.cert)};
    }
    case Formula::Kind::ExistsVf:
      return eval_exists_vf(ctx, f, a);
    case Formula::Kind::ExistsRv:
      return eval_exists_rv(ctx, f, a);
  }
  fail(ErrorCode::Internal, "unhandled formula kind");
}

int working_precision(const FormulaPtr& f, const Field& field, const SearchWindow& w) {
  // widest unit class appearing anywhere in the formula
  int maxw = 1;
  std::vector<const Formula*> stack{f.get()};
  while (!stack.empty()) {
    const Formula* cur = stack.back();
    stack.pop_back();
    for (const auto& s : cur->sub) stack.push_back(s.get());
    std::vector<const RvTerm*> terms;
    for (const auto& t : cur->args) terms.push_back(t.get());
    while (!terms.empty()) {
      const RvTerm* t = terms.back();
      terms.pop_back();
      if (t->depth) maxw = std::max(maxw, RvElement::unit_width(field, t->depth));
      if (t->kind == RvTerm::Kind::Product)
        for (const auto& ft : t->factors) terms.push_back(ft.get());
      if (t->kind == RvTerm::Kind::Project) terms.push_back(t->inner.get());
    }
    if (cur->kind == Formula::Kind::Pred)
      maxw = std::max(maxw, RvElement::unit_width(field, cur->pred_depth * cur->pred_depth));
    if (cur->kind == Formula::Kind::ExistsRv)
      maxw = std::max(maxw, RvElement::unit_width(field, cur->bound_depth));
  }
  return std::min(w.vf_precision + maxw + 6, field.max_precision());
}

}  // namespace

EvalResult eval_formula(const FormulaPtr& f, const FieldPtr& field, const Assignment& a,
                        const SearchWindow& w) {
  EvalCtx ctx;
  ctx.field = field;
  ctx.window = &w;
  ctx.work_prec = working_precision(f, *field, w);
  ctx.budget = w.cap;
  ctx.const_base = field;
  Assignment mutable_a = a;
  FullVerdict v = eval_node(ctx, f, mutable_a);
  return {v.level, v.cert.v};
}

nlohmann::json SolutionSet::to_json() const {
  nlohmann::json j;
  j["window_cardinality"] = window_cardinality;
  nlohmann::json certified = nlohmann::json::array();
  nlohmann::json unknown = nlohmann::json::array();
  for (const auto& rec : solutions) {
    nlohmann::json entry;
    for (const auto& [name, av] : rec.assignment.vf) entry["vf"][name] = av.value.digits_json();
    for (const auto& [name, rv] : rec.assignment.rv) entry["rv"][name] = rv.to_json();
    (rec.certified ? certified : unknown).push_back(entry);
  }
  j["certified"] = certified;
  j["unknown_frontier"] = unknown;
  return j;
}

SolutionSet enumerate_solutions(const FormulaPtr& f, const FieldPtr& field, const SearchWindow& w,
                                int max_vf_vars) {
  return enumerate_solutions_fixed(f, field, w, Assignment{}, max_vf_vars);
}

SolutionSet enumerate_solutions_fixed(const FormulaPtr& f, const FieldPtr& field,
                                      const SearchWindow& w, const Assignment& fixed,
                                      int max_vf_vars) {
  FreeVars fv_all = free_variables(f);
  FreeVars fv;
  for (const auto& v : fv_all.vf)
    if (!fixed.vf.count(v)) fv.vf.push_back(v);
  for (const auto& [name, depth] : fv_all.rv)
    if (!fixed.rv.count(name)) fv.rv.emplace_back(name, depth);
  if (int(fv.vf.size()) > max_vf_vars)
    fail(ErrorCode::WindowTooLarge, "too many free VF variables");

  uint64_t q = field->q();
  uint64_t per_var = 1;
  for (int i = 0; i < w.vf_precision; ++i) {
    per_var *= q;
    if (per_var > w.cap) fail(ErrorCode::WindowTooLarge, "VF window exceeds the cap");
  }
  uint64_t total = 1;
  for (size_t i = 0; i < fv.vf.size(); ++i) {
    total *= per_var;
    if (total > w.cap) fail(ErrorCode::WindowTooLarge, "window cardinality exceeds the cap");
  }
  std::vector<std::vector<RvElement>> rv_candidates;
  for (const auto& [name, depth] : fv.rv) {
    std::vector<RvElement> cands;
    cands.push_back(RvElement::zero(field, depth));
    auto units = enumerate_unit_classes(field, depth);
    for (long g = w.gamma_lo; g <= w.gamma_hi; ++g)
      for (const auto& u : units) cands.push_back(RvElement::make(field, depth, g, u));
    total *= cands.size();
    if (total > w.cap) fail(ErrorCode::WindowTooLarge, "window cardinality exceeds the cap");
    rv_candidates.push_back(std::move(cands));
  }

  SolutionSet out;
  out.window_cardinality = total;
  const Fq& fq = field->fq();

  // one shared context keeps the polynomial bindings across the sweep
  EvalCtx ctx;
  ctx.field = field;
  ctx.window = &w;
  ctx.work_prec = working_precision(f, *field, w);
  ctx.const_base = field;

  std::vector<uint64_t> vf_idx(fv.vf.size(), 0);
  std::vector<size_t> rv_idx(fv.rv.size(), 0);

  auto make_assignment = [&]() {
    Assignment a = fixed;
    for (size_t i = 0; i < fv.vf.size(); ++i) {
      uint64_t code = vf_idx[i];
      detail::DigitMat rows;
      rows.resize(size_t(w.vf_precision));
      for (int d = 0; d < w.vf_precision; ++d) {
        rows[size_t(d)] = fq.from_index(code % q);
        code /= q;
      }
      a.vf[fv.vf[i]] = AssignedValue::exact_rep(Padic(field, w.vf_precision, std::move(rows)),
                                                w.vf_precision);
    }
    for (size_t i = 0; i < fv.rv.size(); ++i) a.rv[fv.rv[i].first] = rv_candidates[i][rv_idx[i]];
    return a;
  };

  while (true) {
    Assignment a = make_assignment();
    ctx.budget = w.cap;
    FullVerdict v = eval_node(ctx, f, a);
    EvalResult r{v.level, v.cert.v};
    if (r.level == Verdict3::True)
      out.solutions.push_back({a, r.cert == Verdict3::True});

    // odometer over vf then rv
    size_t pos = 0;
    bool done = false;
    while (true) {
      if (pos < fv.vf.size()) {
        if (++vf_idx[pos] < per_var) break;
        vf_idx[pos] = 0;
        ++pos;
      } else if (pos - fv.vf.size() < fv.rv.size()) {
        size_t rpos = pos - fv.vf.size();
        if (++rv_idx[rpos] < rv_candidates[rpos].size()) break;
        rv_idx[rpos] = 0;
        ++pos;
      } else {
        done = true;
        break;
      }
    }
    if (done) break;
  }
  return out;
}

nlohmann::json MonotonicityReport::to_json() const {
  nlohmann::json j;
  j["k_certified_true"] = k_certified_true;
  j["l_true_at_embedded"] = l_true_at_embedded;
  j["violations"] = violations;
  j["violation_examples"] = violation_examples;
  j["holds"] = (violations == 0);
  return j;
}

MonotonicityReport check_monotonicity(const FormulaPtr& f, const FieldPtr& base,
                                      const FieldPtr& ext, const SearchWindow& w) {
  if (auto reason = monotone_shape_violation(f))
    fail(ErrorCode::NotExistential, *reason);
  uint32_t e_rel = ext->rel_e_over(base);

  SolutionSet base_solutions = enumerate_solutions(f, base, w);
  SearchWindow lw = w;
  lw.vf_precision = w.vf_precision * int(e_rel);
  lw.gamma_lo = w.gamma_lo * long(e_rel);
  lw.gamma_hi = w.gamma_hi * long(e_rel);

  MonotonicityReport rep;
  for (const auto& rec : base_solutions.solutions) {
    if (!rec.certified) continue;
    ++rep.k_certified_true;
    Assignment embedded;
    for (const auto& [name, av] : rec.assignment.vf) {
      Padic img = av.value.embed_into(ext);
      embedded.vf[name] = AssignedValue::exact_rep(img, av.radius * int(e_rel));
    }
    for (const auto& [name, rv] : rec.assignment.rv) embedded.rv[name] = rv_embed(rv, ext);
    EvalResult r = eval_formula(f, ext, embedded, lw);
    if (r.cert == Verdict3::True) {
      ++rep.l_true_at_embedded;
    } else {
      ++rep.violations;
      if (rep.violation_examples.size() < 5) {
        std::ostringstream os;
        os << "{";
        for (const auto& [name, av] : rec.assignment.vf)
          os << name << "=" << av.value.to_string() << " ";
        for (const auto& [name, rv] : rec.assignment.rv) os << name << "=" << rv.to_string() << " ";
        os << "} -> " << verdict_name(r.cert);
        rep.violation_examples.push_back(os.str());
      }
    }
  }
  return rep;
}

}  // namespace rvlab

#include <cctype>
#include <functional>
#include <set>

#include "sol/gates.hpp"
#include "sol/script.hpp"

namespace sol {

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
  enum class Kind : std::uint8_t { Ident, Int, Real, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1, col = 1;
  std::int64_t ival = 0;
  double rval = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto peek = [&](std::size_t off) -> char { return i + off < src.size() ? src[i + off] : '\0'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && peek(1) == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      bool real = false;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.text = src.substr(i, j - i);
      try {
        if (real) {
          t.kind = Token::Kind::Real;
          t.rval = std::stod(t.text);
        } else {
          t.kind = Token::Kind::Int;
          t.ival = std::stoll(t.text);
        }
      } catch (const std::out_of_range&) {
        throw ParseError(line, col, "number '" + t.text + "' is out of range");
      }
      advance(j - i);
      out.push_back(t);
      continue;
    }
    static const char* const two[] = {"||", "->", "=>", "==", "!=", "<=", ">=", "><", "^+", "..", "/\\", "\\/"};
    std::string sym;
    if (c == '|' && peek(1) == '-') {
      const char after = peek(2);
      if (after == '\0' || std::isspace(static_cast<unsigned char>(after)) || after == '=') sym = "|-";
    }
    if (sym.empty())
      for (const char* s : two)
        if (c == s[0] && peek(1) == s[1]) {
          sym = s;
          break;
        }
    if (sym.empty()) {
      if (std::string("()[]{},;:.+-*/=<>|!&~_").find(c) == std::string::npos)
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      sym = std::string(1, c);
    }
    t.kind = Token::Kind::Sym;
    t.text = sym;
    advance(sym.size());
    out.push_back(t);
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------- parser

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"forall", "exists", "forallOp", "existsOp", "if",      "then",   "else",
                                       "fi",     "true",   "false",    "var",      "qubit",   "qvar",   "qreg",
                                       "opvar",  "let",    "def",      "library",  "range",   "set",    "assume",
                                       "assert", "entail", "eval",     "normalize", "sign",   "suite",  "norm",
                                       "tr",     "pure",   "mixed",    "unitary",  "obs",     "bell",   "Bool",
                                       "Int",    "C",      "Complex"};
  return k;
}

/// A parsed phrase before its role is known.
struct Node {
  enum class Kind : std::uint8_t { Expr, Op, CForm, SForm, Norm, Trace };
  Kind kind = Kind::Expr;
  Expr e;
  FormalOp op;
  Formula cf;
  SolFormula sf;
};

Node expr_node(Expr e) {
  Node n;
  n.kind = Node::Kind::Expr;
  n.e = std::move(e);
  return n;
}
Node op_node(FormalOp a, Node::Kind k = Node::Kind::Op) {
  Node n;
  n.kind = k;
  n.op = std::move(a);
  return n;
}
Node cf_node(Formula f) {
  Node n;
  n.kind = Node::Kind::CForm;
  n.cf = std::move(f);
  return n;
}
Node sf_node(SolFormula f) {
  Node n;
  n.kind = Node::Kind::SForm;
  n.sf = std::move(f);
  return n;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, Script& script) : toks_(std::move(toks)), s_(script) {}

  void script() {
    while (!at_end()) item();
  }

  FormalOp lone_operator() {
    const Token start = cur();
    FormalOp a = as_op(formula(), start);
    expect_end();
    return a;
  }

  SolFormula lone_formula() {
    const Token start = cur();
    SolFormula f = as_sf(formula(), start);
    expect_end();
    return f;
  }

 private:
  // -------------------------------------------------------------- token helpers

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t off = 1) const { return toks_[std::min(pos_ + off, toks_.size() - 1)]; }
  bool at_end() const { return cur().kind == Token::Kind::End; }
  bool is_sym(const std::string& s) const { return cur().kind == Token::Kind::Sym && cur().text == s; }
  bool is_word(const std::string& s) const { return cur().kind == Token::Kind::Ident && cur().text == s; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.col, msg); }
  [[noreturn]] void fail(const std::string& msg) const { fail(cur(), msg); }

  std::string describe(const Token& t) const {
    if (t.kind == Token::Kind::End) return "end of input";
    return "'" + t.text + "'";
  }

  Token next() {
    Token t = cur();
    if (!at_end()) ++pos_;
    return t;
  }

  bool accept(const std::string& sym) {
    if (!is_sym(sym)) return false;
    ++pos_;
    return true;
  }

  bool accept_word(const std::string& w) {
    if (!is_word(w)) return false;
    ++pos_;
    return true;
  }

  void expect(const std::string& sym) {
    if (!accept(sym)) fail("expected '" + sym + "', found " + describe(cur()));
  }

  void expect_word(const std::string& w) {
    if (!accept_word(w)) fail("expected '" + w + "', found " + describe(cur()));
  }

  void expect_end() {
    if (!at_end()) fail("unexpected " + describe(cur()));
  }

  std::string ident() {
    if (cur().kind != Token::Kind::Ident) fail("expected a name, found " + describe(cur()));
    return next().text;
  }

  /// Run `f`, turning type errors into parse errors at `where`.
  template <typename F>
  auto located(const Token& where, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }

  // -------------------------------------------------------------- names

  std::optional<VarType> classical_var(const std::string& n) const {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (auto f = it->find(n); f != it->end()) return f->second;
    if (auto f = s_.classical.find(n); f != s_.classical.end()) return f->second;
    return std::nullopt;
  }

  OpVarPtr operator_var(const std::string& n) const {
    for (auto it = bound_ops_.rbegin(); it != bound_ops_.rend(); ++it)
      if (auto f = it->find(n); f != it->end()) return f->second;
    if (auto f = s_.opvars.find(n); f != s_.opvars.end()) return f->second;
    return nullptr;
  }

  bool declared(const std::string& n) const {
    return s_.classical.count(n) || s_.quantum.count(n) || s_.opvars.count(n) || s_.lets.count(n) ||
           s_.callables.count(n);
  }

  void check_new_name(const Token& t, const std::string& n) const {
    if (keywords().count(n)) fail(t, "'" + n + "' is a reserved word");
    if (builtin_functions().count(n)) fail(t, "'" + n + "' is a built-in function");
    if (declared(n)) fail(t, "'" + n + "' is already declared");
  }

  // -------------------------------------------------------------- types

  BasicType basic_type() {
    const Token t = cur();
    const std::string n = ident();
    if (n == "Bool") return BasicType::Bool;
    if (n == "Int") return BasicType::Int;
    if (n == "C" || n == "Complex") return BasicType::Complex;
    fail(t, "unknown type '" + n + "'");
  }

  std::vector<BasicType> type_side() {
    std::vector<BasicType> out;
    if (accept("(")) {
      expect(")");
      return out;
    }
    out.push_back(basic_type());
    while (accept("*")) out.push_back(basic_type());
    return out;
  }

  VarType var_type() {
    const std::vector<BasicType> first = type_side();
    if (accept("->")) {
      VarType t;
      t.args = first;
      t.value = basic_type();
      if (t.args.empty()) fail("an array type needs at least one index type");
      return t;
    }
    if (first.size() != 1) fail("expected '->' after a product type");
    return VarType{{}, first[0]};
  }

  QuantumType quantum_type() {
    QuantumType t;
    t.dom = type_side();
    expect("->");
    t.cod = type_side();
    return t;
  }

  // -------------------------------------------------------------- conversions

  Expr as_expr(const Node& n, const Token& where) const {
    if (n.kind != Node::Kind::Expr) fail(where, "expected a classical expression");
    return n.e;
  }

  FormalOp as_op(const Node& n, const Token& where) const {
    if (n.kind == Node::Kind::Op) return n.op;
    if (n.kind == Node::Kind::Expr) {
      if (!is_numeric(n.e.type())) fail(where, "a Bool expression cannot be used as an operator");
      return FormalOp::scalar(n.e);
    }
    fail(where, "expected an operator term");
  }

  Formula as_cf(const Node& n, const Token& where) const {
    if (n.kind == Node::Kind::CForm) return n.cf;
    if (n.kind == Node::Kind::Expr && n.e.type() == BasicType::Bool) return Formula::atom(n.e);
    fail(where, "expected a classical formula");
  }

  SolFormula as_sf(const Node& n, const Token& where) const {
    if (n.kind == Node::Kind::SForm) return n.sf;
    if (n.kind == Node::Kind::CForm || (n.kind == Node::Kind::Expr && n.e.type() == BasicType::Bool))
      return SolFormula::classical(as_cf(n, where));
    fail(where, "expected a formula");
  }

  bool classical_formula_like(const Node& n) const {
    return n.kind == Node::Kind::CForm || (n.kind == Node::Kind::Expr && n.e.type() == BasicType::Bool);
  }

  Value constant_value(const Node& n, const Token& where) const {
    const Expr e = fold_constants(as_expr(n, where), Structure{});
    if (const auto* c = std::get_if<ConstExpr>(&e.node().v)) return c->value;
    fail(where, "expected a constant");
  }

  // -------------------------------------------------------------- formulas and terms

  Node formula() {
    if (is_word("forall") || is_word("exists") || is_word("forallOp") || is_word("existsOp")) return quantifier();
    const Token start = cur();
    Node lhs = disjunction();
    if (is_sym("->")) {
      const Token op = next();
      const Token rstart = cur();
      Node rhs = formula();
      if (classical_formula_like(lhs) && classical_formula_like(rhs))
        return cf_node(Formula::implies(as_cf(lhs, start), as_cf(rhs, rstart)));
      return sf_node(SolFormula::implies(as_sf(lhs, start), as_sf(rhs, rstart)));
    }
    return lhs;
  }

  Node quantifier() {
    const std::string q = next().text;
    const Token name_tok = cur();
    const std::string name = ident();
    expect(":");
    if (q == "forallOp" || q == "existsOp") {
      const QuantumType t = quantum_type();
      expect(".");
      auto decl = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{name, t});
      bound_ops_.push_back({{name, decl}});
      const Token bstart = cur();
      Node body = formula();
      bound_ops_.pop_back();
      const auto kind = q == "forallOp" ? SolFormula::Quantifier::ForAll : SolFormula::Quantifier::Exists;
      return sf_node(SolFormula::quant_op(kind, decl, as_sf(body, bstart)));
    }
    const BasicType t = basic_type();
    expect(".");
    bound_.push_back({{name, VarType{{}, t}}});
    const Token bstart = cur();
    Node body = formula();
    bound_.pop_back();
    const bool all = q == "forall";
    if (classical_formula_like(body))
      return cf_node(Formula::quant(all ? Formula::Quantifier::ForAll : Formula::Quantifier::Exists, name, t,
                                    as_cf(body, bstart)));
    return located(name_tok, [&] {
      return sf_node(SolFormula::quant(all ? SolFormula::Quantifier::ForAll : SolFormula::Quantifier::Exists, name, t,
                                       as_sf(body, bstart)));
    });
  }

  Node disjunction() {
    const Token start = cur();
    Node lhs = conjunction();
    while (is_sym("\\/") || is_sym("||")) {
      const bool classical = next().text == "\\/";
      const Token rstart = cur();
      Node rhs = conjunction();
      if (classical)
        lhs = cf_node(Formula::disj(as_cf(lhs, start), as_cf(rhs, rstart)));
      else
        lhs = sf_node(SolFormula::disj(as_sf(lhs, start), as_sf(rhs, rstart)));
    }
    return lhs;
  }

  Node conjunction() {
    const Token start = cur();
    Node lhs = negation();
    while (is_sym("/\\") || is_sym("&")) {
      const bool classical = next().text == "/\\";
      const Token rstart = cur();
      Node rhs = negation();
      if (classical)
        lhs = cf_node(Formula::conj(as_cf(lhs, start), as_cf(rhs, rstart)));
      else
        lhs = sf_node(SolFormula::conj(as_sf(lhs, start), as_sf(rhs, rstart)));
    }
    return lhs;
  }

  Node negation() {
    if (is_word("forall") || is_word("exists") || is_word("forallOp") || is_word("existsOp")) return quantifier();
    if (accept("~")) {
      const Token start = cur();
      return cf_node(Formula::negation(as_cf(negation(), start)));
    }
    if (accept("!")) {
      const Token start = cur();
      return sf_node(SolFormula::negation(as_sf(negation(), start)));
    }
    return relation();
  }

  Node relation() {
    const Token start = cur();
    Node lhs = sum();
    if (cur().kind != Token::Kind::Sym) return lhs;
    const std::string op = cur().text;
    static const std::set<std::string> rels{"=", "!=", "<", "<=", ">", ">=", "=="};
    if (!rels.count(op)) return lhs;
    const Token op_tok = cur();
    if (op == "<" && lhs.kind == Node::Kind::Op)
      fail(op_tok, "a bra cannot follow an operator term without '*'");
    next();
    const Token rstart = cur();
    Node rhs = sum();

    if (lhs.kind == Node::Kind::Norm || lhs.kind == Node::Kind::Trace) {
      CmpRel rel;
      if (op == "=")
        rel = CmpRel::Eq;
      else if (op == "<")
        rel = CmpRel::Lt;
      else if (op == ">")
        rel = CmpRel::Gt;
      else
        fail(op_tok, "norm and trace compare with '=', '<' or '>'");
      const Value v = constant_value(rhs, rstart);
      return located(op_tok, [&] {
        if (lhs.kind == Node::Kind::Norm) {
          const Complex c = as_complex(v);
          if (c.imag() != 0.0) throw TypeError("a norm is compared with a real number");
          return sf_node(SolFormula::norm(lhs.op, rel, c.real()));
        }
        return sf_node(SolFormula::trace(lhs.op, rel, as_complex(v)));
      });
    }
    if (op == "==")
      return located(op_tok, [&] { return sf_node(SolFormula::equal(as_op(lhs, start), as_op(rhs, rstart))); });
    if (lhs.kind == Node::Kind::Op || rhs.kind == Node::Kind::Op) {
      if (op != "<=") fail(op_tok, "operators compare with '==' or '<='");
      return located(op_tok, [&] { return sf_node(SolFormula::leq(as_op(lhs, start), as_op(rhs, rstart))); });
    }
    const Expr a = as_expr(lhs, start), b = as_expr(rhs, rstart);
    return located(op_tok, [&] { return expr_node(Expr::app(op, {a, b})); });
  }

  Node sum() {
    const Token start = cur();
    Node lhs = tensor_level();
    while (is_sym("+") || is_sym("-")) {
      const Token op_tok = next();
      const Token rstart = cur();
      Node rhs = tensor_level();
      lhs = located(op_tok, [&] {
        if (lhs.kind == Node::Kind::Expr && rhs.kind == Node::Kind::Expr) return expr_node(Expr::app(op_tok.text, {lhs.e, rhs.e}));
        FormalOp b = as_op(rhs, rstart);
        if (op_tok.text == "-") b = FormalOp::scale(Expr::integer(-1), b);
        return op_node(FormalOp::sum(as_op(lhs, start), b));
      });
    }
    return lhs;
  }

  Node tensor_level() {
    const Token start = cur();
    Node lhs = product();
    while (is_sym("><")) {
      const Token op_tok = next();
      const Token rstart = cur();
      Node rhs = product();
      lhs = located(op_tok, [&] { return op_node(FormalOp::tensor(as_op(lhs, start), as_op(rhs, rstart))); });
    }
    return lhs;
  }

  Node product() {
    const Token start = cur();
    Node lhs = unary();
    while (is_sym("*") || is_sym("/")) {
      const Token op_tok = next();
      const Token rstart = cur();
      Node rhs = unary();
      lhs = located(op_tok, [&] {
        if (lhs.kind == Node::Kind::Expr && rhs.kind == Node::Kind::Expr) return expr_node(Expr::app(op_tok.text, {lhs.e, rhs.e}));
        if (op_tok.text == "/") fail(op_tok, "'/' applies to classical expressions only");
        return op_node(FormalOp::product(as_op(lhs, start), as_op(rhs, rstart)));
      });
    }
    return lhs;
  }

  Node unary() {
    const Token start = cur();
    if (is_sym("-")) {
      const Token minus = next();
      if (cur().kind == Token::Kind::Int) {
        const Token t = next();
        if (t.ival == 0) return expr_node(Expr::integer(0));
        return scale_tail(postfix_tail(expr_node(Expr::integer(-t.ival))), start);
      }
      if (cur().kind == Token::Kind::Real) {
        const Token t = next();
        return scale_tail(postfix_tail(expr_node(Expr::complex(-t.rval))), start);
      }
      const Token rstart = cur();
      Node inner = unary();
      return located(minus, [&] {
        if (inner.kind == Node::Kind::Expr) return expr_node(Expr::app("neg", {inner.e}));
        return op_node(FormalOp::scale(Expr::integer(-1), as_op(inner, rstart)));
      });
    }
    return scale_tail(postfix_tail(primary()), start);
  }

  Node scale_tail(Node coeff, const Token& start) {
    if (!is_sym(".")) return coeff;
    const Token dot = next();
    const Token rstart = cur();
    Node rhs = unary();
    return located(dot, [&] { return op_node(FormalOp::scale(as_expr(coeff, start), as_op(rhs, rstart))); });
  }

  Node postfix_tail(Node n) {
    while (is_sym("^+")) {
      const Token t = next();
      n = op_node(FormalOp::adjoint(as_op(n, t)));
    }
    return n;
  }

  QuantumRef reg() {
    const Token t = cur();
    const std::string n = ident();
    const auto it = s_.quantum.find(n);
    if (it == s_.quantum.end()) fail(t, "'" + n + "' is not a quantum variable");
    std::vector<Expr> idx;
    if (it->second->is_array()) {
      expect("[");
      idx = expr_list("]");
    }
    return located(t, [&] { return QuantumRef(it->second, idx); });
  }

  RegisterString reg_list(const std::set<std::string>& stop) {
    RegisterString rs;
    if (cur().kind == Token::Kind::Sym && stop.count(cur().text)) return rs;
    rs.push_back(reg());
    while (accept(",")) rs.push_back(reg());
    return rs;
  }

  /// `[regs]` (same registers on both sides) or `[dom -> cod]`.
  Signature signature() {
    expect("[");
    Signature sig;
    sig.dom = reg_list({"->", "]"});
    if (accept("->")) {
      sig.cod = reg_list({"]"});
    } else {
      sig.cod = sig.dom;
    }
    expect("]");
    return sig;
  }

  std::vector<Expr> expr_list(const std::string& close) {
    std::vector<Expr> out;
    if (accept(close)) return out;
    do {
      const Token t = cur();
      out.push_back(as_expr(formula(), t));
    } while (accept(","));
    expect(close);
    return out;
  }

  Node label_ket() {
    const Token t = next();  // '|'
    const Token lstart = cur();
    const Expr label = as_expr(sum(), lstart);
    expect(">");
    expect("_");
    const QuantumRef r = reg();
    return located(t, [&] { return op_node(FormalOp::ket(label, r)); });
  }

  Node label_bra() {
    const Token t = next();  // '<'
    const Token lstart = cur();
    const Expr label = as_expr(sum(), lstart);
    expect("|");
    expect("_");
    const QuantumRef r = reg();
    return located(t, [&] { return op_node(FormalOp::bra(label, r)); });
  }

  Node primary() {
    const Token t = cur();
    switch (t.kind) {
      case Token::Kind::Int:
        next();
        return expr_node(Expr::integer(t.ival));
      case Token::Kind::Real:
        next();
        return expr_node(Expr::complex(t.rval));
      case Token::Kind::End:
        fail("unexpected end of input");
      case Token::Kind::Sym:
        return symbol_primary();
      case Token::Kind::Ident:
        return word_primary();
    }
    fail("unexpected " + describe(t));
  }

  Node symbol_primary() {
    const Token t = cur();
    if (accept("(")) {
      Node n = formula();
      expect(")");
      return n;
    }
    if (accept("{")) {
      const Token s = cur();
      Node n = formula();
      expect("}");
      return sf_node(SolFormula::classical(as_cf(n, s)));
    }
    if (accept("[")) {
      const Token s = cur();
      Node n = formula();
      expect("]");
      const Expr c = as_expr(n, s);
      return located(s, [&] { return op_node(FormalOp::scalar(c)); });
    }
    if (is_sym("|")) return label_ket();
    if (is_sym("<")) return label_bra();
    fail(t, "unexpected " + describe(t));
  }

  Node word_primary() {
    const Token t = cur();
    const std::string w = t.text;
    if (w == "true" || w == "false") {
      next();
      return expr_node(Expr::boolean(w == "true"));
    }
    if (w == "if") {
      next();
      const Token g = cur();
      const Expr guard = as_expr(formula(), g);
      expect_word("then");
      const Token a = cur();
      const Expr then_e = as_expr(formula(), a);
      expect_word("else");
      const Token b = cur();
      const Expr else_e = as_expr(formula(), b);
      expect_word("fi");
      return located(t, [&] { return expr_node(Expr::cond(guard, then_e, else_e)); });
    }
    if (w == "norm" || w == "tr") {
      next();
      expect("(");
      const Token s = cur();
      FormalOp a = as_op(formula(), s);
      expect(")");
      return op_node(a, w == "norm" ? Node::Kind::Norm : Node::Kind::Trace);
    }
    if (w == "pure" || w == "mixed" || w == "unitary" || w == "obs") {
      next();
      const PredicateKind k = w == "pure"      ? PredicateKind::PureState
                              : w == "mixed"   ? PredicateKind::MixedState
                              : w == "unitary" ? PredicateKind::Unitary
                                               : PredicateKind::Observable;
      expect("(");
      const Token s = cur();
      FormalOp a = as_op(formula(), s);
      expect(")");
      std::optional<RegisterString> regs;
      if (accept(":")) {
        if (accept("(")) {
          regs = reg_list({")"});
          expect(")");
        } else {
          regs = RegisterString{reg()};
        }
      }
      return located(t, [&] { return sf_node(SolFormula::predicate(k, a, regs)); });
    }
    if (w == "bell") {
      next();
      expect("(");
      const std::vector<Expr> args = expr_list(")");
      if (args.size() != 2) fail(t, "bell takes two Bool parameters");
      const Signature sig = signature();
      if (sig.dom.size() != 2 || sig.dom != sig.cod) fail(t, "bell acts on two registers");
      return located(t, [&] {
        if (args[0].type() != BasicType::Bool || args[1].type() != BasicType::Bool)
          throw TypeError("bell parameters must be Bool");
        return op_node(bell(args[0], args[1], sig.dom[0], sig.dom[1]));
      });
    }
    if (keywords().count(w)) fail(t, "unexpected '" + w + "'");
    next();

    if (auto vt = classical_var(w)) {
      if (vt->is_array()) {
        expect("[");
        const std::vector<Expr> idx = expr_list("]");
        return located(t, [&] { return expr_node(Expr::subscript(w, *vt, idx)); });
      }
      return expr_node(Expr::var(w, vt->value));
    }
    if (OpVarPtr x = operator_var(w)) {
      const Signature sig = signature();
      return located(t, [&] {
        if (sig.type() != x->type)
          throw TypeError("operator variable '" + w + "' of type " + to_string(x->type) + " applied to " +
                          to_string(sig.type()));
        return op_node(FormalOp::var(x, sig));
      });
    }
    if (auto it = s_.lets.find(w); it != s_.lets.end()) return op_node(it->second);
    if (auto it = s_.callables.find(w); it != s_.callables.end()) {
      expect("(");
      const std::vector<Expr> args = expr_list(")");
      const auto def = it->second;
      return located(t, [&] {
        if (args.size() != def->params.size())
          throw TypeError("'" + w + "' expects " + std::to_string(def->params.size()) + " argument(s)");
        for (std::size_t i = 0; i < args.size(); ++i)
          if (args[i].type() != def->params[i].second)
            throw TypeError("argument " + std::to_string(i + 1) + " of '" + w + "' must have type " +
                            to_string(def->params[i].second));
        return op_node(FormalOp::call(def, args));
      });
    }
    if (s_.quantum.count(w)) fail(t, "quantum variable '" + w + "' can only appear as a register");
    if (builtin_functions().count(w)) {
      expect("(");
      const std::vector<Expr> args = expr_list(")");
      // complex(re, im) of two literals is a constant
      if (w == "complex" && args.size() == 2) {
        const auto* re = std::get_if<ConstExpr>(&args[0].node().v);
        const auto* im = std::get_if<ConstExpr>(&args[1].node().v);
        if (re && im && type_of(re->value) == BasicType::Complex && type_of(im->value) == BasicType::Complex)
          return expr_node(Expr::complex(Complex(as_complex(re->value).real(), as_complex(im->value).real())));
      }
      return located(t, [&] { return expr_node(Expr::app(w, args)); });
    }
    OpConstPtr gate;
    for (const auto& g : builtin_gates())
      if (g.decl->name == w) gate = g.decl;
    if (gate) {
      std::vector<Expr> params;
      if (accept("(")) params = expr_list(")");
      const Signature sig = signature();
      return located(t, [&] { return op_node(FormalOp::constant(gate, params, sig)); });
    }
    fail(t, "unknown name '" + w + "'");
  }

  // -------------------------------------------------------------- items

  ScriptItem start_item(ScriptItem::Kind k, const Token& t) {
    ScriptItem it;
    it.kind = k;
    it.line = t.line;
    return it;
  }

  void item() {
    const Token t = cur();
    if (t.kind != Token::Kind::Ident) fail(t, "expected a declaration or directive, found " + describe(t));
    const std::string w = t.text;
    next();
    using K = ScriptItem::Kind;
    if (w == "var") {
      std::vector<std::pair<Token, std::string>> names;
      do {
        const Token nt = cur();
        names.emplace_back(nt, ident());
      } while (accept(","));
      expect(":");
      const VarType vt = var_type();
      expect(";");
      for (const auto& [nt, n] : names) {
        check_new_name(nt, n);
        s_.classical[n] = vt;
        ScriptItem it = start_item(K::Var, nt);
        it.name = n;
        it.type = vt;
        s_.items.push_back(it);
      }
      return;
    }
    if (w == "qubit" || w == "qvar" || w == "qreg") {
      std::vector<std::pair<Token, std::string>> names;
      do {
        const Token nt = cur();
        names.emplace_back(nt, ident());
      } while (accept(","));
      VarType vt{{}, BasicType::Bool};
      if (w != "qubit") {
        expect(":");
        vt = var_type();
        if (w == "qreg" && !vt.is_array()) fail(t, "qreg needs an array type");
        if (w == "qvar" && vt.is_array()) fail(t, "qvar takes a basic type; use qreg for arrays");
        if (vt.value == BasicType::Complex) fail(t, "quantum variables need an enumerable value type");
        for (BasicType a : vt.args)
          if (a == BasicType::Complex) fail(t, "quantum array indices must be enumerable");
      }
      expect(";");
      for (const auto& [nt, n] : names) {
        check_new_name(nt, n);
        s_.quantum[n] = make_qvar(n, vt);
        if (vt.value == BasicType::Int) s_.int_quantum_vars.push_back(n);
        ScriptItem it = start_item(K::Quantum, nt);
        it.name = n;
        it.type = vt;
        s_.items.push_back(it);
      }
      return;
    }
    if (w == "opvar") {
      std::vector<std::pair<Token, std::string>> names;
      do {
        const Token nt = cur();
        names.emplace_back(nt, ident());
      } while (accept(","));
      expect(":");
      const QuantumType qt = quantum_type();
      expect(";");
      for (const auto& [nt, n] : names) {
        check_new_name(nt, n);
        s_.opvars[n] = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{n, qt});
        ScriptItem it = start_item(K::OpVar, nt);
        it.name = n;
        it.op_type = qt;
        s_.items.push_back(it);
      }
      return;
    }
    if (w == "let") {
      const Token nt = cur();
      const std::string n = ident();
      check_new_name(nt, n);
      expect("=");
      const Token s = cur();
      FormalOp a = as_op(formula(), s);
      expect(";");
      s_.lets[n] = a;
      ScriptItem it = start_item(K::Let, t);
      it.name = n;
      it.op = a;
      s_.items.push_back(it);
      return;
    }
    if (w == "def") return definition(t);
    if (w == "library") {
      const Token qt = cur();
      const std::string qn = ident();
      std::string bits = "j";
      if (accept(",")) bits = ident();
      expect(";");
      const auto qit = s_.quantum.find(qn);
      if (qit == s_.quantum.end()) fail(qt, "'" + qn + "' is not a quantum variable");
      if (auto existing = s_.classical.find(bits); existing != s_.classical.end()) {
        if (existing->second != VarType{{BasicType::Int}, BasicType::Bool})
          fail(qt, "'" + bits + "' must be a bit array of type Int -> Bool");
      } else {
        check_new_name(qt, bits);
        s_.classical[bits] = VarType{{BasicType::Int}, BasicType::Bool};
      }
      StateLibrary lib = located(qt, [&] { return make_state_library(qit->second, bits); });
      for (const auto& d : lib.defs()) {
        check_new_name(qt, d->name);
        s_.callables[d->name] = d;
        s_.defs.push_back(d);
      }
      s_.libraries.push_back(lib);
      ScriptItem it = start_item(K::Library, t);
      it.name = qn;
      it.bits = bits;
      s_.items.push_back(it);
      return;
    }
    if (w == "range") {
      const Token nt = cur();
      const std::string n = ident();
      const auto vt = classical_var(n);
      if (!vt || vt->is_array() || vt->value != BasicType::Int) fail(nt, "'" + n + "' is not an Int variable");
      ScriptItem it = start_item(K::Range, t);
      it.name = n;
      it.range.lo = signed_int();
      expect("..");
      it.range.hi = signed_int();
      expect(";");
      if (it.range.lo > it.range.hi) fail(nt, "empty range");
      s_.items.push_back(it);
      return;
    }
    if (w == "set") {
      const Token nt = cur();
      const std::string n = ident();
      const auto vt = classical_var(n);
      if (!vt) fail(nt, "'" + n + "' is not a classical variable");
      ScriptItem it = start_item(K::Set, t);
      it.name = n;
      it.type = *vt;
      if (vt->is_array()) {
        expect("[");
        it.indices = expr_list("]");
        if (it.indices.size() != vt->args.size()) fail(nt, "wrong number of indices for '" + n + "'");
      }
      expect("=");
      const Token vtok = cur();
      it.value = as_expr(formula(), vtok);
      expect(";");
      s_.items.push_back(it);
      return;
    }
    if (w == "assume") {
      ScriptItem it = start_item(K::Assume, t);
      const Token s = cur();
      it.sigma.push_back(as_cf(formula(), s));
      expect(";");
      s_.items.push_back(it);
      return;
    }
    if (w == "assert") {
      ScriptItem it = start_item(K::Assert, t);
      const Token s = cur();
      it.sol = as_sf(formula(), s);
      expect(";");
      s_.items.push_back(it);
      return;
    }
    if (w == "entail") {
      ScriptItem it = start_item(K::Entail, t);
      if (!is_sym("|-")) {
        do {
          const Token s = cur();
          it.sigma.push_back(as_cf(formula(), s));
        } while (accept(","));
      }
      expect("|-");
      if (!is_sym("=>")) {
        do {
          const Token s = cur();
          it.gamma.push_back(as_sf(formula(), s));
        } while (accept(","));
      }
      expect("=>");
      const Token s = cur();
      it.sol = as_sf(formula(), s);
      expect(";");
      s_.items.push_back(it);
      return;
    }
    if (w == "eval") {
      ScriptItem it = start_item(K::Eval, t);
      const Token s = cur();
      const Node n = formula();
      if (n.kind == Node::Kind::Op || (n.kind == Node::Kind::Expr && is_numeric(n.e.type())))
        it.op = as_op(n, s);
      else
        it.sol = as_sf(n, s);
      expect(";");
      s_.items.push_back(it);
      return;
    }
    if (w == "normalize" || w == "sign") {
      ScriptItem it = start_item(w == "sign" ? K::Sign : K::Normalize, t);
      const Token s = cur();
      it.op = as_op(formula(), s);
      expect(";");
      s_.items.push_back(it);
      return;
    }
    if (w == "suite") {
      ScriptItem it = start_item(K::Suite, t);
      const Token nt = cur();
      it.name = ident();
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), it.name) == names.end()) fail(nt, "unknown suite '" + it.name + "'");
      expect(";");
      s_.items.push_back(it);
      return;
    }
    fail(t, "unknown directive '" + w + "'");
  }

  std::int64_t signed_int() {
    const bool neg = accept("-");
    if (cur().kind != Token::Kind::Int) fail("expected an integer");
    const std::int64_t v = next().ival;
    return neg ? -v : v;
  }

  void definition(const Token& t) {
    const Token nt = cur();
    const std::string n = ident();
    check_new_name(nt, n);
    auto def = std::make_shared<RecursiveDef>();
    def->name = n;
    expect("(");
    std::map<std::string, VarType> params;
    if (!accept(")")) {
      do {
        const Token pt = cur();
        const std::string p = ident();
        expect(":");
        const BasicType bt = basic_type();
        if (params.count(p)) fail(pt, "duplicate parameter '" + p + "'");
        params[p] = VarType{{}, bt};
        def->params.emplace_back(p, bt);
      } while (accept(","));
      expect(")");
    }
    // the name is visible in its own cases
    s_.callables[n] = def;
    s_.defs.push_back(def);
    bound_.push_back(params);
    expect("{");
    while (!accept("}")) {
      const Token g = cur();
      const Formula guard = as_cf(formula(), g);
      for (const auto& [v, vt] : free_vars(guard))
        if (!params.count(v)) fail(g, "guard mentions '" + v + "', which is not a parameter");
      expect("=>");
      const Token b = cur();
      const FormalOp body = as_op(formula(), b);
      expect(";");
      def->cases.push_back({guard, body, {}});
    }
    bound_.pop_back();
    if (def->cases.empty()) fail(t, "definition '" + n + "' has no cases");
    ScriptItem it = start_item(ScriptItem::Kind::Def, t);
    it.name = n;
    it.def = def;
    s_.items.push_back(it);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Script& s_;
  std::vector<std::map<std::string, VarType>> bound_;
  std::vector<std::map<std::string, OpVarPtr>> bound_ops_;
};

bool same_def(const std::shared_ptr<const RecursiveDef>& a, const std::shared_ptr<const RecursiveDef>& b) {
  if (!a || !b) return a == b;
  if (a->name != b->name || a->params != b->params || a->cases.size() != b->cases.size()) return false;
  for (std::size_t i = 0; i < a->cases.size(); ++i) {
    const auto& x = a->cases[i];
    const auto& y = b->cases[i];
    if (!(x.guard == y.guard) || x.body.has_value() != y.body.has_value()) return false;
    if (x.body && !(*x.body == *y.body)) return false;
  }
  return true;
}

template <typename T>
bool same_optional(const std::optional<T>& a, const std::optional<T>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

std::string join_sol(const std::vector<SolFormula>& fs) {
  std::string s;
  for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? ", " : "") + to_string(fs[i]);
  return s;
}

}  // namespace

bool ScriptItem::is_directive() const {
  switch (kind) {
    case Kind::Assume:
    case Kind::Assert:
    case Kind::Entail:
    case Kind::Eval:
    case Kind::Normalize:
    case Kind::Sign:
    case Kind::Suite:
      return true;
    default:
      return false;
  }
}

bool operator==(const ScriptItem& a, const ScriptItem& b) {
  if (a.kind != b.kind || a.name != b.name || a.bits != b.bits) return false;
  if (!(a.type == b.type) || !(a.op_type == b.op_type) || !(a.range == b.range)) return false;
  if (!same_optional(a.op, b.op) || !same_optional(a.sol, b.sol) || !same_optional(a.value, b.value)) return false;
  if (a.sigma.size() != b.sigma.size() || a.gamma.size() != b.gamma.size() || a.indices != b.indices) return false;
  for (std::size_t i = 0; i < a.sigma.size(); ++i)
    if (!(a.sigma[i] == b.sigma[i])) return false;
  for (std::size_t i = 0; i < a.gamma.size(); ++i)
    if (!(a.gamma[i] == b.gamma[i])) return false;
  return same_def(a.def, b.def);
}

std::string to_string(ScriptItem::Kind k) {
  using K = ScriptItem::Kind;
  switch (k) {
    case K::Var:
      return "var";
    case K::Quantum:
      return "quantum";
    case K::OpVar:
      return "opvar";
    case K::Let:
      return "let";
    case K::Def:
      return "def";
    case K::Library:
      return "library";
    case K::Range:
      return "range";
    case K::Set:
      return "set";
    case K::Assume:
      return "assume";
    case K::Assert:
      return "assert";
    case K::Entail:
      return "entail";
    case K::Eval:
      return "eval";
    case K::Normalize:
      return "normalize";
    case K::Sign:
      return "sign";
    case K::Suite:
      return "suite";
  }
  return "?";
}

Script parse_script(const std::string& text) {
  Script s;
  Parser(lex(text), s).script();
  return s;
}

FormalOp parse_operator(const Script& context, const std::string& text) {
  Script scratch = context;
  return Parser(lex(text), scratch).lone_operator();
}

SolFormula parse_formula(const Script& context, const std::string& text) {
  Script scratch = context;
  return Parser(lex(text), scratch).lone_formula();
}

std::string print_item(const ScriptItem& it) {
  using K = ScriptItem::Kind;
  switch (it.kind) {
    case K::Var:
      return "var " + it.name + " : " + to_string(it.type) + ";";
    case K::Quantum:
      if (!it.type.is_array() && it.type.value == BasicType::Bool) return "qubit " + it.name + ";";
      return std::string(it.type.is_array() ? "qreg " : "qvar ") + it.name + " : " + to_string(it.type) + ";";
    case K::OpVar:
      return "opvar " + it.name + " : " + to_string(it.op_type) + ";";
    case K::Let:
      return "let " + it.name + " = " + to_string(*it.op) + ";";
    case K::Def: {
      std::string s = "def " + it.name + "(";
      for (std::size_t i = 0; i < it.def->params.size(); ++i)
        s += (i ? ", " : "") + it.def->params[i].first + ":" + to_string(it.def->params[i].second);
      s += ") {\n";
      for (const auto& c : it.def->cases) s += "  " + to_string(c.guard) + " => " + to_string(*c.body) + ";\n";
      return s + "}";
    }
    case K::Library:
      return "library " + it.name + ", " + it.bits + ";";
    case K::Range:
      return "range " + it.name + " " + std::to_string(it.range.lo) + ".." + std::to_string(it.range.hi) + ";";
    case K::Set: {
      std::string target = it.name;
      if (!it.indices.empty()) {
        target += "[";
        for (std::size_t i = 0; i < it.indices.size(); ++i) target += (i ? ", " : "") + to_string(it.indices[i]);
        target += "]";
      }
      return "set " + target + " = " + to_string(*it.value) + ";";
    }
    case K::Assume:
      return "assume " + to_string(it.sigma.at(0)) + ";";
    case K::Assert:
      return "assert " + to_string(*it.sol) + ";";
    case K::Entail: {
      std::string s = "entail ";
      for (std::size_t i = 0; i < it.sigma.size(); ++i) s += (i ? ", " : "") + to_string(it.sigma[i]);
      s += it.sigma.empty() ? "|- " : " |- ";
      s += join_sol(it.gamma);
      s += it.gamma.empty() ? "=> " : " => ";
      return s + to_string(*it.sol) + ";";
    }
    case K::Eval:
      return "eval " + (it.op ? to_string(*it.op) : to_string(*it.sol)) + ";";
    case K::Normalize:
      return "normalize " + to_string(*it.op) + ";";
    case K::Sign:
      return "sign " + to_string(*it.op) + ";";
    case K::Suite:
      return "suite " + it.name + ";";
  }
  return "";
}

std::string print_script(const Script& s) {
  std::string out;
  for (const auto& it : s.items) out += print_item(it) + "\n";
  return out;
}

}  // namespace sol

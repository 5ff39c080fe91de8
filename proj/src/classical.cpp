#include "sol/classical.hpp"

#include <cmath>

namespace sol {

std::string to_string(const VarType& t) {
  if (!t.is_array()) return to_string(t.value);
  std::string s;
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += "*";
    s += to_string(t.args[i]);
  }
  return s + " -> " + to_string(t.value);
}

// ---------------------------------------------------------------- builtins

namespace {

enum class Sig : std::uint8_t { Arith, Divide, Negate, IntBinary, Equality, Order, BoolBinary, BoolUnary, ComplexUnary, MakeComplex };

const std::map<std::string, Sig>& builtin_table() {
  static const std::map<std::string, Sig> table = {
      {"+", Sig::Arith},          {"-", Sig::Arith},         {"*", Sig::Arith},
      {"/", Sig::Divide},         {"neg", Sig::Negate},      {"mod", Sig::IntBinary},
      {"=", Sig::Equality},       {"!=", Sig::Equality},     {"<", Sig::Order},
      {"<=", Sig::Order},         {">", Sig::Order},         {">=", Sig::Order},
      {"and", Sig::BoolBinary},   {"or", Sig::BoolBinary},   {"xor", Sig::BoolBinary},
      {"not", Sig::BoolUnary},    {"conj", Sig::ComplexUnary}, {"abs", Sig::ComplexUnary},
      {"exp", Sig::ComplexUnary}, {"cos", Sig::ComplexUnary}, {"sin", Sig::ComplexUnary},
      {"sqrt", Sig::ComplexUnary}, {"re", Sig::ComplexUnary}, {"im", Sig::ComplexUnary},
      {"complex", Sig::MakeComplex},
  };
  return table;
}

void expect_arity(const std::string& op, const std::vector<BasicType>& args, std::size_t n) {
  if (args.size() != n)
    throw TypeError("'" + op + "' expects " + std::to_string(n) + " argument(s), got " +
                    std::to_string(args.size()));
}

void expect_numeric(const std::string& op, BasicType t) {
  if (!is_numeric(t)) throw TypeError("'" + op + "' expects numeric arguments, got Bool");
}

std::int64_t checked(bool overflow, const std::int64_t& r) {
  if (overflow) throw EvalError("integer overflow");
  return r;
}

Value apply_builtin(const Structure& s, const std::string& op, const std::vector<Value>& a) {
  const Sig sig = builtin_table().at(op);
  switch (sig) {
    case Sig::Arith: {
      if (a[0].index() == 1 && a[1].index() == 1) {
        const auto x = std::get<std::int64_t>(a[0]);
        const auto y = std::get<std::int64_t>(a[1]);
        std::int64_t r = 0;
        if (op == "+") return checked(__builtin_add_overflow(x, y, &r), r);
        if (op == "-") return checked(__builtin_sub_overflow(x, y, &r), r);
        return checked(__builtin_mul_overflow(x, y, &r), r);
      }
      const Complex x = as_complex(a[0]);
      const Complex y = as_complex(a[1]);
      if (op == "+") return x + y;
      if (op == "-") return x - y;
      return x * y;
    }
    case Sig::Divide: {
      const Complex y = as_complex(a[1]);
      if (std::abs(y) == 0.0) throw EvalError("division by zero");
      return as_complex(a[0]) / y;
    }
    case Sig::Negate:
      if (a[0].index() == 1) {
        std::int64_t r = 0;
        return checked(__builtin_sub_overflow(std::int64_t{0}, std::get<std::int64_t>(a[0]), &r), r);
      }
      return -as_complex(a[0]);
    case Sig::IntBinary: {
      const auto x = as_int(a[0]);
      const auto y = as_int(a[1]);
      if (y == 0) throw EvalError("modulo by zero");
      auto r = x % y;
      if (r != 0 && ((r < 0) != (y < 0))) r += y;
      return r;
    }
    case Sig::Equality: {
      const bool e = values_equal(a[0], a[1], s.tol);
      return op == "=" ? e : !e;
    }
    case Sig::Order: {
      double x = 0, y = 0;
      if (a[0].index() == 1 && a[1].index() == 1) {
        const auto i = std::get<std::int64_t>(a[0]);
        const auto j = std::get<std::int64_t>(a[1]);
        if (op == "<") return i < j;
        if (op == "<=") return i <= j;
        if (op == ">") return i > j;
        return i >= j;
      }
      const Complex cx = as_complex(a[0]);
      const Complex cy = as_complex(a[1]);
      if (std::abs(cx.imag()) > s.tol || std::abs(cy.imag()) > s.tol)
        throw EvalError("ordering comparison of non-real complex values");
      x = cx.real();
      y = cy.real();
      if (op == "<") return x < y - s.tol;
      if (op == "<=") return x <= y + s.tol;
      if (op == ">") return x > y + s.tol;
      return x >= y - s.tol;
    }
    case Sig::BoolBinary: {
      const bool x = as_bool(a[0]);
      const bool y = as_bool(a[1]);
      if (op == "and") return x && y;
      if (op == "or") return x || y;
      return x != y;
    }
    case Sig::BoolUnary:
      return !as_bool(a[0]);
    case Sig::ComplexUnary: {
      const Complex x = as_complex(a[0]);
      if (op == "conj") return std::conj(x);
      if (op == "abs") return Complex(std::abs(x), 0.0);
      if (op == "exp") return std::exp(x);
      if (op == "cos") return std::cos(x);
      if (op == "sin") return std::sin(x);
      if (op == "sqrt") return std::sqrt(x);
      if (op == "re") return Complex(x.real(), 0.0);
      return Complex(x.imag(), 0.0);
    }
    case Sig::MakeComplex: {
      const Complex re = as_complex(a[0]);
      const Complex im = as_complex(a[1]);
      return Complex(re.real(), im.real());
    }
  }
  throw EvalError("unknown function '" + op + "'");
}

}  // namespace

const std::set<std::string>& builtin_functions() {
  static const std::set<std::string> names = [] {
    std::set<std::string> out;
    for (const auto& [k, v] : builtin_table()) out.insert(k);
    return out;
  }();
  return names;
}

BasicType builtin_result_type(const std::string& op, const std::vector<BasicType>& args) {
  const auto it = builtin_table().find(op);
  if (it == builtin_table().end()) throw TypeError("unknown function '" + op + "'");
  switch (it->second) {
    case Sig::Arith:
      expect_arity(op, args, 2);
      expect_numeric(op, args[0]);
      expect_numeric(op, args[1]);
      return (args[0] == BasicType::Int && args[1] == BasicType::Int) ? BasicType::Int : BasicType::Complex;
    case Sig::Divide:
      expect_arity(op, args, 2);
      expect_numeric(op, args[0]);
      expect_numeric(op, args[1]);
      return BasicType::Complex;
    case Sig::Negate:
      expect_arity(op, args, 1);
      expect_numeric(op, args[0]);
      return args[0];
    case Sig::IntBinary:
      expect_arity(op, args, 2);
      if (args[0] != BasicType::Int || args[1] != BasicType::Int) throw TypeError("'" + op + "' expects Int arguments");
      return BasicType::Int;
    case Sig::Equality:
      expect_arity(op, args, 2);
      if ((args[0] == BasicType::Bool) != (args[1] == BasicType::Bool))
        throw TypeError("'" + op + "' compares Bool with a numeric value");
      return BasicType::Bool;
    case Sig::Order:
      expect_arity(op, args, 2);
      expect_numeric(op, args[0]);
      expect_numeric(op, args[1]);
      return BasicType::Bool;
    case Sig::BoolBinary:
      expect_arity(op, args, 2);
      if (args[0] != BasicType::Bool || args[1] != BasicType::Bool) throw TypeError("'" + op + "' expects Bool arguments");
      return BasicType::Bool;
    case Sig::BoolUnary:
      expect_arity(op, args, 1);
      if (args[0] != BasicType::Bool) throw TypeError("'" + op + "' expects a Bool argument");
      return BasicType::Bool;
    case Sig::ComplexUnary:
      expect_arity(op, args, 1);
      expect_numeric(op, args[0]);
      return BasicType::Complex;
    case Sig::MakeComplex:
      expect_arity(op, args, 2);
      expect_numeric(op, args[0]);
      expect_numeric(op, args[1]);
      return BasicType::Complex;
  }
  throw TypeError("unknown function '" + op + "'");
}

// ---------------------------------------------------------------- Expr

Expr Expr::var(std::string name, BasicType type) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{type, VarExpr{std::move(name)}}));
}

Expr Expr::constant(Value v) {
  const BasicType t = type_of(v);
  return Expr(std::make_shared<const ExprNode>(ExprNode{t, ConstExpr{std::move(v)}}));
}

Expr Expr::app(const std::string& op, std::vector<Expr> args) {
  std::vector<BasicType> types;
  types.reserve(args.size());
  for (const auto& a : args) types.push_back(a.type());
  const BasicType t = builtin_result_type(op, types);
  return Expr(std::make_shared<const ExprNode>(ExprNode{t, AppExpr{op, std::move(args)}}));
}

namespace {

bool index_type_matches(BasicType declared, BasicType actual) {
  return declared == actual || (declared == BasicType::Complex && actual == BasicType::Int);
}

}  // namespace

Expr Expr::subscript(std::string array, VarType type, std::vector<Expr> indices) {
  if (!type.is_array()) throw TypeError("'" + array + "' is not an array");
  if (indices.size() != type.args.size())
    throw TypeError("array '" + array + "' expects " + std::to_string(type.args.size()) + " index(es)");
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (!index_type_matches(type.args[i], indices[i].type()))
      throw TypeError("index " + std::to_string(i + 1) + " of '" + array + "' has type " +
                      to_string(indices[i].type()) + ", expected " + to_string(type.args[i]));
  const BasicType t = type.value;
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{t, SubscriptExpr{std::move(array), std::move(type), std::move(indices)}}));
}

Expr Expr::cond(Expr guard, Expr then_branch, Expr else_branch) {
  if (guard.type() != BasicType::Bool) throw TypeError("conditional guard must be Bool");
  BasicType t = then_branch.type();
  if (then_branch.type() != else_branch.type()) {
    if (is_numeric(then_branch.type()) && is_numeric(else_branch.type()))
      t = BasicType::Complex;
    else
      throw TypeError("conditional branches have different types");
  }
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{t, CondExpr{std::move(guard), std::move(then_branch), std::move(else_branch)}}));
}

BasicType Expr::type() const { return node_->type; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.valid() != b.valid()) return false;
  if (!a.valid()) return true;
  if (&a.node() == &b.node()) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.type != y.type || x.v.index() != y.v.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(y.v);
        if constexpr (std::is_same_v<T, VarExpr>) {
          return lhs.name == rhs.name;
        } else if constexpr (std::is_same_v<T, ConstExpr>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          return lhs.op == rhs.op && lhs.args == rhs.args;
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          return lhs.array == rhs.array && lhs.array_type == rhs.array_type && lhs.indices == rhs.indices;
        } else {
          return lhs.guard == rhs.guard && lhs.then_branch == rhs.then_branch && lhs.else_branch == rhs.else_branch;
        }
      },
      x.v);
}

namespace {

bool is_infix(const std::string& op) {
  static const std::set<std::string> infix = {"+", "-", "*", "/", "=", "!=", "<", "<=", ">", ">="};
  return infix.count(op) > 0;
}

std::string join_exprs(const std::vector<Expr>& es) {
  std::string s;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) s += ", ";
    s += to_string(es[i]);
  }
  return s;
}

}  // namespace

std::string to_string(const Expr& e) {
  const auto& n = e.node();
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, ConstExpr>) {
          return to_string(x.value);
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          if (is_infix(x.op) && x.args.size() == 2)
            return "(" + to_string(x.args[0]) + " " + x.op + " " + to_string(x.args[1]) + ")";
          // a negated literal would read back as a negative constant
          if (x.op == "neg" && !std::holds_alternative<ConstExpr>(x.args[0].node().v))
            return "(-" + to_string(x.args[0]) + ")";
          return x.op + "(" + join_exprs(x.args) + ")";
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          return x.array + "[" + join_exprs(x.indices) + "]";
        } else {
          return "if " + to_string(x.guard) + " then " + to_string(x.then_branch) + " else " +
                 to_string(x.else_branch) + " fi";
        }
      },
      n.v);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::app("+", {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::app("-", {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::app("*", {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::app("/", {a, b}); }
Expr eq(const Expr& a, const Expr& b) { return Expr::app("=", {a, b}); }
Expr ne(const Expr& a, const Expr& b) { return Expr::app("!=", {a, b}); }

// ---------------------------------------------------------------- Formula

Formula Formula::atom(Expr e) {
  if (e.type() != BasicType::Bool) throw TypeError("atomic formula must be Bool, got " + to_string(e.type()));
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{AtomF{std::move(e)}}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{NotF{std::move(f)}}));
}

Formula Formula::binary(BinOp op, Formula a, Formula b) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{BinF{op, std::move(a), std::move(b)}}));
}

Formula Formula::quant(Quantifier q, std::string var, BasicType type, Formula body) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{QuantF{q, std::move(var), type, std::move(body)}}));
}

Formula Formula::all_of(const std::vector<Formula>& fs) {
  if (fs.empty()) return truth(true);
  Formula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

Formula Formula::any_of(const std::vector<Formula>& fs) {
  if (fs.empty()) return truth(false);
  Formula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.valid() != b.valid()) return false;
  if (!a.valid()) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.v.index() != y.v.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(y.v);
        if constexpr (std::is_same_v<T, AtomF>) {
          return lhs.expr == rhs.expr;
        } else if constexpr (std::is_same_v<T, NotF>) {
          return lhs.body == rhs.body;
        } else if constexpr (std::is_same_v<T, BinF>) {
          return lhs.op == rhs.op && lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
        } else {
          return lhs.q == rhs.q && lhs.var == rhs.var && lhs.type == rhs.type && lhs.body == rhs.body;
        }
      },
      x.v);
}

std::string to_string(const Formula& f) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomF>) {
          return to_string(x.expr);
        } else if constexpr (std::is_same_v<T, NotF>) {
          return "~" + to_string(x.body);
        } else if constexpr (std::is_same_v<T, BinF>) {
          const char* op = x.op == Formula::BinOp::And ? " /\\ " : x.op == Formula::BinOp::Or ? " \\/ " : " -> ";
          return "(" + to_string(x.lhs) + op + to_string(x.rhs) + ")";
        } else {
          return std::string("(") + (x.q == Formula::Quantifier::ForAll ? "forall " : "exists ") + x.var + ":" +
                 to_string(x.type) + " . " + to_string(x.body) + ")";
        }
      },
      f.node().v);
}

// ---------------------------------------------------------------- State

std::int64_t index_key(const Value& v) {
  switch (v.index()) {
    case 0:
      return std::get<bool>(v) ? 1 : 0;
    case 1:
      return std::get<std::int64_t>(v);
    default: {
      const Complex c = std::get<Complex>(v);
      const double r = std::round(c.real());
      if (std::abs(c.imag()) > 1e-9 || std::abs(c.real() - r) > 1e-9)
        throw EvalError("array index " + to_string(v) + " is not integral");
      return static_cast<std::int64_t>(r);
    }
  }
}

Value ArrayValue::at(const std::vector<std::int64_t>& key) const {
  const auto it = cells.find(key);
  return it == cells.end() ? fallback : it->second;
}

const Value& State::get(const std::string& name) const {
  const auto it = scalars.find(name);
  if (it == scalars.end()) throw EvalError("unbound variable '" + name + "'");
  return it->second;
}

State State::updated(const std::string& name, Value d) const {
  State s = *this;
  s.scalars[name] = std::move(d);
  return s;
}

State State::updated_cell(const std::string& array, const std::vector<std::int64_t>& key, Value d) const {
  State s = *this;
  s.arrays[array].cells[key] = std::move(d);
  return s;
}

std::vector<Value> Structure::domain(BasicType t) const { return domain(t, int_range); }

std::vector<Value> Structure::domain(BasicType t, const IntRange& range) const {
  switch (t) {
    case BasicType::Bool:
      return {Value{false}, Value{true}};
    case BasicType::Int: {
      if (range.lo > range.hi) throw EvalError("empty Int range");
      std::vector<Value> out;
      out.reserve(static_cast<std::size_t>(range.size()));
      for (auto i = range.lo; i <= range.hi; ++i) out.emplace_back(i);
      return out;
    }
    case BasicType::Complex:
      throw UnsupportedError("type C has no enumerable domain");
  }
  return {};
}

// ---------------------------------------------------------------- evaluation

namespace {

Value coerce(Value v, BasicType t) {
  if (t == BasicType::Complex && v.index() == 1) return as_complex(v);
  return v;
}

}  // namespace

Value eval_expr(const Structure& s, const State& sigma, const Expr& e) {
  const auto& n = e.node();
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          return coerce(sigma.get(x.name), n.type);
        } else if constexpr (std::is_same_v<T, ConstExpr>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          std::vector<Value> args;
          args.reserve(x.args.size());
          for (const auto& a : x.args) args.push_back(eval_expr(s, sigma, a));
          return apply_builtin(s, x.op, args);
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          const auto it = sigma.arrays.find(x.array);
          if (it == sigma.arrays.end()) throw EvalError("unbound array '" + x.array + "'");
          std::vector<std::int64_t> key;
          key.reserve(x.indices.size());
          for (const auto& i : x.indices) key.push_back(index_key(eval_expr(s, sigma, i)));
          return coerce(it->second.at(key), n.type);
        } else {
          return as_bool(eval_expr(s, sigma, x.guard)) ? coerce(eval_expr(s, sigma, x.then_branch), n.type)
                                                       : coerce(eval_expr(s, sigma, x.else_branch), n.type);
        }
      },
      n.v);
}

bool satisfies(const Structure& s, const State& sigma, const Formula& f) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomF>) {
          return as_bool(eval_expr(s, sigma, x.expr));
        } else if constexpr (std::is_same_v<T, NotF>) {
          return !satisfies(s, sigma, x.body);
        } else if constexpr (std::is_same_v<T, BinF>) {
          switch (x.op) {
            case Formula::BinOp::And:
              return satisfies(s, sigma, x.lhs) && satisfies(s, sigma, x.rhs);
            case Formula::BinOp::Or:
              return satisfies(s, sigma, x.lhs) || satisfies(s, sigma, x.rhs);
            case Formula::BinOp::Implies:
              return !satisfies(s, sigma, x.lhs) || satisfies(s, sigma, x.rhs);
          }
          return false;
        } else {
          if (!is_enumerable(x.type))
            throw UnsupportedError("quantifier over non-enumerable type C (variable '" + x.var + "')");
          const bool forall = x.q == Formula::Quantifier::ForAll;
          for (const auto& d : s.domain(x.type)) {
            const bool r = satisfies(s, sigma.updated(x.var, d), x.body);
            if (forall && !r) return false;
            if (!forall && r) return true;
          }
          return forall;
        }
      },
      f.node().v);
}

// ---------------------------------------------------------------- variables

void collect_vars(const Expr& e, std::map<std::string, VarType>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          out.emplace(x.name, VarType{{}, e.type()});
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          for (const auto& a : x.args) collect_vars(a, out);
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          out.emplace(x.array, x.array_type);
          for (const auto& i : x.indices) collect_vars(i, out);
        } else if constexpr (std::is_same_v<T, CondExpr>) {
          collect_vars(x.guard, out);
          collect_vars(x.then_branch, out);
          collect_vars(x.else_branch, out);
        }
      },
      e.node().v);
}

std::map<std::string, VarType> vars_of(const Expr& e) {
  std::map<std::string, VarType> out;
  collect_vars(e, out);
  return out;
}

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::map<std::string, VarType>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomF>) {
          for (auto& [name, t] : vars_of(x.expr))
            if (!bound.count(name)) out.emplace(name, t);
        } else if constexpr (std::is_same_v<T, NotF>) {
          collect_free(x.body, bound, out);
        } else if constexpr (std::is_same_v<T, BinF>) {
          collect_free(x.lhs, bound, out);
          collect_free(x.rhs, bound, out);
        } else {
          const bool inserted = bound.insert(x.var).second;
          collect_free(x.body, bound, out);
          if (inserted) bound.erase(x.var);
        }
      },
      f.node().v);
}

}  // namespace

std::map<std::string, VarType> free_vars(const Formula& f) {
  std::map<std::string, VarType> out;
  std::set<std::string> bound;
  collect_free(f, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  std::string name = base + "'";
  while (used.count(name)) name += "'";
  return name;
}

// ---------------------------------------------------------------- substitution

Expr map_expr(const Expr& e, const std::function<Expr(const Expr&)>& f) {
  const auto& n = e.node();
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarExpr> || std::is_same_v<T, ConstExpr>) {
          return f(e);
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          std::vector<Expr> args;
          for (const auto& a : x.args) args.push_back(map_expr(a, f));
          return f(Expr::app(x.op, std::move(args)));
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          std::vector<Expr> idx;
          for (const auto& i : x.indices) idx.push_back(map_expr(i, f));
          return f(Expr::subscript(x.array, x.array_type, std::move(idx)));
        } else {
          return f(Expr::cond(map_expr(x.guard, f), map_expr(x.then_branch, f), map_expr(x.else_branch, f)));
        }
      },
      n.v);
}

namespace {

void check_subst_type(const std::string& name, BasicType var_type, const Expr& t) {
  if (t.type() == var_type) return;
  if (var_type == BasicType::Complex && t.type() == BasicType::Int) return;
  throw TypeError("cannot substitute an expression of type " + to_string(t.type()) + " for variable '" + name +
                  "' of type " + to_string(var_type));
}

Expr subst_simple(const Expr& s, const Substitution& sub) {
  const auto& n = s.node();
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          const auto it = sub.find(x.name);
          if (it == sub.end()) return s;
          check_subst_type(x.name, n.type, it->second);
          return it->second;
        } else if constexpr (std::is_same_v<T, ConstExpr>) {
          return s;
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          std::vector<Expr> args;
          for (const auto& a : x.args) args.push_back(subst_simple(a, sub));
          return Expr::app(x.op, std::move(args));
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          std::vector<Expr> idx;
          for (const auto& i : x.indices) idx.push_back(subst_simple(i, sub));
          return Expr::subscript(x.array, x.array_type, std::move(idx));
        } else {
          return Expr::cond(subst_simple(x.guard, sub), subst_simple(x.then_branch, sub),
                            subst_simple(x.else_branch, sub));
        }
      },
      n.v);
}

Expr subst_cell(const Expr& s, const CellSubstitution& sub) {
  const auto& n = s.node();
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarExpr> || std::is_same_v<T, ConstExpr>) {
          return s;
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          std::vector<Expr> args;
          for (const auto& a : x.args) args.push_back(subst_cell(a, sub));
          return Expr::app(x.op, std::move(args));
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          std::vector<Expr> idx;
          for (const auto& i : x.indices) idx.push_back(subst_cell(i, sub));
          if (x.array != sub.array) return Expr::subscript(x.array, x.array_type, std::move(idx));
          if (idx.size() != sub.indices.size()) throw TypeError("index count mismatch for array '" + x.array + "'");
          std::optional<Expr> guard;
          for (std::size_t i = 0; i < idx.size(); ++i) {
            Expr e = eq(idx[i], sub.indices[i]);
            guard = guard ? Expr::app("and", {*guard, e}) : e;
          }
          Expr fallback = Expr::subscript(x.array, x.array_type, std::move(idx));
          return Expr::cond(*guard, sub.value, fallback);
        } else {
          return Expr::cond(subst_cell(x.guard, sub), subst_cell(x.then_branch, sub), subst_cell(x.else_branch, sub));
        }
      },
      n.v);
}

std::set<std::string> names_of(const std::map<std::string, VarType>& m) {
  std::set<std::string> out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

}  // namespace

Expr subst_expr(const Expr& s, const Substitution& sub) {
  if (sub.empty()) return s;
  return subst_simple(s, sub);
}

Expr subst_expr(const Expr& s, const CellSubstitution& sub) { return subst_cell(s, sub); }

Formula subst_formula(const Formula& f, const Substitution& sub) {
  if (sub.empty()) return f;
  return std::visit(
      [&](const auto& x) -> Formula {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomF>) {
          return Formula::atom(subst_expr(x.expr, sub));
        } else if constexpr (std::is_same_v<T, NotF>) {
          return Formula::negation(subst_formula(x.body, sub));
        } else if constexpr (std::is_same_v<T, BinF>) {
          return Formula::binary(x.op, subst_formula(x.lhs, sub), subst_formula(x.rhs, sub));
        } else {
          Substitution inner = sub;
          inner.erase(x.var);
          if (inner.empty()) return f;
          std::set<std::string> t_vars;
          for (const auto& [name, t] : inner) {
            for (const auto& [v, ty] : vars_of(t)) t_vars.insert(v);
          }
          if (!t_vars.count(x.var))
            return Formula::quant(x.q, x.var, x.type, subst_formula(x.body, inner));
          std::set<std::string> used = names_of(free_vars(x.body));
          used.insert(t_vars.begin(), t_vars.end());
          for (const auto& [name, t] : inner) used.insert(name);
          const std::string y = fresh_name(x.var, used);
          const Formula renamed = subst_formula(x.body, Substitution{{x.var, Expr::var(y, x.type)}});
          return Formula::quant(x.q, y, x.type, subst_formula(renamed, inner));
        }
      },
      f.node().v);
}

Formula subst_formula(const Formula& f, const CellSubstitution& sub) {
  return std::visit(
      [&](const auto& x) -> Formula {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomF>) {
          return Formula::atom(subst_expr(x.expr, sub));
        } else if constexpr (std::is_same_v<T, NotF>) {
          return Formula::negation(subst_formula(x.body, sub));
        } else if constexpr (std::is_same_v<T, BinF>) {
          return Formula::binary(x.op, subst_formula(x.lhs, sub), subst_formula(x.rhs, sub));
        } else {
          std::map<std::string, VarType> t_vars = vars_of(sub.value);
          for (const auto& i : sub.indices) collect_vars(i, t_vars);
          if (!t_vars.count(x.var)) return Formula::quant(x.q, x.var, x.type, subst_formula(x.body, sub));
          std::set<std::string> used = names_of(free_vars(x.body));
          for (const auto& [v, t] : t_vars) used.insert(v);
          used.insert(sub.array);
          const std::string y = fresh_name(x.var, used);
          const Formula renamed = subst_formula(x.body, Substitution{{x.var, Expr::var(y, x.type)}});
          return Formula::quant(x.q, y, x.type, subst_formula(renamed, sub));
        }
      },
      f.node().v);
}

Expr fold_constants(const Expr& e, const Structure& s) {
  return map_expr(e, [&](const Expr& x) -> Expr {
    const auto& n = x.node();
    if (const auto* app = std::get_if<AppExpr>(&n.v)) {
      for (const auto& a : app->args)
        if (!std::holds_alternative<ConstExpr>(a.node().v)) return x;
      try {
        return Expr::constant(eval_expr(s, State{}, x));
      } catch (const Error&) {
        return x;
      }
    }
    if (const auto* c = std::get_if<CondExpr>(&n.v)) {
      if (const auto* g = std::get_if<ConstExpr>(&c->guard.node().v))
        return as_bool(g->value) ? c->then_branch : c->else_branch;
    }
    return x;
  });
}

std::string to_string(const State& sigma) {
  std::string out;
  auto sep = [&] { out += out.empty() ? "{" : ", "; };
  for (const auto& [name, v] : sigma.scalars) {
    sep();
    out += name + " = " + to_string(v);
  }
  for (const auto& [name, arr] : sigma.arrays) {
    sep();
    out += name + " = [";
    bool first = true;
    for (const auto& [key, v] : arr.cells) {
      out += first ? "" : ", ";
      first = false;
      for (std::size_t i = 0; i < key.size(); ++i) out += (i ? " " : "") + std::to_string(key[i]);
      out += ": " + to_string(v);
    }
    out += "; else " + to_string(arr.fallback) + "]";
  }
  return out.empty() ? "{}" : out + "}";
}

}  // namespace sol

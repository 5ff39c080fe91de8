#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sol/core.hpp"

namespace sol {

/// Type of a variable: basic when `args` is empty, otherwise an array type
/// args[0] x ... x args[n-1] -> value.
struct VarType {
  std::vector<BasicType> args;
  BasicType value = BasicType::Bool;

  bool is_array() const { return !args.empty(); }
  friend bool operator==(const VarType&, const VarType&) = default;
};

std::string to_string(const VarType& t);

struct ExprNode;

/// Immutable, structurally shared classical expression.
class Expr {
 public:
  Expr() = default;

  static Expr var(std::string name, BasicType type);
  static Expr constant(Value v);
  static Expr boolean(bool b) { return constant(Value{b}); }
  static Expr integer(std::int64_t i) { return constant(Value{i}); }
  static Expr complex(Complex c) { return constant(Value{c}); }
  /// Application of a built-in function symbol; type-checked here.
  static Expr app(const std::string& op, std::vector<Expr> args);
  static Expr subscript(std::string array, VarType type, std::vector<Expr> indices);
  static Expr cond(Expr guard, Expr then_branch, Expr else_branch);

  BasicType type() const;
  const ExprNode& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct VarExpr {
  std::string name;
};
struct ConstExpr {
  Value value;
};
struct AppExpr {
  std::string op;
  std::vector<Expr> args;
};
struct SubscriptExpr {
  std::string array;
  VarType array_type;
  std::vector<Expr> indices;
};
struct CondExpr {
  Expr guard, then_branch, else_branch;
};

struct ExprNode {
  BasicType type;
  std::variant<VarExpr, ConstExpr, AppExpr, SubscriptExpr, CondExpr> v;
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
std::string to_string(const Expr& e);

/// Names of the built-in function symbols.
const std::set<std::string>& builtin_functions();
/// Result type of a built-in applied to the given argument types; throws TypeError.
BasicType builtin_result_type(const std::string& op, const std::vector<BasicType>& args);

// Expression shorthands used by library builders and tests.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr eq(const Expr& a, const Expr& b);
Expr ne(const Expr& a, const Expr& b);

struct FormulaNode;

class Formula {
 public:
  enum class BinOp : std::uint8_t { And, Or, Implies };
  enum class Quantifier : std::uint8_t { ForAll, Exists };

  Formula() = default;

  static Formula atom(Expr e);
  static Formula truth(bool b) { return atom(Expr::boolean(b)); }
  static Formula negation(Formula f);
  static Formula binary(BinOp op, Formula a, Formula b);
  static Formula conj(Formula a, Formula b) { return binary(BinOp::And, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(BinOp::Or, std::move(a), std::move(b)); }
  static Formula implies(Formula a, Formula b) { return binary(BinOp::Implies, std::move(a), std::move(b)); }
  static Formula quant(Quantifier q, std::string var, BasicType type, Formula body);
  /// Conjunction of a list; empty list is `true`.
  static Formula all_of(const std::vector<Formula>& fs);
  static Formula any_of(const std::vector<Formula>& fs);

  const FormulaNode& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct AtomF {
  Expr expr;
};
struct NotF {
  Formula body;
};
struct BinF {
  Formula::BinOp op;
  Formula lhs, rhs;
};
struct QuantF {
  Formula::Quantifier q;
  std::string var;
  BasicType type;
  Formula body;
};

struct FormulaNode {
  std::variant<AtomF, NotF, BinF, QuantF> v;
};

bool operator==(const Formula& a, const Formula& b);
std::string to_string(const Formula& f);

/// A total finite map standing for the value of an array variable; cells not
/// listed take `fallback`. Index keys store Bool as 0/1.
struct ArrayValue {
  std::map<std::vector<std::int64_t>, Value> cells;
  Value fallback{false};

  Value at(const std::vector<std::int64_t>& key) const;
  friend bool operator==(const ArrayValue&, const ArrayValue&) = default;
};

std::int64_t index_key(const Value& v);

/// Classical state: simple variables and arrays.
struct State {
  std::map<std::string, Value> scalars;
  std::map<std::string, ArrayValue> arrays;

  const Value& get(const std::string& name) const;
  /// sigma[x := d]
  State updated(const std::string& name, Value d) const;
  State updated_cell(const std::string& array, const std::vector<std::int64_t>& key, Value d) const;
  friend bool operator==(const State&, const State&) = default;
};

/// The fixed structure: the realised Int domain and the numeric tolerance.
struct Structure {
  IntRange int_range{};
  double tol = 1e-9;

  std::vector<Value> domain(BasicType t) const;
  std::vector<Value> domain(BasicType t, const IntRange& range) const;
};

/// `{x = 1, j = [0: true, 3: false; else false]}`
std::string to_string(const State& sigma);

Value eval_expr(const Structure& s, const State& sigma, const Expr& e);
bool satisfies(const Structure& s, const State& sigma, const Formula& f);

/// Simultaneous substitution of expressions for distinct simple variables.
using Substitution = std::map<std::string, Expr>;

/// Substitution for one subscripted variable a[s'1..s'm].
struct CellSubstitution {
  std::string array;
  std::vector<Expr> indices;
  Expr value;
};

Expr subst_expr(const Expr& s, const Substitution& sub);
Expr subst_expr(const Expr& s, const CellSubstitution& sub);
Formula subst_formula(const Formula& f, const Substitution& sub);
Formula subst_formula(const Formula& f, const CellSubstitution& sub);

/// Variables occurring in an expression, with their types.
std::map<std::string, VarType> vars_of(const Expr& e);
std::map<std::string, VarType> free_vars(const Formula& f);
void collect_vars(const Expr& e, std::map<std::string, VarType>& out);

/// A name derived from `base` by appending primes, avoiding `used`.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

/// Evaluate applications whose arguments are all constants.
Expr fold_constants(const Expr& e, const Structure& s);

/// Apply `f` bottom-up to every node of an expression.
Expr map_expr(const Expr& e, const std::function<Expr(const Expr&)>& f);

}  // namespace sol

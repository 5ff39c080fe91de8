#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sol/registers.hpp"

namespace sol {

/// T1 x ... x Tm -> T'1 x ... x T'n; either side may be empty.
struct QuantumType {
  std::vector<BasicType> dom, cod;
  friend bool operator==(const QuantumType&, const QuantumType&) = default;
};

std::string to_string(const QuantumType& t);

struct Signature {
  RegisterString dom, cod;

  QuantumType type() const;
};

bool operator==(const Signature& a, const Signature& b);
std::string to_string(const Signature& s);

struct OperatorVarDecl {
  std::string name;
  QuantumType type;
};
using OpVarPtr = std::shared_ptr<const OperatorVarDecl>;

/// How an operator constant may be applied to registers.
enum class ConstShape : std::uint8_t {
  Fixed,   // the signature type must equal `type`
  Square,  // dom and cod carry the same types; if type.dom is non-empty every register has type.dom[0]
  Any,     // any signature
};

struct OperatorConstDecl {
  std::string name;
  std::vector<BasicType> params;
  QuantumType type;
  ConstShape shape = ConstShape::Fixed;
};
using OpConstPtr = std::shared_ptr<const OperatorConstDecl>;

struct RecursiveDef;
struct OpNode;

class FormalOp {
 public:
  FormalOp() = default;

  static FormalOp scalar(Expr c);
  static FormalOp ket(Expr label, QuantumRef reg);
  static FormalOp bra(Expr label, QuantumRef reg);
  static FormalOp var(OpVarPtr decl, Signature sig);
  static FormalOp constant(OpConstPtr decl, std::vector<Expr> params, Signature sig);
  static FormalOp scale(Expr c, FormalOp a);
  static FormalOp adjoint(FormalOp a);
  static FormalOp sum(FormalOp a, FormalOp b);
  static FormalOp product(FormalOp a, FormalOp b);
  static FormalOp tensor(FormalOp a, FormalOp b);
  static FormalOp call(const std::shared_ptr<const RecursiveDef>& def, std::vector<Expr> args);

  const OpNode& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }

 private:
  explicit FormalOp(std::shared_ptr<const OpNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const OpNode> node_;
};

struct ScalarOp {
  Expr c;
};
struct KetOp {
  Expr label;
  QuantumRef reg;
};
struct BraOp {
  Expr label;
  QuantumRef reg;
};
struct VarOp {
  OpVarPtr decl;
  Signature sig;
};
struct ConstOp {
  OpConstPtr decl;
  std::vector<Expr> params;
  Signature sig;
};
struct ScaleOp {
  Expr c;
  FormalOp a;
};
struct AdjointOp {
  FormalOp a;
};
struct SumOp {
  FormalOp a, b;
};
struct ProductOp {
  FormalOp a, b;
};
struct TensorOp {
  FormalOp a, b;
};
/// Application of a recursive definition; the definition must outlive the term.
struct CallOp {
  std::string name;
  std::weak_ptr<const RecursiveDef> def;
  std::vector<Expr> args;
};

struct OpNode {
  std::variant<ScalarOp, KetOp, BraOp, VarOp, ConstOp, ScaleOp, AdjointOp, SumOp, ProductOp, TensorOp, CallOp> v;
};

/// One guarded case of a recursive definition. The body is either a template
/// over the parameters or a native builder receiving their values.
struct RecursiveCase {
  Formula guard;
  std::optional<FormalOp> body;
  std::function<FormalOp(const std::vector<Value>&)> build;
};

struct RecursiveDef {
  std::string name;
  std::vector<std::pair<std::string, BasicType>> params;
  std::vector<RecursiveCase> cases;
  /// Classical variables that native builders may mention; reported as free.
  std::map<std::string, VarType> captured;
};

/// Select the unique case whose guard holds at the given arguments and return
/// its body with the parameters instantiated.
FormalOp unroll(const Structure& s, const RecursiveDef& def, const std::vector<Value>& args);

bool operator==(const FormalOp& a, const FormalOp& b);
inline bool operator!=(const FormalOp& a, const FormalOp& b) { return !(a == b); }
std::string to_string(const FormalOp& a);

/// Sign(A); nullopt when A contains a recursive call.
std::optional<Signature> try_static_signature(const FormalOp& a);
/// Sign(A); throws EvalError when A contains a recursive call.
Signature static_signature(const FormalOp& a);
std::optional<QuantumType> static_type(const FormalOp& a);

FormalOp subst_classical(const FormalOp& a, const Substitution& sub);
FormalOp subst_classical(const FormalOp& a, const CellSubstitution& sub);
/// Simultaneous A[B̄/X̄], keyed by operator-variable name.
FormalOp subst_operator(const FormalOp& a, const std::map<std::string, FormalOp>& sub);
FormalOp subst_operator(const FormalOp& a, const FormalOp& b, const OperatorVarDecl& x);

std::map<std::string, VarType> free_classical_vars(const FormalOp& a);
void collect_classical_vars(const FormalOp& a, std::map<std::string, VarType>& out);
std::map<std::string, OpVarPtr> free_operator_vars(const FormalOp& a);
void collect_operator_vars(const FormalOp& a, std::map<std::string, OpVarPtr>& out);

/// Rebuild A applying `f` to every classical expression it contains
/// (scalars, labels, register indices, parameters, call arguments).
FormalOp map_exprs(const FormalOp& a, const std::function<Expr(const Expr&)>& f);
/// Rebuild A applying `f` to every quantum register reference.
FormalOp map_refs(const FormalOp& a, const std::function<QuantumRef(const QuantumRef&)>& f);
/// All register references occurring in A, in syntactic order.
std::vector<QuantumRef> refs_of(const FormalOp& a);

// Shorthands.
FormalOp operator+(const FormalOp& a, const FormalOp& b);
FormalOp operator*(const FormalOp& a, const FormalOp& b);
FormalOp operator*(const Expr& c, const FormalOp& a);
FormalOp tensor(const std::vector<FormalOp>& parts);
/// Apply an operator constant to registers with the abbreviation q̄ -> q̄.
FormalOp apply(const OpConstPtr& decl, RegisterString regs, std::vector<Expr> params = {});

}  // namespace sol

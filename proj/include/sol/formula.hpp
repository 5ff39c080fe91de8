#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sol/semantics.hpp"

namespace sol {

enum class CmpRel : std::uint8_t { Eq, Lt, Gt };
std::string to_string(CmpRel r);

struct SolNode;

/// A formula of symbolic operator logic.
class SolFormula {
 public:
  enum class BinOp : std::uint8_t { And, Or, Implies };
  enum class Quantifier : std::uint8_t { ForAll, Exists };

  SolFormula() = default;

  /// ‖A‖ rel λ, λ real.
  static SolFormula norm(FormalOp a, CmpRel rel, double lambda);
  /// tr(A) rel λ; < and > need real λ.
  static SolFormula trace(FormalOp a, CmpRel rel, Complex lambda);
  static SolFormula predicate(PredicateKind kind, FormalOp a, std::optional<RegisterString> regs = std::nullopt);
  static SolFormula equal(FormalOp a, FormalOp b);
  static SolFormula leq(FormalOp a, FormalOp b);
  /// A classical formula used as an atom.
  static SolFormula classical(Formula f);
  static SolFormula negation(SolFormula f);
  static SolFormula binary(BinOp op, SolFormula a, SolFormula b);
  static SolFormula conj(SolFormula a, SolFormula b) { return binary(BinOp::And, std::move(a), std::move(b)); }
  static SolFormula disj(SolFormula a, SolFormula b) { return binary(BinOp::Or, std::move(a), std::move(b)); }
  static SolFormula implies(SolFormula a, SolFormula b) { return binary(BinOp::Implies, std::move(a), std::move(b)); }
  static SolFormula quant(Quantifier q, std::string var, BasicType type, SolFormula body);
  static SolFormula quant_op(Quantifier q, OpVarPtr var, SolFormula body);
  static SolFormula all_of(const std::vector<SolFormula>& fs);

  const SolNode& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }

 private:
  friend struct SolFormulaFactory;
  explicit SolFormula(std::shared_ptr<const SolNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const SolNode> node_;
};

struct NormAtom {
  FormalOp a;
  CmpRel rel;
  double lambda;
};
struct TraceAtom {
  FormalOp a;
  CmpRel rel;
  Complex lambda;
};
struct PredAtom {
  PredicateKind kind;
  FormalOp a;
  std::optional<RegisterString> regs;
};
struct EqAtom {
  FormalOp a, b;
};
struct LeqAtom {
  FormalOp a, b;
};
struct ClassicalAtom {
  Formula f;
};
struct SolNot {
  SolFormula body;
};
struct SolBin {
  SolFormula::BinOp op;
  SolFormula lhs, rhs;
};
struct SolQuant {
  SolFormula::Quantifier q;
  std::string var;
  BasicType type;
  SolFormula body;
};
struct SolOpQuant {
  SolFormula::Quantifier q;
  OpVarPtr var;
  SolFormula body;
};

struct SolNode {
  std::variant<NormAtom, TraceAtom, PredAtom, EqAtom, LeqAtom, ClassicalAtom, SolNot, SolBin, SolQuant, SolOpQuant> v;
};

bool operator==(const SolFormula& a, const SolFormula& b);
std::string to_string(const SolFormula& f);

/// Free classical variables (with types) and free operator variables.
std::map<std::string, VarType> free_classical_vars(const SolFormula& f);
std::map<std::string, OpVarPtr> free_operator_vars(const SolFormula& f);

SolFormula subst_sol(const SolFormula& f, const Substitution& sub);
SolFormula subst_sol(const SolFormula& f, const CellSubstitution& sub);
SolFormula subst_sol(const SolFormula& f, const std::map<std::string, FormalOp>& sub);

/// How operator quantifiers are evaluated.
struct SamplingOptions {
  std::size_t samples = 16;
  std::uint64_t seed = 1;
};

/// Truth value of a formula under sampling. `certain` is false when the value
/// may depend on which operators were sampled: a sampled universal that held,
/// or a sampled existential that failed.
struct Truth {
  bool value = false;
  bool certain = true;
};

struct SatTrace {
  std::vector<std::string> diagnostics;
  bool used_sampling = false;
  void note(std::string s);
};

/// ζ ⊨ 𝒜. An atom whose operators fail to sign or evaluate is false, with a
/// diagnostic recorded in the trace.
Truth sat_sol(const QuantumStructure& qs, const Context& ctx, const SolFormula& f, const SamplingOptions& opts = {},
              SatTrace* trace = nullptr);

/// Sample set for an operator variable, deterministic in (seed, name, shape).
std::vector<CMatrix> samples_for(const QuantumStructure& qs, const OperatorVarDecl& x, const SamplingOptions& opts);

}  // namespace sol

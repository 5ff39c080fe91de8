#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sol/entailment.hpp"

namespace sol {

/// Σ c |s̄><t̄| over ground dyads. Registers are kept in canonical order and
/// labels are basis indices in domain order.
struct NormalForm {
  using Labels = std::vector<std::size_t>;
  std::vector<GroundRef> rows, cols;
  std::map<std::pair<Labels, Labels>, Complex> terms;
};

/// Sparse normal form of A under ζ. Operator variables and constants are
/// expanded through their matrices; everything else is computed on dyads.
NormalForm normalize(const QuantumStructure& qs, const Context& ctx, const FormalOp& a);
/// Dense matrix of a normal form, rows and columns in canonical order.
Matrix to_matrix(const NormalForm& nf, const IntRange& range);
/// The normal form as a term: a sum of scaled ket-bra products, or Zero.
FormalOp to_term(const NormalForm& nf, const IntRange& range);
/// One `c |labels>_regs <labels|_regs` line per dyad.
std::string to_string(const NormalForm& nf, const IntRange& range);

/// Equality of ζ(A) and ζ(B) decided on normal forms.
Judgement decide_ground_equality(const QuantumStructure& qs, const Context& ctx, const FormalOp& a, const FormalOp& b);

/// Values bound to pattern metavariables (names starting with '?').
struct Bindings {
  std::map<std::string, Expr> exprs;
  std::map<std::string, QuantumRef> refs;
  std::map<std::string, FormalOp> ops;
};

/// Side condition of a rule: a classical formula over metavariables plus
/// pairs of register metavariables that must name the same register.
struct RuleCondition {
  Formula classical = Formula::truth(true);
  std::vector<std::pair<std::string, std::string>> same_register;
};

/// How a side condition is discharged: under a concrete state, or
/// symbolically by entailment from a classical theory.
struct Discharge {
  const QuantumStructure* qs = nullptr;
  std::optional<State> sigma;
  std::vector<Formula> theory;
  std::map<std::string, IntRange> ranges;

  static Discharge concrete(const QuantumStructure& qs, State sigma);
  static Discharge symbolic(const QuantumStructure& qs, std::vector<Formula> theory,
                            std::map<std::string, IntRange> ranges = {});
  /// Whether the closed formula holds (concrete) or is entailed (symbolic).
  bool holds(const Formula& f, std::string* why = nullptr) const;
};

struct RewriteResult {
  FormalOp term;
  bool applied = false;
  std::string reason;
};

struct RewriteRule {
  std::string name;
  FormalOp lhs, rhs;
  RuleCondition condition;
  /// Rules that cannot be written as a single pattern try each subterm here.
  /// Returning nullopt with `why` set records a failed attempt.
  std::function<std::optional<FormalOp>(const FormalOp&, const Discharge&, std::string& why)> native;
};

bool match(const FormalOp& pattern, const FormalOp& term, Bindings& b);
FormalOp instantiate(const FormalOp& tmpl, const Bindings& b);
Expr instantiate(const Expr& tmpl, const Bindings& b);
/// The rule's side condition with metavariables replaced.
Formula instantiate_condition(const RuleCondition& c, const Bindings& b);

/// Rewrite the first subterm (pre-order) that matches and whose condition is
/// discharged. The term is returned unchanged, with a reason, otherwise.
RewriteResult rewrite_step(const FormalOp& a, const RewriteRule& rule, const Discharge& how,
                           const Bindings& initial = {});

RewriteRule coefficient_addition_rule();
/// (|s1><s2|)|s3> -> |s1> written with a bra.
RewriteRule self_outer_product_rule();
/// The same with the bra written as the adjoint of a ket.
RewriteRule self_outer_product_adjoint_rule();
RewriteRule identity_rule();
RewriteRule matrix_representation_rule();

}  // namespace sol

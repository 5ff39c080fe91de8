#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sol/formula.hpp"

namespace sol {

enum class Verdict : std::uint8_t { Valid, Refuted, Unknown };
std::string to_string(Verdict v);

/// Σ, Γ ⊨ 𝒜 over bounded classical domains and sampled operators.
struct EntailmentQuery {
  std::vector<Formula> sigma;
  std::vector<SolFormula> gamma;
  SolFormula goal;
  /// Int bounds for individual free variables; others use the structure's range.
  std::map<std::string, IntRange> ranges;
  /// Variables with fixed values; they are not enumerated.
  State fixed;
  SamplingOptions sampling;
  std::uint64_t state_budget = 20'000'000;
};

struct CheckStats {
  std::uint64_t states = 0;      // classical states visited, partial ones included
  std::uint64_t satisfying = 0;  // complete states satisfying Σ
  std::uint64_t valuations = 0;  // (σ, η) pairs checked
};

struct CheckResult {
  Verdict verdict = Verdict::Unknown;
  std::string reason;
  /// A context satisfying Σ and Γ but not the goal; set iff Refuted.
  std::optional<Context> witness;
  /// False when some classical value or operator was sampled rather than enumerated.
  bool exact = true;
  CheckStats stats;
  std::vector<std::string> diagnostics;
};

CheckResult check_entailment(const QuantumStructure& qs, const EntailmentQuery& q);

/// The classical side conditions of unitarity (rows normalised and pairwise
/// orthogonal) or of being an observable (a_ij = conj(a_ji)) for a 2^k x 2^k
/// coefficient grid, and the matching predicate on Σ a_ij |i><j|.
struct DefinitionCheck {
  bool conditions = false;
  bool predicate = false;
};

DefinitionCheck unitary_def_check(const QuantumStructure& qs, const State& sigma,
                                  const std::vector<std::vector<Expr>>& a);
DefinitionCheck observable_def_check(const QuantumStructure& qs, const State& sigma,
                                     const std::vector<std::vector<Expr>>& a);

/// Σ_ij a_ij |i><j| on the given qubits, first qubit most significant.
FormalOp coefficient_operator(const std::vector<std::vector<Expr>>& a, const RegisterString& qubits);

}  // namespace sol

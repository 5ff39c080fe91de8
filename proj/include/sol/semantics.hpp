#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sol/matrix.hpp"
#include "sol/operators.hpp"

namespace sol {

/// q̄ -> q̄' with concrete, pairwise-distinct refs on each side.
struct GroundSignature {
  std::vector<GroundRef> dom, cod;
};

bool operator==(const GroundSignature& a, const GroundSignature& b);
std::string to_string(const GroundSignature& s);

/// Matrix interpretation of an operator constant. `matrix` receives the
/// evaluated parameters and the grounded signature and returns a
/// dim(dom) x dim(cod) matrix. `validate`, when set, returns an error message
/// if the constant cannot be applied to that signature.
struct ConstInterpretation {
  OpConstPtr decl;
  std::function<CMatrix(const std::vector<Value>&, const GroundSignature&, const IntRange&)> matrix;
  std::function<std::optional<std::string>(const std::vector<Value>&, const GroundSignature&)> validate;
};

struct QuantumStructure {
  Structure classical;
  std::size_t max_dim = 4096;
  std::map<std::string, ConstInterpretation> constants;

  void define(ConstInterpretation c);
  const ConstInterpretation& interpretation(const std::string& name) const;
  OpConstPtr constant(const std::string& name) const;
  double tol() const { return classical.tol; }
  const IntRange& range() const { return classical.int_range; }
};

/// Values of operator variables, keyed by name. Rows and columns follow the
/// register order of each occurrence's signature.
using Valuation = std::map<std::string, CMatrix>;

struct Context {
  State sigma;
  Valuation eta;
};

/// σ ⊨ A : q̄ -> q̄'. Throws SigningError naming the failing rule.
GroundSignature check_signing(const QuantumStructure& qs, const State& sigma, const FormalOp& a);

/// ζ(A), rows indexed by the grounded domain and columns by the codomain.
/// Throws SigningError, EvalError, or ResourceError past the dimension cap.
Matrix evaluate(const QuantumStructure& qs, const Context& ctx, const FormalOp& a);

double frobenius_norm(const QuantumStructure& qs, const Context& ctx, const FormalOp& a);
/// Throws EvalError when the signature is not square.
Complex trace(const QuantumStructure& qs, const Context& ctx, const FormalOp& a);

/// A truth value together with the reason it is false.
struct Judgement {
  bool holds = false;
  std::string reason;

  explicit operator bool() const { return holds; }
  static Judgement yes() { return {true, {}}; }
  static Judgement no(std::string why) { return {false, std::move(why)}; }
};

enum class PredicateKind : std::uint8_t { PureState, MixedState, Unitary, Observable };
std::string to_string(PredicateKind k);

/// 𝒮_p, 𝒮_m, 𝒰, 𝒪. With `regs` unset the predicate is taken on A's own
/// signature.
Judgement check_predicate(const QuantumStructure& qs, const Context& ctx, PredicateKind kind, const FormalOp& a,
                          const std::optional<RegisterString>& regs = std::nullopt);

enum class Relation : std::uint8_t { Equal, Loewner };
Judgement compare(const QuantumStructure& qs, const Context& ctx, const FormalOp& a, const FormalOp& b, Relation rel);

// Numeric tests on plain matrices, shared with the sampling and library layers.
bool is_unit_vector(const CMatrix& v, double tol);
bool is_hermitian(const CMatrix& m, double tol);
bool is_unitary(const CMatrix& m, double tol);
bool is_density(const CMatrix& m, double tol);
/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const CMatrix& m);
/// a ⊑ b
bool loewner_leq(const CMatrix& a, const CMatrix& b, double tol);

}  // namespace sol

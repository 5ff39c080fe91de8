#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sol/formula.hpp"
#include "sol/sampling.hpp"

namespace sol {

/// Seeded random terms over a fixed vocabulary, used by the property suites
/// and the tests.
///
/// Classical: Int x, y, z; Bool b, c; Complex a; array j : Int -> Bool.
/// Quantum: array q : Int -> Bool and qubits r, s. Registers are drawn from
/// q[x], q[x+1], q[x+2], r, s, which are distinct in every state.
/// Operators: X : Bool -> Bool and Y : Bool x Bool -> Bool x Bool.
class TermGenerator {
 public:
  explicit TermGenerator(std::uint64_t seed, IntRange values = {-8, 8});

  Rng& rng() { return rng_; }
  int pick(int n);
  bool coin(double p = 0.5);

  State state();
  Valuation valuation();
  /// A random matrix of the shape of an operator variable.
  CMatrix matrix_for(const OperatorVarDecl& x);

  Expr expr(BasicType t, int depth);
  Formula formula(int depth);

  const RegisterString& pool() const { return pool_; }
  /// Distinct registers from the pool, between lo and hi of them.
  RegisterString registers(std::size_t lo, std::size_t hi);
  RegisterString shuffled(RegisterString rs);

  /// A term of signature dom -> cod, well-signed in every state. Matrices of
  /// intermediate products stay within `max_qubits` rows-plus-columns qubits.
  FormalOp op(const RegisterString& dom, const RegisterString& cod, int depth, std::size_t max_qubits = 6);
  /// A term of random signature with at most max_qubits qubits in total.
  FormalOp op(int depth, std::size_t max_qubits = 6);
  /// A term of signature regs -> regs that mentions no other registers, as
  /// needed for substitution into an operator variable.
  FormalOp closed_op(const RegisterString& regs, int depth);
  /// A term equal to `a` in every context, written differently.
  FormalOp equivalent(const FormalOp& a);
  /// A term that fails to sign, and the rule expected to reject it.
  FormalOp ill_signed(std::string& expected_rule);

  SolFormula sol(int depth);

  /// Whether leaves may be operator variables.
  void set_operator_vars(bool on) { operator_vars_ = on; }

  const OpVarPtr& op_x() const { return x_; }
  const OpVarPtr& op_y() const { return y_; }
  const QuantumVarPtr& array_q() const { return q_; }
  const IntRange& values() const { return values_; }

 private:
  FormalOp leaf(const RegisterString& dom, const RegisterString& cod);
  FormalOp basis(const RegisterString& regs, bool kets);
  SolFormula atom();
  Expr variable(BasicType t);

  Rng rng_;
  IntRange values_;
  QuantumVarPtr q_, r_, s_;
  RegisterString pool_;
  OpVarPtr x_, y_;
  bool operator_vars_ = true;
};

}  // namespace sol

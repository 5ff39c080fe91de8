#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sol/entailment.hpp"
#include "sol/suites.hpp"

namespace sol {

/// (|0,y> + (-1)^x |1,ȳ>)/√2 on (a, b), with Bool expressions x and y.
FormalOp bell(const Expr& x, const Expr& y, const QuantumRef& a, const QuantumRef& b);

/// The recursive state definitions over a qubit array q : Int -> Bool and a
/// classical bit array `bits` : Int -> Bool.
///
///   eqsup(m, n)         equal superposition on q[m..n]
///   ghz(m, n)           GHZ state on q[m..n], built by CNOT chaining
///   basis_state(k, l)   |j[k] ... j[l]> on q[k..l]
///   qft_prefix(k, r, l) first r-k+1 factors of the product form of QFT(j, k:l)
///   qft_state(k, l)     qft_prefix(k, l, l)
struct StateLibrary {
  QuantumVarPtr q;
  std::string bits;
  std::shared_ptr<const RecursiveDef> eqsup, ghz, basis_state, qft_prefix, qft_state;

  std::vector<std::shared_ptr<const RecursiveDef>> defs() const;
  /// Lookup by name; nullptr when absent.
  std::shared_ptr<const RecursiveDef> find(const std::string& name) const;
};

/// Definitions over the given array (a fresh `q` when null). Throws TypeError
/// unless q has type Int -> Bool.
StateLibrary make_state_library(QuantumVarPtr q = nullptr, const std::string& bits = "j");

/// q[lo], ..., q[hi].
RegisterString array_section(const QuantumVarPtr& q, std::int64_t lo, std::int64_t hi);

/// A state in which the bit array holds the bits of `value`, j[1] most
/// significant among j[1..l].
State bits_state(const std::string& bits, std::uint64_t value, int l);

/// QFT(l)[q[1..l]] * basis_state(1, l) against qft_state(1, l), and both
/// against the DFT column. Returns the largest entry-wise deviation.
double qft_residual(const QuantumStructure& qs, const StateLibrary& lib, int l, std::uint64_t j);

// Teleportation.

struct TeleportOptions {
  bool x_correction = true;
  bool z_correction = true;
  bool phase_correction = true;
};

struct BranchCheck {
  bool x = false, y = false, m = false, ma = false;
  std::string input;
  double residual = 0;
  bool ok = false;
};

/// The branch operator of TEL_xy for measurement outcomes (m, ma) on
/// registers q, qa, qb.
FormalOp teleport_branch(bool x, bool y, bool m, bool ma, const QuantumRef& q, const QuantumRef& qa,
                         const QuantumRef& qb, const TeleportOptions& opts = {});

/// All 4 branches on the inputs (1,0), (0,1), (1/√2, i/√2), each compared with
/// ½(α|0> + β|1>) on qb.
std::vector<BranchCheck> teleport_verify(bool x, bool y, const TeleportOptions& opts = {}, double tol = 1e-9);

// Z-Y decomposition and Bloch angles.

struct ZYAngles {
  double theta = 0, theta1 = 0, theta2 = 0, theta3 = 0;
};

/// Angles with U = e^{iθ} R_z(θ1) R_y(θ2) R_z(θ3). Throws EvalError unless U
/// is a 2x2 unitary within tol.
ZYAngles zy_decompose(const CMatrix& u, double tol = 1e-9);
CMatrix zy_reconstruct(const ZYAngles& a);
/// e^{iθ} . R_z(θ1)[q] * R_y(θ2)[q] * R_z(θ3)[q]
FormalOp zy_term(const ZYAngles& a, const QuantumRef& q);

struct BlochAngles {
  double theta = 0, phi = 0, gamma = 0;
};

/// α|0> + β|1> = e^{iγ}(cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>), θ in [0, π], φ in
/// [0, 2π). Throws EvalError unless |α|² + |β|² = 1 within tol.
BlochAngles bloch(Complex alpha, Complex beta, double tol = 1e-9);
/// (cos(θ/2), e^{iφ} sin(θ/2)) scaled by e^{iγ}.
std::pair<Complex, Complex> bloch_state(const BlochAngles& a);

// No-cloning.

struct CloningWitness {
  std::string state;  // "|0>", "|1>" or "|+>"
  double residual = 0;
};

/// The first of |0>, |1>, |+> that U : (a,b) -> (a,b) fails to copy from a
/// into b starting from |0>_b. Throws EvalError unless U is a 4x4 unitary.
std::optional<CloningWitness> no_cloning_refute(const CMatrix& u, double tol = 1e-9);

/// ¬(∃U)[unitary(U):a,b ∧ (∀ψ)(pure(ψ):a → U(ψ ⊗ |0>) = ψ ⊗ ψ)].
SolFormula no_cloning_formula(const QuantumRef& a, const QuantumRef& b);

// Projection.

/// I[q[k..l]] - |0..0><0..0|.
FormalOp projection_example(const QuantumVarPtr& q, std::int64_t k, std::int64_t l);
/// P² = P, P† = P and tr P = 2^{l-k+1} - 1.
Judgement projection_check(const QuantumStructure& qs, const QuantumVarPtr& q, std::int64_t k, std::int64_t l);

// Harness suites.

/// 48 branch checks plus one case per dropped correction that must fail somewhere.
SuiteReport teleport_suite(const SuiteOptions& opts = {});
/// QFT recursion against the DFT for l = 1..5 and every j.
SuiteReport qft_suite(const SuiteOptions& opts = {});
/// m = n ⊨ S(m,n) = GHZ(m,n) over [0,10], GHZ(0,2) by hand, and purity of every unrolling.
SuiteReport ghz_suite(const SuiteOptions& opts = {});
/// Z-Y decomposition of I, H and `instances` Haar unitaries, checked densely and through evaluation.
SuiteReport zy_suite(const SuiteOptions& opts = {});
/// Bloch angles of the fixed examples and `instances` random states.
SuiteReport bloch_suite(const SuiteOptions& opts = {});
/// Witnesses for I, CNOT and `instances` Haar unitaries, and the raw formula's verdict.
SuiteReport nocloning_suite(const SuiteOptions& opts = {});
/// Projection example for small sections.
SuiteReport projection_suite(const SuiteOptions& opts = {});

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();
/// Throws EvalError for an unknown name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts = {});

}  // namespace sol

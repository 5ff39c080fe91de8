#include <doctest.h>

#include "sol/gates.hpp"
#include "sol/library.hpp"
#include "sol/sampling.hpp"

using namespace sol;

namespace {

const double r2 = 1 / std::sqrt(2.0);
const double pi = std::acos(-1.0);

CMatrix kron3(const CMatrix& a, const CMatrix& b, const CMatrix& c) { return kron(kron(a, b), c); }

CMatrix column(std::initializer_list<Complex> xs) {
  CMatrix v(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (Complex x : xs) v(i++, 0) = x;
  return v;
}

/// Plain state-vector teleportation of (alpha, beta) for one branch, q most significant.
CMatrix dense_branch(bool x, bool y, bool m, bool ma, Complex alpha, Complex beta, const TeleportOptions& o) {
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix bell = CMatrix::Zero(4, 1);
  bell(y ? 1 : 0, 0) = r2;
  bell(y ? 2 : 3, 0) = x ? -r2 : r2;
  CMatrix state = kron(column({alpha, beta}), bell);
  state = kron(cnot_matrix(), id) * state;
  state = kron3(hadamard(), id, id) * state;
  CMatrix out(2, 1);
  for (int b = 0; b < 2; ++b) out(b, 0) = state((m ? 4 : 0) + (ma ? 2 : 0) + b, 0);
  if (o.x_correction && y != ma) out = pauli_x() * out;
  if (o.z_correction && x != m) out = pauli_z() * out;
  if (o.phase_correction && x && ma) out = -out;
  return out;
}

int dense_failures(const TeleportOptions& o) {
  const Complex inputs[3][2] = {{1.0, 0.0}, {0.0, 1.0}, {r2, Complex(0, r2)}};
  int failures = 0;
  for (bool x : {false, true})
    for (bool y : {false, true})
      for (bool m : {false, true})
        for (bool ma : {false, true})
          for (const auto& in : inputs) {
            const CMatrix got = dense_branch(x, y, m, ma, in[0], in[1], o);
            if (max_abs(got - 0.5 * column({in[0], in[1]})) > 1e-9) ++failures;
          }
  return failures;
}

int library_failures(const TeleportOptions& o) {
  int failures = 0;
  for (bool x : {false, true})
    for (bool y : {false, true})
      for (const auto& c : teleport_verify(x, y, o)) failures += c.ok ? 0 : 1;
  return failures;
}

}  // namespace

TEST_CASE("teleportation: every branch leaves half the input on Bob's qubit") {
  int checks = 0;
  for (bool x : {false, true})
    for (bool y : {false, true})
      for (const auto& c : teleport_verify(x, y)) {
        ++checks;
        CHECK_MESSAGE(c.ok, "x=" << c.x << " y=" << c.y << " m=" << c.m << " ma=" << c.ma << " " << c.input);
        CHECK(c.residual < 1e-9);
      }
  CHECK(checks == 48);
  CHECK(dense_failures({}) == 0);
}

TEST_CASE("teleportation mutations agree with the dense oracle") {
  const TeleportOptions no_x{false, true, true}, no_z{true, false, true}, no_ph{true, true, false};
  CHECK(library_failures(no_x) == dense_failures(no_x));
  CHECK(library_failures(no_z) == dense_failures(no_z));
  CHECK(library_failures(no_ph) == dense_failures(no_ph));
  CHECK(dense_failures(no_x) == 24);
  CHECK(dense_failures(no_z) == 16);
  CHECK(dense_failures(no_ph) == 12);
}

TEST_CASE("Bell state template") {
  const auto a = make_qubit("a"), b = make_qubit("b");
  const QuantumStructure qs = standard_structure({});
  for (bool x : {false, true})
    for (bool y : {false, true}) {
      const Matrix m = evaluate(qs, {}, bell(Expr::boolean(x), Expr::boolean(y), QuantumRef(a), QuantumRef(b)));
      CMatrix want = CMatrix::Zero(4, 1);
      want(y ? 1 : 0, 0) = r2;
      want(y ? 2 : 3, 0) = x ? -r2 : r2;
      CHECK(max_abs(m.data - want) < 1e-12);
    }
}

TEST_CASE("Z-Y decomposition") {
  const ZYAngles h = zy_decompose(hadamard());
  CHECK(max_abs(zy_reconstruct(h) - hadamard()) < 1e-9);
  CHECK(max_abs(zy_reconstruct(zy_decompose(CMatrix::Identity(2, 2))) - CMatrix::Identity(2, 2)) < 1e-9);
  for (const CMatrix& p : {pauli_x(), pauli_y(), pauli_z()}) CHECK(max_abs(zy_reconstruct(zy_decompose(p)) - p) < 1e-9);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const CMatrix u = haar_unitary(2, rng);
    CHECK(max_abs(zy_reconstruct(zy_decompose(u)) - u) < 1e-9);
  }
  CMatrix not_unitary(2, 2);
  not_unitary << 1, 1, 0, 1;
  CHECK_THROWS_AS(zy_decompose(not_unitary), EvalError);
}

TEST_CASE("Z-Y angles through the term evaluator") {
  const auto q = make_qubit("q");
  const QuantumStructure qs = standard_structure({});
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const CMatrix u = haar_unitary(2, rng);
    const Matrix m = evaluate(qs, {}, zy_term(zy_decompose(u), QuantumRef(q)));
    CHECK(max_abs(m.data - u) < 1e-9);
  }
}

TEST_CASE("Bloch angles") {
  auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  CHECK(close(bloch(1.0, 0.0).theta, 0.0));
  CHECK(close(bloch(0.0, 1.0).theta, pi));
  const BlochAngles plus = bloch(r2, r2);
  CHECK(close(plus.theta, pi / 2));
  CHECK(close(plus.phi, 0.0));
  const BlochAngles iplus = bloch(r2, Complex(0, r2));
  CHECK(close(iplus.theta, pi / 2));
  CHECK(close(iplus.phi, pi / 2));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const CMatrix v = random_unit_vector(2, rng);
    const auto [a, b] = bloch_state(bloch(v(0, 0), v(1, 0)));
    CHECK(std::abs(a - v(0, 0)) < 1e-9);
    CHECK(std::abs(b - v(1, 0)) < 1e-9);
  }
  CHECK_THROWS_AS(bloch(1.0, 1.0), EvalError);
}

TEST_CASE("no-cloning witnesses") {
  const auto w_id = no_cloning_refute(CMatrix::Identity(4, 4));
  REQUIRE(w_id);
  CHECK(w_id->state == "|1>");
  const auto w_cnot = no_cloning_refute(cnot_matrix());
  REQUIRE(w_cnot);
  CHECK(w_cnot->state == "|+>");
  Rng rng(13);
  for (int i = 0; i < 20; ++i) CHECK(no_cloning_refute(haar_unitary(4, rng)).has_value());
  CHECK_THROWS_AS(no_cloning_refute(CMatrix::Ones(4, 4)), EvalError);
}

TEST_CASE("projection onto states with some bit set") {
  const auto q = make_qvar("q", VarType{{BasicType::Int}, BasicType::Bool});
  const QuantumStructure qs = standard_structure({});
  const Matrix one = evaluate(qs, {}, projection_example(q, 2, 2));
  CMatrix want = CMatrix::Zero(2, 2);
  want(1, 1) = 1;
  CHECK(max_abs(one.data - want) < 1e-12);
  for (int l = 1; l <= 4; ++l) {
    CHECK(projection_check(qs, q, 1, l).holds);
    CHECK(std::abs(trace(qs, {}, projection_example(q, 1, l)) - Complex(std::pow(2.0, l) - 1)) < 1e-9);
  }
}

TEST_CASE("GHZ(0, 2) by hand") {
  const StateLibrary lib = make_state_library();
  const QuantumStructure qs = standard_structure({});
  const Matrix m = evaluate(qs, {}, FormalOp::call(lib.ghz, {Expr::integer(0), Expr::integer(2)}));
  CMatrix want = CMatrix::Zero(8, 1);
  want(0, 0) = r2;
  want(7, 0) = r2;
  CHECK(to_string(m.rows) == "(q[0], q[1], q[2])");
  CHECK(max_abs(m.data - want) < 1e-9);
  CHECK_THROWS(evaluate(qs, {}, FormalOp::call(lib.ghz, {Expr::integer(3), Expr::integer(2)})));
}

TEST_CASE("QFT product form against the DFT column") {
  const StateLibrary lib = make_state_library();
  const QuantumStructure qs = standard_structure({});
  for (int l = 1; l <= 3; ++l)
    for (std::uint64_t j = 0; j < (1u << l); ++j) CHECK(qft_residual(qs, lib, l, j) < 1e-9);
}

TEST_CASE("library suites pass") {
  SuiteOptions o;
  o.instances = 20;
  for (const char* name : {"teleport", "zy", "bloch", "nocloning", "projection"}) {
    const SuiteReport r = run_suite(name, o);
    CHECK_MESSAGE(r.ok(), name);
  }
  CHECK_THROWS(run_suite("nosuch", o));
}

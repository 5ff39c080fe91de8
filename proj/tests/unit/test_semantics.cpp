#include <doctest.h>

#include "sol/gates.hpp"
#include "sol/generators.hpp"

using namespace sol;

namespace {

Config small() {
  Config c;
  c.int_range = {-4, 4};
  return c;
}

const QuantumStructure& qs() {
  static const QuantumStructure s = standard_structure(small());
  return s;
}

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const double r2 = 1 / std::sqrt(2.0);

}  // namespace

TEST_CASE("gate matrices") {
  const Complex i(0, 1);
  CHECK(max_abs(pauli_x() - m2(0, 1, 1, 0)) < 1e-15);
  CHECK(max_abs(pauli_y() - m2(0, -i, i, 0)) < 1e-15);
  CHECK(max_abs(pauli_z() - m2(1, 0, 0, -1)) < 1e-15);
  CHECK(max_abs(hadamard() - m2(r2, r2, r2, -r2)) < 1e-15);
  const double t = 0.9;
  CHECK(max_abs(rotation('y', t) - m2(std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2))) < 1e-15);
  CHECK(max_abs(rotation('z', t) - m2(std::exp(-i * (t / 2)), 0, 0, std::exp(i * (t / 2)))) < 1e-15);
  CMatrix f = dft_matrix(2);
  CHECK(std::abs(f(1, 1) - Complex(0, 0.5)) < 1e-15);
  CHECK(is_unitary(f, 1e-12));
}

TEST_CASE("a ket is a column and a bra a row") {
  const auto q = make_qubit("q");
  const Matrix k = evaluate(qs(), {}, FormalOp::ket(Expr::integer(1), QuantumRef(q)));
  CHECK(k.data.rows() == 2);
  CHECK(k.data.cols() == 1);
  CHECK(k.data(1, 0) == Complex(1));
  const Matrix b = evaluate(qs(), {}, FormalOp::bra(Expr::integer(1), QuantumRef(q)));
  CHECK(b.data.rows() == 1);
  CHECK(b.data.cols() == 2);
}

TEST_CASE("tensor products put the first register first") {
  const auto a = make_qubit("a"), b = make_qubit("b");
  const FormalOp t = FormalOp::tensor(FormalOp::ket(Expr::integer(1), QuantumRef(b)),
                                      FormalOp::ket(Expr::integer(0), QuantumRef(a)));
  const Matrix m = evaluate(qs(), {}, t);
  // row order is that of the term: b then a, so |1>_b |0>_a is index 2
  CHECK(to_string(m.rows) == "(b, a)");
  CHECK(m.data(2, 0) == Complex(1));
}

TEST_CASE("CNOT on a Bell preparation") {
  const auto a = make_qubit("a"), b = make_qubit("b");
  const FormalOp prep = sol::apply(builtin_constant("CNOT"), {QuantumRef(a), QuantumRef(b)}) *
                        FormalOp::tensor(sol::apply(builtin_constant("H"), {QuantumRef(a)}) *
                                             FormalOp::ket(Expr::integer(0), QuantumRef(a)),
                                         FormalOp::ket(Expr::integer(0), QuantumRef(b)));
  const Matrix m = evaluate(qs(), {}, prep);
  CMatrix want = CMatrix::Zero(4, 1);
  want(0, 0) = r2;
  want(3, 0) = r2;
  CHECK(max_abs(m.data - want) < 1e-12);
  CHECK(check_predicate(qs(), {}, PredicateKind::PureState, prep).holds);
}

TEST_CASE("signing rejects shared registers with the rule name") {
  const auto q = make_qvar("q", VarType{{BasicType::Int}, BasicType::Bool});
  const Expr m = Expr::var("m", BasicType::Int), l = Expr::var("l", BasicType::Int);
  const FormalOp c = sol::apply(builtin_constant("CNOT"), {QuantumRef(q, {m}), QuantumRef(q, {l})});
  State s;
  s.scalars["m"] = std::int64_t{1};
  s.scalars["l"] = std::int64_t{2};
  CHECK_NOTHROW(check_signing(qs(), s, c));
  s.scalars["l"] = std::int64_t{1};
  try {
    check_signing(qs(), s, c);
    FAIL("expected a signing error");
  } catch (const SigningError& e) {
    CHECK(e.rule() == "Sign-OpC");
  }
  const FormalOp k = FormalOp::ket(Expr::integer(0), QuantumRef(q, {m}));
  s.scalars["l"] = std::int64_t{1};
  try {
    check_signing(qs(), s, FormalOp::tensor(k, FormalOp::ket(Expr::integer(0), QuantumRef(q, {l}))));
    FAIL("expected a signing error");
  } catch (const SigningError& e) {
    CHECK(e.rule() == "Sign-Tensor");
  }
}

TEST_CASE("products may permute registers") {
  const auto a = make_qubit("a"), b = make_qubit("b");
  const FormalOp ab = FormalOp::tensor(FormalOp::ket(Expr::integer(0), QuantumRef(a)),
                                       FormalOp::ket(Expr::integer(1), QuantumRef(b)));
  const FormalOp ba_bra = FormalOp::tensor(FormalOp::bra(Expr::integer(1), QuantumRef(b)),
                                           FormalOp::bra(Expr::integer(0), QuantumRef(a)));
  const Matrix inner = evaluate(qs(), {}, ba_bra * ab);
  CHECK(inner.data.size() == 1);
  CHECK(std::abs(inner.data(0, 0) - Complex(1)) < 1e-15);
}

TEST_CASE("norm, trace and predicates") {
  const auto q = make_qubit("q");
  const FormalOp i = sol::apply(builtin_constant("I"), {QuantumRef(q)});
  CHECK(std::abs(frobenius_norm(qs(), {}, i) - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(trace(qs(), {}, i) - Complex(2)) < 1e-12);
  CHECK(check_predicate(qs(), {}, PredicateKind::Unitary, sol::apply(builtin_constant("H"), {QuantumRef(q)})).holds);
  CHECK(check_predicate(qs(), {}, PredicateKind::Observable, sol::apply(builtin_constant("Y"), {QuantumRef(q)})).holds);
  const FormalOp half = FormalOp::scale(Expr::complex(0.5), i);
  CHECK(check_predicate(qs(), {}, PredicateKind::MixedState, half).holds);
  CHECK_FALSE(check_predicate(qs(), {}, PredicateKind::MixedState, i).holds);
  CHECK_FALSE(check_predicate(qs(), {}, PredicateKind::PureState, i).holds);
}

TEST_CASE("Loewner order") {
  const auto q = make_qubit("q");
  const FormalOp p0 = FormalOp::ket(Expr::integer(0), QuantumRef(q)) * FormalOp::bra(Expr::integer(0), QuantumRef(q));
  const FormalOp i = sol::apply(builtin_constant("I"), {QuantumRef(q)});
  const FormalOp x = sol::apply(builtin_constant("X"), {QuantumRef(q)});
  CHECK(compare(qs(), {}, p0, i, Relation::Loewner).holds);
  CHECK_FALSE(compare(qs(), {}, i, p0, Relation::Loewner).holds);
  CHECK(compare(qs(), {}, x, i, Relation::Loewner).holds);
  CHECK_FALSE(compare(qs(), {}, i, x, Relation::Loewner).holds);
  CMatrix psd(2, 2);
  psd << 1, 1, 1, 1;
  CHECK(std::abs(min_eigenvalue(psd)) < 1e-12);
}

TEST_CASE("dimension cap") {
  Config c = small();
  c.max_dim = 8;
  const QuantumStructure tight = standard_structure(c);
  const auto q = make_qvar("q", VarType{{BasicType::Int}, BasicType::Bool});
  RegisterString regs;
  for (int k = 0; k < 4; ++k) regs.push_back(QuantumRef(q, {Expr::integer(k)}));
  CHECK_THROWS_AS(evaluate(tight, {}, sol::apply(builtin_constant("I"), regs)), ResourceError);
}

TEST_CASE("signing soundness on random terms") {
  TermGenerator gen(23, {-4, 4});
  for (int i = 0; i < 200; ++i) {
    const Context ctx{gen.state(), gen.valuation()};
    const FormalOp a = gen.op(4);
    const GroundSignature g = check_signing(qs(), ctx.sigma, a);
    const Matrix m = evaluate(qs(), ctx, a);
    CHECK(static_cast<std::size_t>(m.data.rows()) == dim_of(g.dom, qs().range()));
    CHECK(static_cast<std::size_t>(m.data.cols()) == dim_of(g.cod, qs().range()));
  }
  for (int i = 0; i < 50; ++i) {
    std::string rule;
    const FormalOp bad = gen.ill_signed(rule);
    const State s = gen.state();
    try {
      check_signing(qs(), s, bad);
      FAIL("ill-signed term accepted: " << to_string(bad));
    } catch (const SigningError& e) {
      CHECK(e.rule() == rule);
    }
  }
}

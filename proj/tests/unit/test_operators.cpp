#include <doctest.h>

#include "sol/gates.hpp"
#include "sol/generators.hpp"

using namespace sol;

namespace {

const VarType kArray{{BasicType::Int}, BasicType::Bool};

}  // namespace

TEST_CASE("static signature of composite terms") {
  const auto q = make_qubit("q"), r = make_qubit("r");
  const FormalOp ket = FormalOp::ket(Expr::integer(0), QuantumRef(q));
  const FormalOp bra = FormalOp::bra(Expr::integer(1), QuantumRef(r));
  const Signature s = static_signature(ket * bra);
  CHECK(s.dom == RegisterString{QuantumRef(q)});
  CHECK(s.cod == RegisterString{QuantumRef(r)});
  CHECK(static_signature(FormalOp::adjoint(ket)).cod == RegisterString{QuantumRef(q)});
  const Signature t = static_signature(FormalOp::tensor(ket, FormalOp::ket(Expr::integer(1), QuantumRef(r))));
  CHECK(t.dom.size() == 2);
  CHECK(t.cod.empty());
}

TEST_CASE("products and sums check types statically") {
  const auto q = make_qubit("q");
  const auto n = make_qvar("n", VarType{{}, BasicType::Int});
  const FormalOp kq = FormalOp::ket(Expr::integer(0), QuantumRef(q));
  const FormalOp kn = FormalOp::ket(Expr::integer(0), QuantumRef(n));
  CHECK_THROWS_AS(FormalOp::sum(kq, kq * FormalOp::bra(Expr::integer(0), QuantumRef(q))), TypeError);
  CHECK_THROWS_AS(FormalOp::product(FormalOp::adjoint(kq), FormalOp::adjoint(kn)), TypeError);
  CHECK_THROWS_AS(FormalOp::ket(Expr::boolean(true), QuantumRef(n)), TypeError);
  // complex labels on Int registers are checked for integrality when evaluated
  CHECK_NOTHROW(FormalOp::ket(Expr::complex(0.5), QuantumRef(n)));
}

TEST_CASE("gates apply with the abbreviated signature") {
  const auto q = make_qvar("q", kArray);
  const QuantumRef a(q, {Expr::integer(0)}), b(q, {Expr::integer(1)});
  const FormalOp c = sol::apply(builtin_constant("CNOT"), {a, b});
  CHECK(to_string(c) == "CNOT[q[0], q[1] -> q[0], q[1]]");
  CHECK_THROWS_AS(sol::apply(builtin_constant("CNOT"), {a}), TypeError);
  CHECK_THROWS_AS(sol::apply(builtin_constant("R_x"), {a}, {Expr::boolean(true)}), TypeError);
}

TEST_CASE("classical substitution reaches labels, indices and parameters") {
  const auto q = make_qvar("q", kArray);
  const Expr m = Expr::var("m", BasicType::Int);
  const FormalOp a = FormalOp::ket(m, QuantumRef(q, {m + Expr::integer(1)}));
  const FormalOp b = subst_classical(a, Substitution{{"m", Expr::integer(1)}});
  CHECK(to_string(b) == "|1>_q[(1 + 1)]");
  CHECK(free_classical_vars(a).count("m") == 1);
  CHECK(free_classical_vars(b).empty());
}

TEST_CASE("operator substitution replaces occurrences with matching signature") {
  TermGenerator gen(5);
  const auto& x = gen.op_x();
  const auto r = gen.pool()[3];
  const FormalOp a = FormalOp::var(x, Signature{{r}, {r}});
  const FormalOp h = sol::apply(builtin_constant("H"), {r});
  const FormalOp b = subst_operator(a * a, h, *x);
  CHECK(b == h * h);
  CHECK(free_operator_vars(b).empty());
}

TEST_CASE("random terms have the requested signature") {
  TermGenerator gen(17);
  for (int i = 0; i < 200; ++i) {
    const RegisterString dom = gen.registers(0, 2), cod = gen.registers(0, 2);
    const FormalOp a = gen.op(dom, cod, 4);
    if (auto s = try_static_signature(a)) {
      CHECK(s->type() == Signature{dom, cod}.type());
    }
  }
}

TEST_CASE("unroll picks the case whose guard holds") {
  auto def = std::make_shared<RecursiveDef>();
  const auto q = make_qubit("q");
  def->name = "f";
  def->params = {{"n", BasicType::Int}};
  const Expr n = Expr::var("n", BasicType::Int);
  def->cases.push_back({Formula::atom(eq(n, Expr::integer(0))), FormalOp::ket(Expr::integer(0), QuantumRef(q)), {}});
  def->cases.push_back({Formula::atom(Expr::app(">", {n, Expr::integer(0)})),
                        FormalOp::ket(Expr::integer(1), QuantumRef(q)), {}});
  const Structure s{{-4, 4}, 1e-9};
  CHECK(to_string(unroll(s, *def, {Value{std::int64_t{0}}})) == "|0>_q");
  CHECK(to_string(unroll(s, *def, {Value{std::int64_t{2}}})) == "|1>_q");
  CHECK_THROWS(unroll(s, *def, {Value{std::int64_t{-1}}}));
}

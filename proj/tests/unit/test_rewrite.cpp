#include <doctest.h>

#include "sol/gates.hpp"
#include "sol/generators.hpp"
#include "sol/rewrite.hpp"

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

}  // namespace

TEST_CASE("normal forms evaluate to the term's matrix") {
  TermGenerator gen(41, {-4, 4});
  for (int i = 0; i < 150; ++i) {
    const Context ctx{gen.state(), gen.valuation()};
    const FormalOp a = gen.op(4);
    const Matrix direct = evaluate(qs(), ctx, a);
    const NormalForm nf = normalize(qs(), ctx, a);
    const Matrix viaf = with_col_order(with_row_order(to_matrix(nf, qs().range()), direct.rows, qs().range()),
                                       direct.cols, qs().range());
    CHECK(max_abs(viaf.data - direct.data) < 1e-9);
  }
}

TEST_CASE("ground equality agrees with dense comparison") {
  TermGenerator gen(43, {-4, 4});
  for (int i = 0; i < 100; ++i) {
    const Context ctx{gen.state(), gen.valuation()};
    const FormalOp a = gen.op(3);
    const FormalOp b = gen.coin() ? gen.equivalent(a) : gen.op(3);
    bool dense;
    try {
      dense = compare(qs(), ctx, a, b, Relation::Equal).holds;
    } catch (const Error&) {
      continue;
    }
    CHECK(decide_ground_equality(qs(), ctx, a, b).holds == dense);
  }
}

TEST_CASE("coefficient addition needs equal labels") {
  const auto q = make_qubit("q");
  const Expr s1 = Expr::var("s1", BasicType::Bool), s2 = Expr::var("s2", BasicType::Bool);
  const FormalOp t = FormalOp::sum(FormalOp::scale(Expr::integer(2), FormalOp::ket(s1, QuantumRef(q))),
                                   FormalOp::scale(Expr::integer(3), FormalOp::ket(s2, QuantumRef(q))));
  const RewriteRule rule = coefficient_addition_rule();
  const auto guarded = Discharge::symbolic(qs(), {Formula::atom(eq(s1, s2))});
  const RewriteResult yes = rewrite_step(t, rule, guarded);
  CHECK(yes.applied);
  CHECK(to_string(yes.term) == "((5) . |s1>_q)");
  const RewriteResult no = rewrite_step(t, rule, Discharge::symbolic(qs(), {}));
  CHECK_FALSE(no.applied);
  CHECK_FALSE(no.reason.empty());
}

TEST_CASE("self outer product and identity") {
  const auto q = make_qubit("q"), r = make_qubit("r");
  const auto k = [](int v, const QuantumVarPtr& x) { return FormalOp::ket(Expr::integer(v), QuantumRef(x)); };
  const auto b = [](int v, const QuantumVarPtr& x) { return FormalOp::bra(Expr::integer(v), QuantumRef(x)); };
  const auto concrete = Discharge::concrete(qs(), {});
  const RewriteResult s = rewrite_step((k(1, q) * b(0, r)) * k(0, r), self_outer_product_rule(), concrete);
  CHECK(s.applied);
  CHECK(s.term == k(1, q));
  const RewriteResult adj =
      rewrite_step((k(1, q) * FormalOp::adjoint(k(0, r))) * k(0, r), self_outer_product_adjoint_rule(), concrete);
  CHECK(adj.applied);
  const RewriteResult id = rewrite_step(k(0, q) * b(0, q) + k(1, q) * b(1, q), identity_rule(), concrete);
  CHECK(id.applied);
  CHECK(id.term == sol::apply(builtin_constant("I"), {QuantumRef(q)}));
}

TEST_CASE("matrix representation of a gate") {
  const auto q = make_qubit("q");
  const FormalOp x = sol::apply(builtin_constant("X"), {QuantumRef(q)});
  const RewriteResult r = rewrite_step(x, matrix_representation_rule(), Discharge::concrete(qs(), {}));
  REQUIRE(r.applied);
  CHECK(decide_ground_equality(qs(), {}, r.term, x).holds);
}

TEST_CASE("normal form printing merges coefficients") {
  const auto q = make_qubit("q");
  const FormalOp t = FormalOp::ket(Expr::integer(0), QuantumRef(q)) + FormalOp::ket(Expr::integer(0), QuantumRef(q));
  const NormalForm nf = normalize(qs(), {}, t);
  CHECK(nf.terms.size() == 1);
  CHECK(to_string(nf, qs().range()) == "(2.0) |false>_q");
}

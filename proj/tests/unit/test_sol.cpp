#include <doctest.h>

#include "sol/entailment.hpp"
#include "sol/gates.hpp"
#include "sol/generators.hpp"

using namespace sol;

namespace {

Config small() {
  Config c;
  c.int_range = {-6, 6};
  return c;
}

const QuantumStructure& qs() {
  static const QuantumStructure s = standard_structure(small());
  return s;
}

const VarType kArray{{BasicType::Int}, BasicType::Bool};

FormalOp gate(const std::string& name, RegisterString regs) { return sol::apply(builtin_constant(name), std::move(regs)); }

}  // namespace

TEST_CASE("classical atoms and connectives") {
  const Expr b = Expr::var("b", BasicType::Bool);
  const SolFormula f = SolFormula::disj(SolFormula::classical(Formula::atom(b)),
                                        SolFormula::negation(SolFormula::classical(Formula::atom(b))));
  Context ctx;
  ctx.sigma.scalars["b"] = false;
  const Truth t = sat_sol(qs(), ctx, f);
  CHECK(t.value);
  CHECK(t.certain);
}

TEST_CASE("an ill-signed atom is false") {
  const auto q = make_qvar("q", kArray);
  const Expr m = Expr::var("m", BasicType::Int);
  const FormalOp c = gate("CNOT", {QuantumRef(q, {m}), QuantumRef(q, {m})});
  const SolFormula f = SolFormula::predicate(PredicateKind::Unitary, c);
  Context ctx;
  ctx.sigma.scalars["m"] = std::int64_t{0};
  CHECK_FALSE(sat_sol(qs(), ctx, f).value);
  CHECK(sat_sol(qs(), ctx, SolFormula::negation(f)).value);
}

TEST_CASE("address arithmetic: both CNOTs act on one pair, except where the pair collapses") {
  const auto q = make_qvar("q", kArray);
  const Expr k = Expr::var("k", BasicType::Int), m = Expr::var("m", BasicType::Int);
  const Expr n = Expr::var("n", BasicType::Int), l = Expr::var("l", BasicType::Int);
  const auto i = [](std::int64_t v) { return Expr::integer(v); };
  const QuantumRef a1(q, {i(2) * k + i(3)}), b1(q, {i(5) * l - i(2)});
  const QuantumRef a2(q, {i(3) * m - i(1)}), b2(q, {i(7) * n + i(5)});
  EntailmentQuery query;
  query.sigma = {Formula::atom(eq(k, i(3) * m / i(2) - i(2))), Formula::atom(eq(n, i(5) * l / i(7) - i(1)))};
  query.goal = SolFormula::equal(gate("CNOT", {a1, b1}) * gate("CNOT", {a2, b2}), gate("I", {a2, b1}));
  Config wide = small();
  wide.int_range = {-20, 40};
  const QuantumStructure big = standard_structure(wide);
  const CheckResult r = check_entailment(big, query);
  CHECK(r.verdict == Verdict::Refuted);
  REQUIRE(r.witness);
  CHECK(as_int(r.witness->sigma.get("m")) == -12);
  CHECK(as_int(r.witness->sigma.get("l")) == -7);
  // with the two addresses assumed distinct the entailment holds
  query.sigma.push_back(Formula::atom(ne(i(3) * m - i(1), i(5) * l - i(2))));
  const CheckResult guarded = check_entailment(big, query);
  CHECK(guarded.verdict == Verdict::Valid);
  CHECK(guarded.exact);
  CHECK(guarded.stats.satisfying == 167);
}

TEST_CASE("sampled universals that hold are Unknown; refutations are certain") {
  const auto q = make_qubit("q");
  const auto x = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{"X", {{BasicType::Bool}, {BasicType::Bool}}});
  const FormalOp xq = FormalOp::var(x, Signature{{QuantumRef(q)}, {QuantumRef(q)}});
  EntailmentQuery all_unitary;
  all_unitary.goal = SolFormula::quant_op(SolFormula::Quantifier::ForAll, x,
                                          SolFormula::predicate(PredicateKind::Unitary, xq));
  const CheckResult r = check_entailment(qs(), all_unitary);
  CHECK(r.verdict == Verdict::Refuted);
  CHECK_FALSE(r.diagnostics.empty());

  EntailmentQuery uni1;
  uni1.gamma = {SolFormula::predicate(PredicateKind::Unitary, xq)};
  uni1.goal = SolFormula::predicate(PredicateKind::Unitary, FormalOp::adjoint(xq));
  const CheckResult u = check_entailment(qs(), uni1);
  CHECK(u.verdict == Verdict::Unknown);
  CHECK(u.reason == "sampled");
  CHECK_FALSE(u.exact);
}

TEST_CASE("no satisfying state makes the entailment vacuously valid") {
  const Expr x = Expr::var("x", BasicType::Int);
  EntailmentQuery q;
  q.sigma = {Formula::atom(eq(x * x, Expr::integer(2)))};
  q.goal = SolFormula::classical(Formula::truth(false));
  const CheckResult r = check_entailment(qs(), q);
  CHECK(r.verdict == Verdict::Valid);
  CHECK(r.stats.satisfying == 0);
}

TEST_CASE("state budget exhaustion is Unknown") {
  const Expr x = Expr::var("x", BasicType::Int), y = Expr::var("y", BasicType::Int);
  EntailmentQuery q;
  q.goal = SolFormula::classical(Formula::atom(Expr::app("<=", {x + y, Expr::integer(100)})));
  q.state_budget = 10;
  CHECK(check_entailment(qs(), q).verdict == Verdict::Unknown);
}

TEST_CASE("deduction: verdicts of Gamma,A |= B and Gamma |= A -> B agree") {
  TermGenerator gen(31, {-2, 2});
  Config c;
  c.int_range = {-2, 2};
  const QuantumStructure tiny = standard_structure(c);
  int agree = 0;
  for (int i = 0; i < 20; ++i) {
    const SolFormula a = gen.sol(1), b = gen.sol(1);
    EntailmentQuery left, right;
    left.gamma = {a};
    left.goal = b;
    right.goal = SolFormula::implies(a, b);
    left.sampling.samples = right.sampling.samples = 3;
    left.state_budget = right.state_budget = 20000;
    const Verdict vl = check_entailment(tiny, left).verdict, vr = check_entailment(tiny, right).verdict;
    CHECK(vl == vr);
    agree += vl == vr;
  }
  CHECK(agree == 20);
}

TEST_CASE("printing uses the script syntax") {
  const auto q = make_qubit("q");
  const FormalOp h = gate("H", {QuantumRef(q)});
  CHECK(to_string(SolFormula::predicate(PredicateKind::Unitary, h)) == "unitary(H[q -> q])");
  CHECK(to_string(SolFormula::norm(h, CmpRel::Eq, 1.0)).find("norm(") == 0);
}

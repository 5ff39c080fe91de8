#include <doctest.h>

#include "sol/generators.hpp"

using namespace sol;

namespace {

const Structure kS{{-8, 8}, 1e-9};

Expr x() { return Expr::var("x", BasicType::Int); }
Expr y() { return Expr::var("y", BasicType::Int); }
Expr b() { return Expr::var("b", BasicType::Bool); }

State xy(std::int64_t xv, std::int64_t yv) {
  State s;
  s.scalars["x"] = xv;
  s.scalars["y"] = yv;
  return s;
}

}  // namespace

TEST_CASE("integer arithmetic and comparison") {
  const State s = xy(3, -2);
  CHECK(as_int(eval_expr(kS, s, x() + y())) == 1);
  CHECK(as_int(eval_expr(kS, s, x() * y() - Expr::integer(4))) == -10);
  CHECK(as_bool(eval_expr(kS, s, Expr::app("<", {y(), x()}))));
  CHECK(as_int(eval_expr(kS, s, Expr::app("mod", {Expr::integer(-7), Expr::integer(3)}))) == 2);
}

TEST_CASE("division of integers is complex, so parity conditions filter") {
  const Expr k = Expr::integer(3) * x() / Expr::integer(2) - Expr::integer(2);
  CHECK(k.type() == BasicType::Complex);
  CHECK(as_complex(eval_expr(kS, xy(4, 0), k)) == Complex(4, 0));
  const Formula f = Formula::atom(eq(Expr::var("k", BasicType::Int), k));
  State s = xy(3, 0);
  s.scalars["k"] = std::int64_t{2};
  CHECK_FALSE(satisfies(kS, s, f));
  CHECK_THROWS_AS(eval_expr(kS, xy(1, 0), x() / Expr::integer(0)), EvalError);
}

TEST_CASE("integer overflow is an error, not a wrap") {
  State s;
  s.scalars["x"] = std::numeric_limits<std::int64_t>::max();
  s.scalars["y"] = std::int64_t{1};
  CHECK_THROWS_AS(eval_expr(kS, s, x() + y()), EvalError);
  s.scalars["x"] = std::numeric_limits<std::int64_t>::min();
  CHECK_THROWS_AS(eval_expr(kS, s, Expr::app("neg", {x()})), EvalError);
}

TEST_CASE("type errors are reported at construction") {
  CHECK_THROWS_AS(Expr::app("+", {b(), x()}), TypeError);
  CHECK_THROWS_AS(Expr::app("and", {x(), b()}), TypeError);
  CHECK_THROWS_AS(Expr::cond(x(), x(), y()), TypeError);
  CHECK_THROWS_AS(Expr::app("nosuch", {x()}), TypeError);
}

TEST_CASE("arrays: subscripts and cell updates") {
  const VarType jt{{BasicType::Int}, BasicType::Bool};
  const Expr jx = Expr::subscript("j", jt, {x()});
  State s = xy(2, 0);
  s.arrays["j"] = ArrayValue{};
  s = s.updated_cell("j", {2}, Value{true});
  CHECK(as_bool(eval_expr(kS, s, jx)));
  CHECK_FALSE(as_bool(eval_expr(kS, s.updated("x", std::int64_t{3}), jx)));
}

TEST_CASE("quantifiers range over the realised domain") {
  const Formula some = Formula::quant(Formula::Quantifier::Exists, "x", BasicType::Int,
                                      Formula::atom(eq(x() * x(), Expr::integer(50))));
  CHECK_FALSE(satisfies(kS, {}, some));
  CHECK(satisfies(Structure{{-8, 8}, 1e-9}, {},
                  Formula::quant(Formula::Quantifier::ForAll, "b", BasicType::Bool,
                                 Formula::disj(Formula::atom(b()), Formula::atom(Expr::app("not", {b()}))))));
}

TEST_CASE("substitution avoids capture") {
  // (exists y. x < y)[y/x] renames the bound y
  const Formula f = Formula::quant(Formula::Quantifier::Exists, "y", BasicType::Int,
                                   Formula::atom(Expr::app("<", {x(), y()})));
  const Formula g = subst_formula(f, Substitution{{"x", y()}});
  CHECK(free_vars(g).count("y") == 1);
  CHECK(free_vars(g).count("x") == 0);
  State s;
  s.scalars["y"] = std::int64_t{8};
  CHECK_FALSE(satisfies(kS, s, g));
  s.scalars["y"] = std::int64_t{7};
  CHECK(satisfies(kS, s, g));
}

TEST_CASE("substitution lemma on random expressions") {
  TermGenerator gen(11);
  for (int i = 0; i < 300; ++i) {
    const State s = gen.state();
    const Expr e = gen.expr(BasicType::Int, 3);
    const Expr t = gen.expr(BasicType::Int, 2);
    // sigma(e[t/x]) = sigma[x := sigma(t)](e), with both sides defined
    Value lhs, rhs;
    bool lhs_ok = true, rhs_ok = true;
    try {
      lhs = eval_expr(kS, s, subst_expr(e, Substitution{{"x", t}}));
    } catch (const EvalError&) {
      lhs_ok = false;
    }
    try {
      rhs = eval_expr(kS, s.updated("x", eval_expr(kS, s, t)), e);
    } catch (const EvalError&) {
      rhs_ok = false;
    }
    if (lhs_ok && rhs_ok) {
      CHECK(values_equal(lhs, rhs, 1e-9));
    }
  }
}

TEST_CASE("printing") {
  CHECK(to_string(x() + Expr::integer(1)) == "(x + 1)");
  CHECK(to_string(Expr::app("neg", {Expr::integer(3)})) == "neg(3)");
  CHECK(to_string(Formula::negation(Formula::atom(b()))) == "~b");
  CHECK(to_string(Formula::conj(Formula::atom(b()), Formula::truth(true))) == "(b /\\ true)");
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(1.0) == "1.0");
}

TEST_CASE("constant folding") {
  const Expr e = fold_constants(Expr::integer(2) * Expr::integer(3) + x(), kS);
  CHECK(e == Expr::integer(6) + x());
}

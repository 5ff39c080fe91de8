#include <doctest.h>

#include "sol/generators.hpp"
#include "sol/script.hpp"

using namespace sol;

namespace {

/// Declarations matching the random-term vocabulary.
const char* const kVocabulary = R"(
var x, y, z : Int;
var b, c : Bool;
var a : C;
var j : Int -> Bool;
qreg q : Int -> Bool;
qubit r, s;
opvar U : Bool -> Bool;
opvar V : Bool*Bool -> Bool*Bool;
)";

std::string error_of(const std::string& text) {
  try {
    parse_script(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a ket over a declared qubit") {
  const Script s = parse_script("qubit q;\neval |0>_q;\n");
  REQUIRE(s.items.size() == 2);
  const ScriptItem& e = s.items[1];
  CHECK(e.kind == ScriptItem::Kind::Eval);
  REQUIRE(e.op);
  CHECK(e.line == 2);
  const auto* k = std::get_if<KetOp>(&e.op->node().v);
  REQUIRE(k);
  CHECK(k->label == Expr::integer(0));
  CHECK(k->reg.name() == "q");
}

TEST_CASE("bell(x, y)[qa, qb] expands to the Bell template") {
  const Script s = parse_script("qubit qa, qb;\nvar x, y : Bool;\neval bell(x, y)[qa, qb];\n");
  const FormalOp want = bell(Expr::var("x", BasicType::Bool), Expr::var("y", BasicType::Bool),
                             QuantumRef(s.quantum.at("qa")), QuantumRef(s.quantum.at("qb")));
  CHECK(*s.items.back().op == want);
  const Script again = parse_script(print_script(s));
  CHECK(again.items.back() == s.items.back());
}

TEST_CASE("errors carry line and column") {
  CHECK(error_of("qubit q;\neval |0>_q <1|_q;\n") == "2:12: a bra cannot follow an operator term without '*'");
  CHECK(error_of("eval |0>_q;") == "1:10: 'q' is not a quantum variable");
  CHECK(error_of("qubit q;\nqubit q;") == "2:7: 'q' is already declared");
  CHECK(error_of("qubit q;\neval |0>_q * ;") == "2:14: unexpected ';'");
  CHECK(error_of("var x : Int;\nvar b : Bool;\nassume x + b = 1;").rfind("3:10:", 0) == 0);
  CHECK(error_of("qubit q;\neval $;") == "2:6: unexpected character '$'");
  CHECK(error_of("suite nosuch;") == "1:7: unknown suite 'nosuch'");
}

TEST_CASE("declarations") {
  const Script s = parse_script(R"(
    qreg q : Int -> Int;
    var m : Int;
    opvar U : Bool*Bool -> ();
    range m -3..3;
    set m = 2;
    qreg p : Int -> Bool;
    library p;
  )" "\n");
  CHECK(s.int_quantum_vars == std::vector<std::string>{"q"});
  CHECK(s.opvars.at("U")->type.dom.size() == 2);
  CHECK(s.items[3].range == IntRange{-3, 3});
  CHECK(error_of("qreg q : Int -> Bool;\nlibrary q;\nlibrary q;") != "");
  CHECK(error_of("qubit p;\nlibrary p;") != "");
}

TEST_CASE("user definitions, including recursion") {
  const Script s = parse_script(R"(
    qreg q : Int -> Bool;
    def plus(m:Int, n:Int) {
      n = m => 0.7071067811865476 . (|0>_q[m] + |1>_q[m]);
      n > m => plus(m, n - 1) >< 0.7071067811865476 . (|0>_q[n] + |1>_q[n]);
    }
    assert pure(plus(0, 2));
  )");
  CHECK(s.callables.count("plus") == 1);
  CHECK(parse_script(print_script(s)).items[1] == s.items[1]);
  CHECK(error_of("qubit q;\ndef f(m:Int) { k = 1 => |0>_q; }") != "");
}

TEST_CASE("print-parse round trip on random operators and formulas") {
  const Script ctx = parse_script(kVocabulary);
  TermGenerator gen(101);
  // the generator's vocabulary declarations must be the script's
  for (int i = 0; i < 300; ++i) {
    const FormalOp a = gen.op(4);
    FormalOp back;
    try {
      back = parse_operator(ctx, to_string(a));
    } catch (const Error& e) {
      FAIL_CHECK(to_string(a) << ": " << std::string(e.what()));
      continue;
    }
    CHECK_MESSAGE(to_string(back) == to_string(a), to_string(a));
  }
  for (int i = 0; i < 300; ++i) {
    const SolFormula f = gen.sol(2);
    SolFormula back;
    try {
      back = parse_formula(ctx, to_string(f));
    } catch (const Error& e) {
      FAIL_CHECK(to_string(f) << ": " << std::string(e.what()));
      continue;
    }
    CHECK_MESSAGE(to_string(back) == to_string(f), to_string(f));
  }
}

TEST_CASE("precedence") {
  const Script ctx = parse_script("qubit q;\nvar c : Int;\n");
  CHECK(to_string(parse_operator(ctx, "|0>_q * <1|_q + |1>_q * <0|_q")) ==
        to_string(parse_operator(ctx, "(|0>_q * <1|_q) + (|1>_q * <0|_q)")));
  CHECK(to_string(parse_operator(ctx, "c . X[q] * Z[q]")) == to_string(parse_operator(ctx, "(c . X[q]) * Z[q]")));
  CHECK(to_string(parse_operator(ctx, "X[q]^+ * Z[q]")) == to_string(parse_operator(ctx, "(X[q]^+) * Z[q]")));
  CHECK(to_string(parse_formula(ctx, "pure(|0>_q) & unitary(X[q]) -> c = 1")) ==
        to_string(parse_formula(ctx, "(pure(|0>_q) & unitary(X[q])) -> {c = 1}")));
}

#include <doctest.h>

#include "sol/runner.hpp"

using namespace sol;

namespace {

Config cfg() {
  Config c;
  c.int_range = {-8, 8};
  return c;
}

}  // namespace

TEST_CASE("exit code contract") {
  CHECK(exit_code_for({}) == 0);
  CHECK(exit_code_for({"Valid", "pass", "ok"}) == 0);
  CHECK(exit_code_for({"Valid", "Unknown"}) == 2);
  CHECK(exit_code_for({"Unknown", "Refuted"}) == 1);
  CHECK(exit_code_for({"fail", "Unknown"}) == 1);
  CHECK(exit_code_for({"Refuted", "error", "Valid"}) == 3);
}

TEST_CASE("directives run in order against the accumulated assumptions") {
  const Report r = run_text(R"(
    qubit q;
    var x : Bool;
    assert Z[q] * |x>_q == |x>_q;
    assume x = false;
    assert Z[q] * |x>_q == |x>_q;
  )", cfg());
  REQUIRE(r.directives.size() == 3);
  CHECK(r.directives[0].verdict == "Refuted");
  CHECK(r.directives[1].verdict == "ok");
  CHECK(r.directives[2].verdict == "Valid");
  CHECK(r.exit_code == 1);
}

TEST_CASE("set fixes a variable for later directives") {
  const Report r = run_text("qubit q;\nvar x : Bool;\nset x = true;\neval Z[q] * |x>_q;\n", cfg());
  REQUIRE(r.directives.size() == 1);
  CHECK(r.directives[0].verdict == "ok");
  CHECK(r.directives[0].detail.find("\"-1.0\"") != std::string::npos);
}

TEST_CASE("run-time errors are exit 3 and later directives still run") {
  const Report r = run_text("qubit q;\nvar n : Int;\neval |n>_q;\nsuite bloch;\n", cfg());
  REQUIRE(r.directives.size() == 2);
  CHECK(r.directives[0].verdict == "error");
  CHECK(r.directives[1].verdict == "pass");
  CHECK(r.exit_code == 3);
}

TEST_CASE("signing failures name the rule") {
  const Report r = run_text("qreg q : Int -> Bool;\nsign CNOT[q[1], q[1]];\nsign CNOT[q[1], q[2]];\n", cfg());
  REQUIRE(r.directives.size() == 2);
  CHECK(r.directives[0].verdict == "fail");
  CHECK(r.directives[0].detail.find("Sign-OpC") != std::string::npos);
  CHECK(r.directives[1].verdict == "ok");
}

TEST_CASE("parse errors produce an error report") {
  const Report r = run_text("qubit q;\neval |0>_q <0|_q;\n", cfg());
  CHECK(r.exit_code == 3);
  CHECK(r.directives.empty());
  CHECK(report_json(r).find("\"error\": \"2:12:") != std::string::npos);
}

TEST_CASE("reports are deterministic and timing is opt-in") {
  const std::string text = "qubit q;\nopvar U : Bool -> Bool;\nassert forallOp V : Bool -> Bool . unitary(V[q]);\n"
                           "entail |- unitary(U[q]) => unitary(U[q]^+);\n";
  const Report a = run_text(text, cfg()), b = run_text(text, cfg());
  CHECK(report_json(a) == report_json(b));
  CHECK(report_json(a).find("seconds") == std::string::npos);
  CHECK(report_json(a, true).find("total_seconds") != std::string::npos);
  CHECK(a.exit_code == 1);
  CHECK(report_text(a).find("line 3: assert Refuted") != std::string::npos);
}

TEST_CASE("Int-valued quantum variables are noted") {
  const Report r = run_text("qvar n : Int;\neval |3>_n;\n", cfg());
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("dimension 17") != std::string::npos);
}

#include <doctest.h>

#include "sol/registers.hpp"

using namespace sol;

namespace {

const Structure kS{{-4, 4}, 1e-9};
const VarType kArray{{BasicType::Int}, BasicType::Bool};

}  // namespace

TEST_CASE("dimensions follow the value type") {
  CHECK(dim_of_type(BasicType::Bool, kS.int_range) == 2);
  CHECK(dim_of_type(BasicType::Int, kS.int_range) == 9);
  CHECK_THROWS(dim_of_type(BasicType::Complex, kS.int_range));
  const auto q = make_qvar("q", kArray);
  const auto n = make_qvar("n", VarType{{}, BasicType::Int});
  CHECK(dim_of(RegisterString{QuantumRef(q, {Expr::integer(0)}), QuantumRef(n)}, kS.int_range) == 18);
}

TEST_CASE("grounding evaluates the indices") {
  const auto q = make_qvar("q", kArray);
  State s;
  s.scalars["m"] = std::int64_t{2};
  const QuantumRef r(q, {Expr::integer(3) * Expr::var("m", BasicType::Int) - Expr::integer(1)});
  const GroundRef g = ground(kS, s, r);
  CHECK(g.index == std::vector<std::int64_t>{5});
  CHECK(to_string(g) == "q[5]");
}

TEST_CASE("canonical order is by name, then index") {
  const auto q = make_qvar("q", kArray);
  const auto a = make_qubit("a");
  const GroundRef q1{q, {1}}, q2{q, {-2}}, ar{a, {}};
  CHECK(ar < q2);
  CHECK(q2 < q1);
  CHECK_FALSE(q1 < q1);
  CHECK(q1 == GroundRef{q, {1}});
}

TEST_CASE("distinctness formula") {
  const auto q = make_qvar("q", kArray);
  const Expr m = Expr::var("m", BasicType::Int), l = Expr::var("l", BasicType::Int);
  const RegisterString rs{QuantumRef(q, {m}), QuantumRef(q, {l}), QuantumRef(make_qubit("r"))};
  const Formula d = distinctness_formula(rs);
  State s;
  s.scalars["m"] = std::int64_t{1};
  s.scalars["l"] = std::int64_t{2};
  CHECK(satisfies(kS, s, d));
  s.scalars["l"] = std::int64_t{1};
  CHECK_FALSE(satisfies(kS, s, d));
}

TEST_CASE("basis labels") {
  CHECK(basis_index(Value{true}, BasicType::Bool, kS.int_range, 1e-9) == 1);
  CHECK(basis_index(Value{std::int64_t{0}}, BasicType::Bool, kS.int_range, 1e-9) == 0);
  CHECK(basis_index(Value{std::int64_t{-4}}, BasicType::Int, kS.int_range, 1e-9) == 0);
  CHECK(basis_index(Value{std::int64_t{4}}, BasicType::Int, kS.int_range, 1e-9) == 8);
  CHECK_THROWS(basis_index(Value{std::int64_t{5}}, BasicType::Int, kS.int_range, 1e-9));
  CHECK_THROWS(basis_index(Value{std::int64_t{2}}, BasicType::Bool, kS.int_range, 1e-9));
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(basis_index(basis_label(i, BasicType::Int, kS.int_range), BasicType::Int, kS.int_range, 1e-9) == i);
  CHECK(label_type_ok(BasicType::Complex, BasicType::Int));
  CHECK_FALSE(label_type_ok(BasicType::Bool, BasicType::Int));
  CHECK(basis_index(Value{Complex(3.0, 0.0)}, BasicType::Int, kS.int_range, 1e-9) == 7);
  CHECK_THROWS(basis_index(Value{Complex(0.5, 0.0)}, BasicType::Int, kS.int_range, 1e-9));
}

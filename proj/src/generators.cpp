#include "sol/generators.hpp"

#include <algorithm>
#include <cmath>

#include "sol/gates.hpp"

namespace sol {

namespace {

QuantumType qubits(std::size_t n) {
  return QuantumType{std::vector<BasicType>(n, BasicType::Bool), std::vector<BasicType>(n, BasicType::Bool)};
}

bool same_set(const RegisterString& a, const RegisterString& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const QuantumRef& r) { return std::find(b.begin(), b.end(), r) != b.end(); });
}

}  // namespace

TermGenerator::TermGenerator(std::uint64_t seed, IntRange values) : rng_(seed), values_(values) {
  q_ = make_qvar("q", VarType{{BasicType::Int}, BasicType::Bool});
  r_ = make_qubit("r");
  s_ = make_qubit("s");
  const Expr x = Expr::var("x", BasicType::Int);
  pool_ = {QuantumRef(q_, {x}), QuantumRef(q_, {x + Expr::integer(1)}), QuantumRef(q_, {x + Expr::integer(2)}),
           QuantumRef(r_), QuantumRef(s_)};
  x_ = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{"U", qubits(1)});
  y_ = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{"V", qubits(2)});
}

int TermGenerator::pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

bool TermGenerator::coin(double p) { return std::bernoulli_distribution(p)(rng_); }

State TermGenerator::state() {
  State st;
  std::uniform_int_distribution<std::int64_t> ints(values_.lo, values_.hi);
  std::normal_distribution<double> gauss;
  for (const char* v : {"x", "y", "z"}) st.scalars[v] = Value{ints(rng_)};
  for (const char* v : {"b", "c"}) st.scalars[v] = Value{coin()};
  st.scalars["a"] = Value{Complex(gauss(rng_), gauss(rng_))};
  ArrayValue j;
  j.fallback = Value{false};
  for (std::int64_t k = values_.lo; k <= values_.hi; ++k) j.cells[{k}] = Value{coin()};
  st.arrays["j"] = j;
  return st;
}

CMatrix TermGenerator::matrix_for(const OperatorVarDecl& x) {
  const auto n = static_cast<Eigen::Index>(1) << x.type.dom.size();
  const auto m = static_cast<Eigen::Index>(1) << x.type.cod.size();
  if (n == m && coin()) return haar_unitary(n, rng_);
  return gaussian_matrix(n, m, rng_);
}

Valuation TermGenerator::valuation() { return {{"U", matrix_for(*x_)}, {"V", matrix_for(*y_)}}; }

Expr TermGenerator::variable(BasicType t) {
  switch (t) {
    case BasicType::Bool: return Expr::var(pick(2) ? "b" : "c", t);
    case BasicType::Int: {
      static const char* names[] = {"x", "y", "z"};
      return Expr::var(names[pick(3)], t);
    }
    case BasicType::Complex: return Expr::var("a", t);
  }
  return {};
}

Expr TermGenerator::expr(BasicType t, int depth) {
  const bool leaf = depth <= 0 || coin(0.3);
  switch (t) {
    case BasicType::Int:
      if (leaf) return coin() ? variable(t) : Expr::integer(pick(7) - 3);
      switch (pick(4)) {
        case 0: return expr(t, depth - 1) + expr(t, depth - 1);
        case 1: return expr(t, depth - 1) - expr(t, depth - 1);
        case 2: return Expr::integer(pick(5) - 2) * expr(t, depth - 1);
        default: return Expr::cond(expr(BasicType::Bool, depth - 1), expr(t, depth - 1), expr(t, depth - 1));
      }
    case BasicType::Bool:
      if (leaf) {
        switch (pick(4)) {
          case 0: return Expr::boolean(coin());
          case 1: return Expr::subscript("j", VarType{{BasicType::Int}, BasicType::Bool}, {variable(BasicType::Int)});
          default: return variable(t);
        }
      }
      switch (pick(6)) {
        case 0: return Expr::app("<", {expr(BasicType::Int, depth - 1), expr(BasicType::Int, depth - 1)});
        case 1: return eq(expr(BasicType::Int, depth - 1), expr(BasicType::Int, depth - 1));
        case 2: return Expr::app("not", {expr(t, depth - 1)});
        case 3: return Expr::app("and", {expr(t, depth - 1), expr(t, depth - 1)});
        case 4: return Expr::app("xor", {expr(t, depth - 1), expr(t, depth - 1)});
        default:
          return Expr::subscript("j", VarType{{BasicType::Int}, BasicType::Bool}, {expr(BasicType::Int, depth - 1)});
      }
    case BasicType::Complex:
      if (leaf) {
        if (coin()) return variable(t);
        std::uniform_int_distribution<int> q(-4, 4);
        return Expr::complex(Complex(q(rng_) / 4.0, q(rng_) / 4.0));
      }
      switch (pick(4)) {
        case 0: return expr(t, depth - 1) + expr(t, depth - 1);
        case 1: return expr(t, depth - 1) * expr(t, depth - 1);
        case 2: return Expr::app("conj", {expr(t, depth - 1)});
        default: return expr(BasicType::Int, depth - 1) + expr(t, depth - 1);
      }
  }
  return {};
}

Formula TermGenerator::formula(int depth) {
  if (depth <= 0 || coin(0.3)) return Formula::atom(expr(BasicType::Bool, 1));
  switch (pick(4)) {
    case 0: return Formula::negation(formula(depth - 1));
    case 1: return Formula::binary(static_cast<Formula::BinOp>(pick(3)), formula(depth - 1), formula(depth - 1));
    default: {
      const BasicType t = coin() ? BasicType::Int : BasicType::Bool;
      const Expr v = variable(t);
      return Formula::quant(static_cast<Formula::Quantifier>(pick(2)), to_string(v), t, formula(depth - 1));
    }
  }
}

RegisterString TermGenerator::registers(std::size_t lo, std::size_t hi) {
  hi = std::min(hi, pool_.size());
  const auto n = lo + static_cast<std::size_t>(pick(static_cast<int>(hi - lo + 1)));
  RegisterString all = shuffled(pool_);
  all.resize(n);
  return all;
}

RegisterString TermGenerator::shuffled(RegisterString rs) {
  std::shuffle(rs.begin(), rs.end(), rng_);
  return rs;
}

FormalOp TermGenerator::basis(const RegisterString& regs, bool kets) {
  std::vector<FormalOp> parts;
  for (const auto& r : regs) {
    const Expr label = expr(BasicType::Bool, 1);
    parts.push_back(kets ? FormalOp::ket(label, r) : FormalOp::bra(label, r));
  }
  return tensor(parts);
}

FormalOp TermGenerator::leaf(const RegisterString& dom, const RegisterString& cod) {
  if (dom.empty() && cod.empty()) return FormalOp::scalar(expr(BasicType::Complex, 1));
  std::vector<std::function<FormalOp()>> options;
  options.emplace_back([&] {
    if (dom.empty()) return basis(cod, false);
    if (cod.empty()) return basis(dom, true);
    return FormalOp::product(basis(dom, true), basis(cod, false));
  });
  options.emplace_back([&] { return FormalOp::constant(builtin_constant("Zero"), {}, Signature{dom, cod}); });
  if (!dom.empty() && same_set(dom, cod)) {
    options.emplace_back([&] { return FormalOp::constant(builtin_constant("I"), {}, Signature{dom, cod}); });
    options.emplace_back([&] { return sol::apply(builtin_constant("Ph"), dom); });
    options.emplace_back([&] {
      return sol::apply(builtin_constant("QFT"), dom, {Expr::integer(static_cast<std::int64_t>(dom.size()))});
    });
    if (dom == cod && dom.size() == 1) {
      options.emplace_back([&] {
        static const char* gates[] = {"X", "Y", "Z", "H"};
        return sol::apply(builtin_constant(gates[pick(4)]), dom);
      });
      options.emplace_back([&] {
        static const char* rot[] = {"R_x", "R_y", "R_z"};
        return sol::apply(builtin_constant(rot[pick(3)]), dom, {expr(BasicType::Complex, 1)});
      });
      if (operator_vars_) {
        options.emplace_back([&] { return FormalOp::var(x_, Signature{dom, cod}); });
        options.emplace_back([&] { return FormalOp::var(x_, Signature{dom, cod}); });
      }
    }
    if (dom == cod && dom.size() == 2) {
      options.emplace_back([&] { return sol::apply(builtin_constant("CNOT"), dom); });
      if (operator_vars_) {
        options.emplace_back([&] { return FormalOp::var(y_, Signature{dom, cod}); });
        options.emplace_back([&] { return FormalOp::var(y_, Signature{dom, cod}); });
      }
    }
  }
  return options[static_cast<std::size_t>(pick(static_cast<int>(options.size())))]();
}

FormalOp TermGenerator::op(const RegisterString& dom, const RegisterString& cod, int depth, std::size_t max_qubits) {
  if (depth <= 0 || coin(0.25)) return leaf(dom, cod);
  switch (pick(5)) {
    case 0: return FormalOp::scale(expr(BasicType::Complex, 1), op(dom, cod, depth - 1, max_qubits));
    case 1: return FormalOp::adjoint(op(cod, dom, depth - 1, max_qubits));
    case 2:
      return FormalOp::sum(op(dom, cod, depth - 1, max_qubits),
                           op(shuffled(dom), shuffled(cod), depth - 1, max_qubits));
    case 3: {
      const std::size_t used = std::max(dom.size(), cod.size());
      const std::size_t room = max_qubits > used ? max_qubits - used : 0;
      const RegisterString mid = registers(0, room);
      return FormalOp::product(op(dom, mid, depth - 1, max_qubits), op(shuffled(mid), cod, depth - 1, max_qubits));
    }
    default: {
      RegisterString d1, d2, c1, c2;
      for (const auto& r : dom) (coin() ? d1 : d2).push_back(r);
      for (const auto& r : cod) (coin() ? c1 : c2).push_back(r);
      return FormalOp::tensor(op(d1, c1, depth - 1, max_qubits), op(d2, c2, depth - 1, max_qubits));
    }
  }
}

FormalOp TermGenerator::op(int depth, std::size_t max_qubits) {
  const RegisterString dom = registers(0, max_qubits / 2);
  const RegisterString cod = coin() ? shuffled(dom) : registers(0, max_qubits - dom.size());
  return op(dom, cod, depth, max_qubits);
}

FormalOp TermGenerator::closed_op(const RegisterString& regs, int depth) {
  RegisterString saved = regs;
  std::swap(pool_, saved);
  const FormalOp id = sol::apply(builtin_constant("I"), regs);
  // the identities fix the register order on both sides
  const FormalOp b = FormalOp::product(FormalOp::product(id, op(regs, regs, depth, 2 * regs.size())), id);
  std::swap(pool_, saved);
  return b;
}

FormalOp TermGenerator::equivalent(const FormalOp& a) {
  const Signature sig = static_signature(a);
  switch (pick(5)) {
    case 0: return FormalOp::adjoint(FormalOp::adjoint(a));
    case 1: return FormalOp::scale(Expr::integer(1), a);
    case 2: return FormalOp::sum(FormalOp::constant(builtin_constant("Zero"), {}, sig), a);
    case 3: return FormalOp::tensor(FormalOp::scalar(Expr::integer(1)), a);
    default:
      if (sig.dom.empty()) return FormalOp::sum(a, FormalOp::scale(Expr::integer(0), a));
      return FormalOp::product(sol::apply(builtin_constant("I"), sig.dom), a);
  }
}

FormalOp TermGenerator::ill_signed(std::string& expected_rule) {
  const Expr x = Expr::var("x", BasicType::Int);
  FormalOp bad;
  switch (pick(4)) {
    case 0: {
      const QuantumRef g = pool_[static_cast<std::size_t>(pick(static_cast<int>(pool_.size())))];
      bad = sol::apply(builtin_constant("CNOT"), {g, g});
      expected_rule = "Sign-OpC";
      break;
    }
    case 1: {
      // distinct syntactically, equal once grounded
      const QuantumRef g(q_, {x});
      const QuantumRef h(q_, {(x + Expr::integer(1)) - Expr::integer(1)});
      bad = coin() ? FormalOp::var(y_, Signature{{g, h}, {g, h}}) : sol::apply(builtin_constant("I"), {g, pool_[3], h});
      expected_rule = std::holds_alternative<VarOp>(bad.node().v) ? "Sign-OpV" : "Sign-OpC";
      break;
    }
    case 2: {
      const QuantumRef g = pool_[static_cast<std::size_t>(pick(static_cast<int>(pool_.size())))];
      bad = FormalOp::var(y_, Signature{{g, g}, {g, g}});
      expected_rule = "Sign-OpV";
      break;
    }
    default: {
      // both factors use a shared register on the same side
      RegisterString d1 = registers(1, 2), d2 = registers(0, 2);
      if (std::find(d2.begin(), d2.end(), d1[0]) == d2.end()) d2.push_back(d1[0]);
      const RegisterString c1 = registers(0, 2), c2;
      bad = FormalOp::tensor(op(d1, c1, 1, 4), op(shuffled(d2), c2, 1, 4));
      expected_rule = "Sign-Tensor";
      break;
    }
  }
  for (int wraps = pick(3); wraps > 0; --wraps) {
    switch (pick(4)) {
      case 0: bad = FormalOp::scale(expr(BasicType::Complex, 1), bad); break;
      case 1: bad = FormalOp::adjoint(bad); break;
      case 2: bad = FormalOp::tensor(FormalOp::scalar(Expr::integer(1)), bad); break;
      default: bad = FormalOp::sum(bad, bad); break;
    }
  }
  return bad;
}

SolFormula TermGenerator::atom() {
  const RegisterString dom = registers(1, 2);
  const double lambdas[] = {0.0, 1.0, std::sqrt(2.0), 2.0};
  switch (pick(6)) {
    case 0: return SolFormula::classical(formula(1));
    case 1:
      return SolFormula::norm(op(dom, coin() ? RegisterString{} : shuffled(dom), 2, 4), static_cast<CmpRel>(pick(3)),
                              lambdas[pick(4)]);
    case 2:
      return SolFormula::trace(op(dom, shuffled(dom), 2, 4), static_cast<CmpRel>(pick(3)), Complex(pick(3), 0));
    case 3: {
      const auto kind = static_cast<PredicateKind>(pick(4));
      const RegisterString cod = kind == PredicateKind::PureState ? RegisterString{} : shuffled(dom);
      return SolFormula::predicate(kind, op(dom, cod, 2, 4));
    }
    case 4: {
      const RegisterString cod = coin() ? RegisterString{} : shuffled(dom);
      const FormalOp a = op(dom, cod, 2, 4);
      return SolFormula::equal(a, coin() ? equivalent(a) : op(shuffled(dom), shuffled(cod), 2, 4));
    }
    default: {
      const FormalOp a = op(dom, shuffled(dom), 1, 4);
      return SolFormula::leq(a, coin() ? FormalOp::sum(a, FormalOp::scale(Expr::integer(1), sol::apply(
                                                                              builtin_constant("I"), dom)))
                                       : op(dom, shuffled(dom), 1, 4));
    }
  }
}

SolFormula TermGenerator::sol(int depth) {
  if (depth <= 0 || coin(0.3)) return atom();
  switch (pick(operator_vars_ ? 5 : 4)) {
    case 0: return SolFormula::negation(sol(depth - 1));
    case 1:
    case 2:
      return SolFormula::binary(static_cast<SolFormula::BinOp>(pick(3)), sol(depth - 1), sol(depth - 1));
    case 3: {
      const BasicType t = coin() ? BasicType::Int : BasicType::Bool;
      return SolFormula::quant(static_cast<SolFormula::Quantifier>(pick(2)), to_string(variable(t)), t,
                               sol(depth - 1));
    }
    default:
      return SolFormula::quant_op(static_cast<SolFormula::Quantifier>(pick(2)), coin() ? x_ : y_, sol(depth - 1));
  }
}

}  // namespace sol

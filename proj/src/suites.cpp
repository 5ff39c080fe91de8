#include "sol/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "sol/entailment.hpp"
#include "sol/gates.hpp"
#include "sol/generators.hpp"
#include "sol/rewrite.hpp"

namespace sol {

bool SuiteReport::ok() const {
  return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.ok(); });
}

std::size_t SuiteReport::checks() const {
  std::size_t n = 0;
  for (const auto& c : cases) n += c.trials;
  return n;
}

SuiteCase run_case(const std::string& name, std::size_t n, const std::function<Failure(std::size_t)>& trial) {
  SuiteCase c;
  c.name = name;
  for (std::size_t i = 0; i < n; ++i) {
    ++c.trials;
    Failure f;
    try {
      f = trial(i);
    } catch (const std::exception& e) {
      f = std::string("unexpected error: ") + e.what();
    }
    if (!f)
      ++c.passed;
    else if (c.counterexample.empty())
      c.counterexample = "instance " + std::to_string(i) + ": " + *f;
  }
  return c;
}

namespace {

QuantumStructure suite_structure(const SuiteOptions& opts, IntRange range = {-8, 8}) {
  Config cfg;
  cfg.int_range = range;
  cfg.tol = opts.tol;
  cfg.samples = opts.samples;
  cfg.seed = opts.seed;
  return standard_structure(cfg);
}

SamplingOptions sampling(const SuiteOptions& opts) { return {opts.samples, opts.seed}; }

OpVarPtr op_var(const std::string& name, std::size_t dom, std::size_t cod) {
  return std::make_shared<const OperatorVarDecl>(OperatorVarDecl{
      name, QuantumType{std::vector<BasicType>(dom, BasicType::Bool), std::vector<BasicType>(cod, BasicType::Bool)}});
}

RegisterString qubit_regs(std::size_t k, const std::string& prefix = "r") {
  RegisterString rs;
  for (std::size_t i = 0; i < k; ++i) rs.emplace_back(make_qubit(prefix + std::to_string(i)));
  return rs;
}

FormalOp on(const OpVarPtr& x, const RegisterString& dom, const RegisterString& cod) {
  return FormalOp::var(x, Signature{dom, cod});
}

std::string truth_text(const Truth& t) {
  return std::string(t.value ? "true" : "false") + (t.certain ? "" : " (sampled)");
}

bool matrices_close(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  if (a.data.rows() != b.data.rows() || a.data.cols() != b.data.cols()) return false;
  return a.data.size() == 0 || (a.data - b.data).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------- axioms

struct Axiom {
  std::string name;
  SolFormula premise, conclusion;
  std::function<Valuation(Rng&, Eigen::Index)> instance;
};

std::vector<Axiom> axioms(std::size_t k, const RegisterString& q) {
  const auto a1 = op_var("A1", k, k), a2 = op_var("A2", k, k), v = op_var("V", k, 0);
  const FormalOp A1 = on(a1, q, q), A2 = on(a2, q, q), V = on(v, q, {});
  using P = PredicateKind;
  auto pred = [](P kind, const FormalOp& a) { return SolFormula::predicate(kind, a); };
  const FormalOp zero = FormalOp::constant(builtin_constant("Zero"), {}, Signature{q, q});
  std::vector<Axiom> out;
  out.push_back({"Stat1", SolFormula::conj(pred(P::Unitary, A1), pred(P::PureState, V)),
                 pred(P::PureState, A1 * V),
                 [](Rng& g, Eigen::Index n) {
                   return Valuation{{"A1", haar_unitary(n, g)}, {"V", random_unit_vector(n, g)}};
                 }});
  out.push_back({"Stat2", SolFormula::conj(pred(P::Unitary, A1), pred(P::MixedState, A2)),
                 pred(P::MixedState, A1 * A2 * FormalOp::adjoint(A1)),
                 [](Rng& g, Eigen::Index n) {
                   return Valuation{{"A1", haar_unitary(n, g)}, {"A2", random_density(n, g)}};
                 }});
  out.push_back({"Stat3", SolFormula::conj(SolFormula::leq(zero, A1), SolFormula::trace(A1, CmpRel::Eq, 1.0)),
                 pred(P::MixedState, A1),
                 [](Rng& g, Eigen::Index n) {
                   CMatrix p = random_psd(n, g);
                   return Valuation{{"A1", p / p.trace()}};
                 }});
  out.push_back({"Uni1", pred(P::Unitary, A1), pred(P::Unitary, FormalOp::adjoint(A1)),
                 [](Rng& g, Eigen::Index n) { return Valuation{{"A1", haar_unitary(n, g)}}; }});
  out.push_back({"Uni2", SolFormula::conj(pred(P::Unitary, A1), pred(P::Unitary, A2)), pred(P::Unitary, A1 * A2),
                 [](Rng& g, Eigen::Index n) {
                   return Valuation{{"A1", haar_unitary(n, g)}, {"A2", haar_unitary(n, g)}};
                 }});
  out.push_back({"Obs1", pred(P::Observable, A1), SolFormula::equal(A1, FormalOp::adjoint(A1)),
                 [](Rng& g, Eigen::Index n) { return Valuation{{"A1", random_hermitian(n, g)}}; }});
  out.push_back({"Obs2", SolFormula::conj(pred(P::Unitary, A1), pred(P::Observable, A2)),
                 pred(P::Observable, A1 * A2 * FormalOp::adjoint(A1)),
                 [](Rng& g, Eigen::Index n) {
                   return Valuation{{"A1", haar_unitary(n, g)}, {"A2", random_hermitian(n, g)}};
                 }});
  out.push_back({"Obs3",
                 SolFormula::conj(SolFormula::conj(pred(P::Observable, A1), pred(P::Observable, A2)),
                                  SolFormula::equal(A1 * A2, A2 * A1)),
                 pred(P::Observable, A1 * A2), [](Rng& g, Eigen::Index n) {
                   // commuting observables share an eigenbasis
                   const CMatrix u = haar_unitary(n, g);
                   std::normal_distribution<double> d;
                   CMatrix d1 = CMatrix::Zero(n, n), d2 = CMatrix::Zero(n, n);
                   for (Eigen::Index i = 0; i < n; ++i) {
                     d1(i, i) = d(g);
                     d2(i, i) = d(g);
                   }
                   return Valuation{{"A1", u * d1 * u.adjoint()}, {"A2", u * d2 * u.adjoint()}};
                 }});
  return out;
}

std::vector<SuiteCase> axiom_cases(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts);
  const auto one = axioms(1, qubit_regs(1)), two = axioms(2, qubit_regs(2));
  std::vector<SuiteCase> out;
  for (std::size_t a = 0; a < one.size(); ++a) {
    Rng rng(mix_seed(opts.seed, one[a].name));
    out.push_back(run_case(one[a].name, opts.instances, [&](std::size_t i) -> Failure {
      const Axiom& ax = i % 2 ? two[a] : one[a];
      Context ctx;
      ctx.eta = ax.instance(rng, i % 2 ? 4 : 2);
      const Truth pre = sat_sol(qs, ctx, ax.premise, sampling(opts));
      if (!pre.value) return "generated instance does not satisfy the premise " + to_string(ax.premise);
      const Truth post = sat_sol(qs, ctx, ax.conclusion, sampling(opts));
      if (!post.value || !post.certain) return to_string(ax.conclusion) + " is " + truth_text(post);
      return std::nullopt;
    }));
  }
  return out;
}

// ---------------------------------------------------------------- substitution

/// A random expression of type t whose value under sigma lies in the range.
Expr in_range(TermGenerator& gen, const Structure& s, const State& sigma, BasicType t, int depth) {
  for (int tries = 0; tries < 32; ++tries) {
    Expr e = gen.expr(t, depth);
    if (t != BasicType::Int) return e;
    try {
      if (gen.values().contains(as_int(eval_expr(s, sigma, e)))) return e;
    } catch (const EvalError&) {
    }
  }
  return Expr::integer(0);
}

std::pair<std::string, BasicType> random_var(TermGenerator& gen, bool complex_ok = true) {
  static const std::pair<const char*, BasicType> vars[] = {{"x", BasicType::Int},  {"y", BasicType::Int},
                                                           {"z", BasicType::Int},  {"b", BasicType::Bool},
                                                           {"c", BasicType::Bool}, {"a", BasicType::Complex}};
  const auto& [n, t] = vars[gen.pick(complex_ok ? 6 : 5)];
  return {n, t};
}

template <class F>
std::optional<Value> try_eval(F f, std::string& err) {
  try {
    return f();
  } catch (const EvalError& e) {
    err = e.what();
    return std::nullopt;
  }
}

bool same_truth(const Truth& a, const Truth& b) { return a.value == b.value && a.certain == b.certain; }

std::vector<SuiteCase> substitution_cases(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts);
  const Structure& cs = qs.classical;
  std::vector<SuiteCase> out;
  const std::size_t n = opts.instances;

  TermGenerator g1(mix_seed(opts.seed, "subst-expr"));
  out.push_back(run_case("expression substitution", n, [&](std::size_t) -> Failure {
    const State sigma = g1.state();
    const auto [x, tx] = random_var(g1);
    const Expr s = g1.expr(static_cast<BasicType>(g1.pick(3)), 3);
    const Expr t = g1.expr(tx, 2);
    std::string e1, e2;
    const auto lhs = try_eval([&] { return eval_expr(cs, sigma, subst_expr(s, Substitution{{x, t}})); }, e1);
    const auto rhs = try_eval(
        [&] { return eval_expr(cs, sigma.updated(x, eval_expr(cs, sigma, t)), s); }, e2);
    if (!lhs && !rhs) return std::nullopt;
    if (!lhs || !rhs || !values_equal(*lhs, *rhs, opts.tol))
      return to_string(s) + " with " + x + " := " + to_string(t) + " at " + to_string(sigma) + ": " +
             (lhs ? to_string(*lhs) : e1) + " vs " + (rhs ? to_string(*rhs) : e2);
    return std::nullopt;
  }));

  TermGenerator g2(mix_seed(opts.seed, "subst-formula"));
  out.push_back(run_case("formula substitution", n, [&](std::size_t) -> Failure {
    const State sigma = g2.state();
    const auto [x, tx] = random_var(g2, false);
    const Formula f = g2.formula(3);
    const Expr t = g2.expr(tx, 2);
    const bool lhs = satisfies(cs, sigma, subst_formula(f, Substitution{{x, t}}));
    const bool rhs = satisfies(cs, sigma.updated(x, eval_expr(cs, sigma, t)), f);
    if (lhs != rhs) return to_string(f) + " with " + x + " := " + to_string(t) + " at " + to_string(sigma);
    return std::nullopt;
  }));

  TermGenerator g3(mix_seed(opts.seed, "subst-cell"));
  out.push_back(run_case("array cell substitution", n, [&](std::size_t) -> Failure {
    const State sigma = g3.state();
    const Expr s = g3.expr(BasicType::Bool, 3);
    const Expr idx = g3.expr(BasicType::Int, 1);
    const Expr t = g3.expr(BasicType::Bool, 1);
    const bool lhs = as_bool(eval_expr(cs, sigma, subst_expr(s, CellSubstitution{"j", {idx}, t})));
    const State updated =
        sigma.updated_cell("j", {index_key(eval_expr(cs, sigma, idx))}, eval_expr(cs, sigma, t));
    const bool rhs = as_bool(eval_expr(cs, updated, s));
    if (lhs != rhs) return to_string(s) + " with j[" + to_string(idx) + "] := " + to_string(t);
    return std::nullopt;
  }));

  TermGenerator g4(mix_seed(opts.seed, "subst-operator"));
  out.push_back(run_case("operator substitution", n, [&](std::size_t) -> Failure {
    Context ctx{g4.state(), g4.valuation()};
    const auto [x, tx] = random_var(g4);
    const FormalOp a = g4.op(1 + g4.pick(4), 5);
    const Expr t = g4.expr(tx, 2);
    Context moved = ctx;
    moved.sigma = ctx.sigma.updated(x, eval_expr(cs, ctx.sigma, t));
    std::optional<Matrix> lhs, rhs;
    std::string e1, e2;
    try {
      lhs = evaluate(qs, ctx, subst_classical(a, Substitution{{x, t}}));
    } catch (const SigningError& e) {
      e1 = e.rule();
    } catch (const EvalError& e) {
      e1 = "eval";
    }
    try {
      rhs = evaluate(qs, moved, a);
    } catch (const SigningError& e) {
      e2 = e.rule();
    } catch (const EvalError& e) {
      e2 = "eval";
    }
    if (!lhs && !rhs && e1 == e2) return std::nullopt;
    if (lhs && rhs && matrices_close(*lhs, *rhs, opts.tol)) return std::nullopt;
    return to_string(a) + " with " + x + " := " + to_string(t) + " at " + to_string(ctx.sigma);
  }));

  TermGenerator g5(mix_seed(opts.seed, "subst-sol"));
  out.push_back(run_case("SOL classical substitution", n, [&](std::size_t) -> Failure {
    Context ctx{g5.state(), g5.valuation()};
    const auto [x, tx] = random_var(g5);
    const SolFormula f = g5.sol(2);
    const Expr t = in_range(g5, cs, ctx.sigma, tx, 2);
    Context moved = ctx;
    moved.sigma = ctx.sigma.updated(x, eval_expr(cs, ctx.sigma, t));
    const Truth lhs = sat_sol(qs, ctx, subst_sol(f, Substitution{{x, t}}), sampling(opts));
    const Truth rhs = sat_sol(qs, moved, f, sampling(opts));
    if (!same_truth(lhs, rhs))
      return to_string(f) + " with " + x + " := " + to_string(t) + ": " + truth_text(lhs) + " vs " + truth_text(rhs);
    return std::nullopt;
  }));

  TermGenerator g6(mix_seed(opts.seed, "subst-sol-op"));
  out.push_back(run_case("SOL operator substitution", n, [&](std::size_t) -> Failure {
    Context ctx{g6.state(), g6.valuation()};
    const bool use_x = g6.coin();
    const OpVarPtr& var = use_x ? g6.op_x() : g6.op_y();
    const RegisterString regs = use_x ? RegisterString{g6.pool()[3]} : RegisterString{g6.pool()[3], g6.pool()[4]};
    const FormalOp b = g6.closed_op(regs, 2);
    const SolFormula f = g6.sol(2);
    Context moved = ctx;
    moved.eta[var->name] = evaluate(qs, ctx, b).data;
    const Truth lhs = sat_sol(qs, ctx, subst_sol(f, std::map<std::string, FormalOp>{{var->name, b}}), sampling(opts));
    const Truth rhs = sat_sol(qs, moved, f, sampling(opts));
    if (!same_truth(lhs, rhs))
      return to_string(f) + " with " + var->name + " := " + to_string(b) + ": " + truth_text(lhs) + " vs " +
             truth_text(rhs);
    return std::nullopt;
  }));
  return out;
}

// ---------------------------------------------------------------- schemas

const char* var_names[] = {"x", "y", "z", "b", "c"};

std::optional<std::pair<std::string, BasicType>> var_not_free(TermGenerator& gen, const SolFormula& f) {
  const auto free = free_classical_vars(f);
  std::vector<std::pair<std::string, BasicType>> options;
  for (const char* v : var_names)
    if (!free.count(v)) options.emplace_back(v, v[0] >= 'x' ? BasicType::Int : BasicType::Bool);
  if (options.empty()) return std::nullopt;
  return options[static_cast<std::size_t>(gen.pick(static_cast<int>(options.size())))];
}

/// Small entailment queries over x, y in [-2, 2] and b; the remaining
/// variables are fixed from a random state.
EntailmentQuery small_query(TermGenerator& gen, const SuiteOptions& opts) {
  EntailmentQuery q;
  q.sigma = {gen.formula(1)};
  q.ranges = {{"x", {-2, 2}}, {"y", {-2, 2}}};
  const State st = gen.state();
  for (const char* v : {"z", "c", "a"}) q.fixed.scalars[v] = st.get(v);
  q.fixed.arrays["j"] = st.arrays.at("j");
  q.sampling = {std::max<std::size_t>(1, opts.samples / 2), opts.seed};
  return q;
}

SuiteCase deduction_case(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts, {-2, 2});
  TermGenerator gen(mix_seed(opts.seed, "deduction"), {-2, 2});
  std::size_t valid = 0, refuted = 0;
  SuiteCase c = run_case("deduction theorem", opts.instances, [&](std::size_t) -> Failure {
    EntailmentQuery q = small_query(gen, opts);
    q.gamma = {gen.sol(1)};
    const SolFormula a = gen.sol(1), b = gen.sol(1);
    EntailmentQuery with = q, arrow = q;
    with.gamma.push_back(a);
    with.goal = b;
    arrow.goal = SolFormula::implies(a, b);
    const CheckResult r1 = check_entailment(qs, with), r2 = check_entailment(qs, arrow);
    valid += r1.verdict == Verdict::Valid;
    refuted += r1.verdict == Verdict::Refuted;
    if (r1.verdict != r2.verdict)
      return "Gamma + {" + to_string(a) + "} |= " + to_string(b) + " is " + to_string(r1.verdict) +
             " but Gamma |= A -> B is " + to_string(r2.verdict);
    if (r1.witness && r2.witness && !(r1.witness->sigma == r2.witness->sigma))
      return "witnesses differ for " + to_string(b);
    return std::nullopt;
  });
  c.note = std::to_string(valid) + " valid, " + std::to_string(refuted) + " refuted";
  return c;
}

std::vector<SuiteCase> schema_cases(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts);
  const Structure& cs = qs.classical;
  std::vector<SuiteCase> out;
  const std::size_t n = opts.instances;

  TermGenerator g1(mix_seed(opts.seed, "schema-1"));
  out.push_back(run_case("(forall x)A -> A[t/x]", n, [&](std::size_t) -> Failure {
    const Context ctx{g1.state(), g1.valuation()};
    const auto [x, tx] = random_var(g1, false);
    const SolFormula a = g1.sol(2);
    const Expr t = in_range(g1, cs, ctx.sigma, tx, 1);
    const SolFormula f = SolFormula::implies(SolFormula::quant(SolFormula::Quantifier::ForAll, x, tx, a),
                                             subst_sol(a, Substitution{{x, t}}));
    const Truth v = sat_sol(qs, ctx, f, sampling(opts));
    if (!v.value) return to_string(f) + " is false at " + to_string(ctx.sigma);
    return std::nullopt;
  }));

  TermGenerator g2(mix_seed(opts.seed, "schema-2"));
  std::size_t gaps = 0;
  SuiteCase c2 = run_case("(forallOp X)A -> A[B/X]", n, [&](std::size_t) -> Failure {
    const Context ctx{g2.state(), g2.valuation()};
    const bool use_x = g2.coin();
    const OpVarPtr& var = use_x ? g2.op_x() : g2.op_y();
    const RegisterString regs = use_x ? RegisterString{g2.pool()[3]} : RegisterString{g2.pool()[3], g2.pool()[4]};
    const FormalOp b = g2.closed_op(regs, 2);
    const SolFormula a = g2.sol(2);
    const SolFormula inst = subst_sol(a, std::map<std::string, FormalOp>{{var->name, b}});
    const SolFormula f = SolFormula::implies(SolFormula::quant_op(SolFormula::Quantifier::ForAll, var, a), inst);
    const Truth v = sat_sol(qs, ctx, f, sampling(opts));
    if (v.value) return std::nullopt;
    if (v.certain) return to_string(f) + " is certainly false";
    // the universal held on the samples only; B itself must refute A
    Context with_b = ctx;
    with_b.eta[var->name] = evaluate(qs, ctx, b).data;
    if (sat_sol(qs, with_b, a, sampling(opts)).value) return to_string(f) + " fails but A holds at B";
    ++gaps;
    return std::nullopt;
  });
  c2.note = std::to_string(gaps) + " instances where B lies outside the operator samples";
  out.push_back(c2);

  TermGenerator g3(mix_seed(opts.seed, "schema-3"));
  out.push_back(run_case("(forall x)(A -> B) -> (A -> (forall x)B), x not free in A", n, [&](std::size_t) -> Failure {
    const Context ctx{g3.state(), g3.valuation()};
    const SolFormula a = g3.sol(2), b = g3.sol(2);
    const auto x = var_not_free(g3, a);
    if (!x) return std::nullopt;
    using Q = SolFormula::Quantifier;
    const SolFormula f = SolFormula::implies(SolFormula::quant(Q::ForAll, x->first, x->second, SolFormula::implies(a, b)),
                                             SolFormula::implies(a, SolFormula::quant(Q::ForAll, x->first, x->second, b)));
    const Truth v = sat_sol(qs, ctx, f, sampling(opts));
    if (!v.value) return to_string(f) + " is false at " + to_string(ctx.sigma);
    return std::nullopt;
  }));

  TermGenerator g4(mix_seed(opts.seed, "schema-4"));
  out.push_back(run_case("(forallOp X)(A -> B) -> (A -> (forallOp X)B), X not free in A", n, [&](std::size_t) -> Failure {
    const Context ctx{g4.state(), g4.valuation()};
    const SolFormula a = g4.sol(2), b = g4.sol(2);
    const auto free = free_operator_vars(a);
    OpVarPtr var;
    if (!free.count(g4.op_x()->name))
      var = g4.op_x();
    else if (!free.count(g4.op_y()->name))
      var = g4.op_y();
    else
      return std::nullopt;
    using Q = SolFormula::Quantifier;
    const SolFormula f = SolFormula::implies(SolFormula::quant_op(Q::ForAll, var, SolFormula::implies(a, b)),
                                             SolFormula::implies(a, SolFormula::quant_op(Q::ForAll, var, b)));
    const Truth v = sat_sol(qs, ctx, f, sampling(opts));
    if (!v.value) return to_string(f) + " is false at " + to_string(ctx.sigma);
    return std::nullopt;
  }));

  SuiteOptions small = opts;
  small.instances = std::max<std::size_t>(1, opts.instances / 2);
  out.push_back(deduction_case(small));

  // Substitution theorem: Valid survives t/x for t keeping x's values in range.
  const QuantumStructure qs2 = suite_structure(opts, {-2, 2});
  TermGenerator g6(mix_seed(opts.seed, "substitution-theorem"), {-2, 2});
  g6.set_operator_vars(false);
  std::size_t valid = 0;
  SuiteCase c6 = run_case("substitution preserves Valid", small.instances, [&](std::size_t) -> Failure {
    EntailmentQuery q = small_query(g6, opts);
    const SolFormula p = g6.sol(1);
    q.goal = g6.coin() ? SolFormula::implies(SolFormula::conj(p, g6.sol(1)), p) : g6.sol(1);
    const CheckResult before = check_entailment(qs2, q);
    if (before.verdict != Verdict::Valid) return std::nullopt;
    ++valid;
    // renamings, negation and constants keep the values inside [-2, 2]
    const char* targets[] = {"x", "y"};
    const std::string x = targets[g6.pick(2)];
    const Expr other = Expr::var(x == "x" ? "y" : "x", BasicType::Int);
    const Expr t = g6.pick(3) == 0 ? Expr::integer(g6.pick(5) - 2)
                   : g6.coin()     ? other
                                   : Expr::app("neg", {other});
    EntailmentQuery after = q;
    const Substitution sub{{x, t}};
    for (auto& s : after.sigma) s = subst_formula(s, sub);
    after.goal = subst_sol(q.goal, sub);
    const CheckResult r = check_entailment(qs2, after);
    if (r.verdict != Verdict::Valid)
      return to_string(q.goal) + " with " + x + " := " + to_string(t) + " became " + to_string(r.verdict);
    return std::nullopt;
  });
  c6.note = std::to_string(valid) + " valid queries substituted";
  out.push_back(c6);
  return out;
}

// ---------------------------------------------------------------- order laws

struct OrderEnv {
  std::size_t k;
  RegisterString q, side;
  OpVarPtr a, b, c, side_c;
  FormalOp A, B, C, Cside;
};

OrderEnv order_env(std::size_t k) {
  OrderEnv e;
  e.k = k;
  e.q = qubit_regs(k);
  e.side = qubit_regs(1, "t");
  e.a = op_var("A", k, k);
  e.b = op_var("B", k, k);
  e.c = op_var("C", k, k);
  e.side_c = op_var("D", 1, 1);
  e.A = on(e.a, e.q, e.q);
  e.B = on(e.b, e.q, e.q);
  e.C = on(e.c, e.q, e.q);
  e.Cside = on(e.side_c, e.side, e.side);
  return e;
}

std::vector<SuiteCase> order_cases(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts);
  std::vector<SuiteCase> out;
  const OrderEnv envs[] = {order_env(1), order_env(2)};
  using F = SolFormula;

  struct Law {
    std::string name;
    std::function<std::pair<F, F>(const OrderEnv&)> formulas;  // premise, conclusion
    std::function<Context(Rng&, Eigen::Index)> instance;
  };

  auto ordered_pair = [](Rng& g, Eigen::Index n) {
    const CMatrix a = random_hermitian(n, g);
    return std::make_pair(a, CMatrix(a + random_psd(n, g)));
  };
  const Expr w = Expr::var("w", BasicType::Complex);
  auto with_weight = [&](Context ctx, double v) {
    ctx.sigma.scalars["w"] = Value{Complex(v, 0)};
    return ctx;
  };

  std::vector<Law> laws;
  laws.push_back({"anti-symmetry",
                  [](const OrderEnv& e) {
                    return std::make_pair(F::conj(F::leq(e.A, e.B), F::leq(e.B, e.A)), F::equal(e.A, e.B));
                  },
                  [](Rng& g, Eigen::Index n) {
                    const CMatrix a = random_hermitian(n, g);
                    return Context{{}, {{"A", a}, {"B", a}}};
                  }});
  laws.push_back({"equality gives both inequalities",
                  [](const OrderEnv& e) {
                    return std::make_pair(F::equal(e.A, e.B), F::conj(F::leq(e.A, e.B), F::leq(e.B, e.A)));
                  },
                  [](Rng& g, Eigen::Index n) {
                    const CMatrix a = random_hermitian(n, g);
                    return Context{{}, {{"A", a}, {"B", a}}};
                  }});
  laws.push_back({"transitivity",
                  [](const OrderEnv& e) {
                    return std::make_pair(F::conj(F::leq(e.A, e.B), F::leq(e.B, e.C)), F::leq(e.A, e.C));
                  },
                  [](Rng& g, Eigen::Index n) {
                    const CMatrix a = random_hermitian(n, g);
                    const CMatrix b = a + random_psd(n, g);
                    return Context{{}, {{"A", a}, {"B", b}, {"C", CMatrix(b + random_psd(n, g))}}};
                  }});
  laws.push_back({"scaling by c >= 0",
                  [&](const OrderEnv& e) { return std::make_pair(F::leq(e.A, e.B), F::leq(w * e.A, w * e.B)); },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return with_weight(Context{{}, {{"A", a}, {"B", b}}}, std::uniform_real_distribution<>(0, 3)(g));
                  }});
  laws.push_back({"scaling by c <= 0 reverses",
                  [&](const OrderEnv& e) { return std::make_pair(F::leq(e.A, e.B), F::leq(w * e.B, w * e.A)); },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return with_weight(Context{{}, {{"A", a}, {"B", b}}}, -std::uniform_real_distribution<>(0, 3)(g));
                  }});
  laws.push_back({"complement reverses",
                  [](const OrderEnv& e) {
                    const FormalOp id = sol::apply(builtin_constant("I"), e.q);
                    const Expr minus = Expr::integer(-1);
                    return std::make_pair(F::leq(e.A, e.B), F::leq(id + minus * e.B, id + minus * e.A));
                  },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return Context{{}, {{"A", a}, {"B", b}}};
                  }});
  laws.push_back({"adjoint",
                  [](const OrderEnv& e) {
                    return std::make_pair(F::leq(e.A, e.B), F::leq(FormalOp::adjoint(e.A), FormalOp::adjoint(e.B)));
                  },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return Context{{}, {{"A", a}, {"B", b}}};
                  }});
  laws.push_back({"addition on either side",
                  [](const OrderEnv& e) {
                    return std::make_pair(F::leq(e.A, e.B), F::conj(F::leq(e.A + e.C, e.B + e.C),
                                                                    F::leq(e.C + e.A, e.C + e.B)));
                  },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return Context{{}, {{"A", a}, {"B", b}, {"C", gaussian_matrix(n, n, g)}}};
                  }});
  laws.push_back({"conjugation",
                  [](const OrderEnv& e) {
                    const FormalOp ct = FormalOp::adjoint(e.C);
                    return std::make_pair(F::leq(e.A, e.B), F::leq(ct * e.A * e.C, ct * e.B * e.C));
                  },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return Context{{}, {{"A", a}, {"B", b}, {"C", gaussian_matrix(n, n, g)}}};
                  }});
  laws.push_back({"tensor with a positive operator",
                  [](const OrderEnv& e) {
                    const FormalOp zero = FormalOp::constant(builtin_constant("Zero"), {}, Signature{e.side, e.side});
                    return std::make_pair(F::conj(F::leq(e.A, e.B), F::leq(zero, e.Cside)),
                                          F::conj(F::leq(FormalOp::tensor(e.A, e.Cside), FormalOp::tensor(e.B, e.Cside)),
                                                  F::leq(FormalOp::tensor(e.Cside, e.A), FormalOp::tensor(e.Cside, e.B))));
                  },
                  [&](Rng& g, Eigen::Index n) {
                    const auto [a, b] = ordered_pair(g, n);
                    return Context{{}, {{"A", a}, {"B", b}, {"D", random_psd(2, g)}}};
                  }});
  laws.push_back({"probabilistic combination",
                  [](const OrderEnv& e) {
                    const FormalOp zero = FormalOp::constant(builtin_constant("Zero"), {}, Signature{e.q, e.q});
                    const FormalOp a2 = on(op_var("A2", e.k, e.k), e.q, e.q), b2 = on(op_var("B2", e.k, e.k), e.q, e.q);
                    const Expr p1 = Expr::var("p1", BasicType::Complex), p2 = Expr::var("p2", BasicType::Complex);
                    const Expr u1 = Expr::var("u1", BasicType::Complex), u2 = Expr::var("u2", BasicType::Complex);
                    const F premise = F::all_of({F::leq(zero, e.A), F::leq(e.A, e.B), F::leq(zero, a2), F::leq(a2, b2)});
                    return std::make_pair(premise, F::leq(p1 * e.A + p2 * a2, u1 * e.B + u2 * b2));
                  },
                  [](Rng& g, Eigen::Index n) {
                    std::uniform_real_distribution<> unit(0, 1);
                    Context ctx;
                    const CMatrix a1 = random_psd(n, g), a2 = random_psd(n, g);
                    ctx.eta = {{"A", a1}, {"B", CMatrix(a1 + random_psd(n, g))}, {"A2", a2},
                               {"B2", CMatrix(a2 + random_psd(n, g))}};
                    for (const char* i : {"1", "2"}) {
                      const double p = unit(g);
                      ctx.sigma.scalars[std::string("p") + i] = Value{Complex(p, 0)};
                      ctx.sigma.scalars[std::string("u") + i] = Value{Complex(p + (1 - p) * unit(g), 0)};
                    }
                    return ctx;
                  }});

  for (const Law& law : laws) {
    Rng rng(mix_seed(opts.seed, law.name));
    const auto f1 = law.formulas(envs[0]), f2 = law.formulas(envs[1]);
    out.push_back(run_case(law.name, opts.instances, [&](std::size_t i) -> Failure {
      const auto& [premise, conclusion] = i % 2 ? f2 : f1;
      const Context ctx = law.instance(rng, i % 2 ? 4 : 2);
      if (!sat_sol(qs, ctx, premise, sampling(opts)).value)
        return "generated instance does not satisfy " + to_string(premise);
      const Truth t = sat_sol(qs, ctx, conclusion, sampling(opts));
      if (!t.value) return to_string(conclusion) + " is false";
      return std::nullopt;
    }));
  }

  // Order and equality verdicts survive t/x.
  const QuantumStructure qs2 = suite_structure(opts, {0, 3});
  const auto r = make_qubit("r");
  const auto qarr = make_qvar("q", VarType{{BasicType::Int}, BasicType::Bool});
  const Expr x = Expr::var("x", BasicType::Int), y = Expr::var("y", BasicType::Int);
  const Expr b = Expr::var("b", BasicType::Bool);
  const QuantumRef qr(r), qx(qarr, {x});
  auto proj = [&](const QuantumRef& reg) { return FormalOp::product(FormalOp::ket(b, reg), FormalOp::bra(b, reg)); };
  auto id = [&](const QuantumRef& reg) { return sol::apply(builtin_constant("I"), {reg}); };
  auto le = [](const Expr& l, const Expr& h) { return Formula::atom(Expr::app("<=", {l, h})); };
  struct Template {
    std::vector<Formula> sigma;
    SolFormula goal;
  };
  const std::vector<Template> templates = {
      {{le(Expr::integer(0), x)}, F::leq(x * proj(qr), x * id(qr))},
      {{le(x, y)}, F::leq(x * id(qr), y * id(qr))},
      {{Formula::atom(eq(x, y))}, F::equal(x * sol::apply(builtin_constant("H"), {qr}), y * sol::apply(builtin_constant("H"), {qr}))},
      {{}, F::leq(proj(qx), id(qx))},
      {{le(y, x)}, F::leq(y * proj(qx), x * id(qx))},
  };
  Rng rng(mix_seed(opts.seed, "order-substitution"));
  out.push_back(run_case("substitution preserves order verdicts", opts.instances, [&](std::size_t i) -> Failure {
    const Template& tp = templates[i % templates.size()];
    EntailmentQuery q;
    q.sigma = tp.sigma;
    q.goal = tp.goal;
    const CheckResult before = check_entailment(qs2, q);
    if (before.verdict != Verdict::Valid) return to_string(tp.goal) + " is " + to_string(before.verdict);
    Substitution sub;
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: sub = {{"x", y}}; break;
      case 1: sub = {{"y", x}}; break;
      case 2: sub = {{"x", Expr::integer(std::uniform_int_distribution<int>(0, 3)(rng))}}; break;
      default: sub = {{"b", Expr::app("not", {b})}}; break;
    }
    EntailmentQuery after = q;
    for (auto& s : after.sigma) s = subst_formula(s, sub);
    after.goal = subst_sol(q.goal, sub);
    const CheckResult r2 = check_entailment(qs2, after);
    if (r2.verdict != Verdict::Valid) return to_string(after.goal) + " is " + to_string(r2.verdict);
    return std::nullopt;
  }));
  return out;
}

// ---------------------------------------------------------------- signing

std::vector<SuiteCase> signing_cases(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts);
  std::vector<SuiteCase> out;
  TermGenerator gen(mix_seed(opts.seed, "signing"));
  out.push_back(run_case("well-signed terms evaluate", opts.instances, [&](std::size_t) -> Failure {
    const Context ctx{gen.state(), gen.valuation()};
    const FormalOp a = gen.op(1 + gen.pick(6), 8);
    const GroundSignature sig = check_signing(qs, ctx.sigma, a);
    const Matrix m = evaluate(qs, ctx, a);
    const auto rows = static_cast<Eigen::Index>(dim_of(sig.dom, qs.range()));
    const auto cols = static_cast<Eigen::Index>(dim_of(sig.cod, qs.range()));
    if (m.rows != sig.dom || m.cols != sig.cod || m.data.rows() != rows || m.data.cols() != cols)
      return to_string(a) + ": matrix does not match " + to_string(sig);
    if (rows * cols > 256) return to_string(a) + ": dimension above 256";
    return std::nullopt;
  }));
  out.push_back(run_case("ill-signed terms are rejected", std::max<std::size_t>(1, opts.instances / 5),
                         [&](std::size_t) -> Failure {
                           const State sigma = gen.state();
                           std::string rule;
                           const FormalOp a = gen.ill_signed(rule);
                           try {
                             check_signing(qs, sigma, a);
                           } catch (const SigningError& e) {
                             if (e.rule() != rule) return to_string(a) + ": rejected by " + e.rule() + ", not " + rule;
                             return std::nullopt;
                           }
                           return to_string(a) + ": accepted";
                         }));
  return out;
}

// ---------------------------------------------------------------- rewriting

Matrix canonical(const QuantumStructure& qs, Matrix m) {
  auto rows = m.rows, cols = m.cols;
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  return with_col_order(with_row_order(m, rows, qs.range()), cols, qs.range());
}

bool same_normal_form(const NormalForm& a, const NormalForm& b, double tol) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (const auto& [k, v] : a.terms) {
    const auto it = b.terms.find(k);
    if (std::abs(v - (it == b.terms.end() ? Complex(0) : it->second)) > tol) return false;
  }
  for (const auto& [k, v] : b.terms)
    if (!a.terms.count(k) && std::abs(v) > tol) return false;
  return true;
}

std::vector<SuiteCase> rewrite_cases(const SuiteOptions& opts) {
  const QuantumStructure qs = suite_structure(opts);
  std::vector<SuiteCase> out;
  TermGenerator gen(mix_seed(opts.seed, "rewrite"));

  out.push_back(run_case("normal form evaluates like the term", opts.instances, [&](std::size_t) -> Failure {
    const Context ctx{gen.state(), gen.valuation()};
    const FormalOp a = gen.op(1 + gen.pick(5), 6);
    const NormalForm nf = normalize(qs, ctx, a);
    if (!matrices_close(to_matrix(nf, qs.range()), canonical(qs, evaluate(qs, ctx, a)), opts.tol))
      return to_string(a) + " normalises to\n" + to_string(nf, qs.range());
    const NormalForm again = normalize(qs, ctx, to_term(nf, qs.range()));
    if (!same_normal_form(nf, again, opts.tol)) return to_string(a) + ": normal form is not idempotent";
    return std::nullopt;
  }));

  std::size_t equal = 0;
  SuiteCase eq_case = run_case("ground equality agrees with compare", opts.instances, [&](std::size_t) -> Failure {
    const Context ctx{gen.state(), gen.valuation()};
    const FormalOp a = gen.op(1 + gen.pick(4), 6);
    const Signature sig = static_signature(a);
    FormalOp b;
    switch (gen.pick(3)) {
      case 0: b = gen.equivalent(a); break;
      case 1: b = gen.op(gen.shuffled(sig.dom), gen.shuffled(sig.cod), 2, 6); break;
      default: b = FormalOp::sum(a, FormalOp::scale(Expr::complex(1e-3), gen.op(sig.dom, sig.cod, 0, 6)));
    }
    const Judgement d = decide_ground_equality(qs, ctx, a, b);
    const Judgement c = compare(qs, ctx, a, b, Relation::Equal);
    equal += d.holds;
    if (d.holds != c.holds)
      return to_string(a) + " vs " + to_string(b) + ": normal forms say " + (d.holds ? "equal" : "different");
    return std::nullopt;
  });
  eq_case.note = std::to_string(equal) + " equal pairs";
  out.push_back(eq_case);

  // Named rules on their displayed instances.
  const auto r = make_qubit("r"), s = make_qubit("s");
  const QuantumRef qr(r), qs_(s);
  const Expr b = Expr::var("b", BasicType::Bool), c = Expr::var("c", BasicType::Bool);
  const Expr a = Expr::var("a", BasicType::Complex);
  auto preserved = [&](const FormalOp& before, const RewriteResult& res, const State& sigma) -> Failure {
    if (!res.applied) return to_string(before) + ": not applied (" + res.reason + ")";
    const Judgement j = decide_ground_equality(qs, Context{sigma, {}}, before, res.term);
    if (!j) return to_string(before) + " -> " + to_string(res.term) + " changes the meaning: " + j.reason;
    return std::nullopt;
  };
  TermGenerator sg(mix_seed(opts.seed, "rule-states"));

  out.push_back(run_case("Coefficient Addition", opts.instances, [&](std::size_t i) -> Failure {
    State sigma = sg.state();
    if (i % 2 == 0) {
      const FormalOp t = FormalOp::scale(a, FormalOp::ket(b, qr)) + FormalOp::scale(Expr::integer(2), FormalOp::ket(b, qr));
      return preserved(t, rewrite_step(t, coefficient_addition_rule(), Discharge::concrete(qs, sigma)), sigma);
    }
    // b = c |- |b>_r + |c>_r = 2 |b>_r
    const FormalOp t = FormalOp::ket(b, qr) + FormalOp::ket(c, qr);
    const Formula theory = Formula::atom(eq(b, c));
    const RewriteResult res = rewrite_step(t, coefficient_addition_rule(), Discharge::symbolic(qs, {theory}));
    if (res.term != FormalOp::scale(Expr::integer(2), FormalOp::ket(b, qr)))
      return to_string(t) + " rewrote to " + to_string(res.term) + " (" + res.reason + ")";
    sigma.scalars["c"] = sigma.get("b");
    return preserved(t, res, sigma);
  }));

  out.push_back(run_case("Self Outer-Product", opts.instances, [&](std::size_t i) -> Failure {
    const State sigma = sg.state();
    const FormalOp bra = i % 2 ? FormalOp::adjoint(FormalOp::ket(c, qs_)) : FormalOp::bra(c, qs_);
    const FormalOp t = FormalOp::product(FormalOp::product(FormalOp::ket(b, qr), bra), FormalOp::ket(c, qs_));
    const RewriteRule rule = i % 2 ? self_outer_product_adjoint_rule() : self_outer_product_rule();
    const RewriteResult res = rewrite_step(t, rule, Discharge::concrete(qs, sigma));
    if (res.term != FormalOp::ket(b, qr)) return to_string(t) + " rewrote to " + to_string(res.term);
    return preserved(t, res, sigma);
  }));

  out.push_back(run_case("Identity", opts.instances, [&](std::size_t i) -> Failure {
    const State sigma = sg.state();
    const RegisterString regs = i % 2 ? RegisterString{qr, qs_} : RegisterString{qr};
    std::optional<FormalOp> sum;
    for (std::size_t k = 0; k < (std::size_t{1} << regs.size()); ++k) {
      std::vector<FormalOp> kets, bras;
      for (std::size_t p = 0; p < regs.size(); ++p) {
        const Expr label = Expr::boolean((k >> (regs.size() - 1 - p)) & 1);
        kets.push_back(FormalOp::ket(label, regs[p]));
        bras.push_back(FormalOp::bra(label, regs[p]));
      }
      const FormalOp dyad = FormalOp::product(tensor(kets), tensor(bras));
      sum = sum ? FormalOp::sum(*sum, dyad) : dyad;
    }
    const RewriteResult res = rewrite_step(*sum, identity_rule(), Discharge::concrete(qs, sigma));
    if (res.term != sol::apply(builtin_constant("I"), regs)) return to_string(*sum) + " rewrote to " + to_string(res.term);
    return preserved(*sum, res, sigma);
  }));

  out.push_back(run_case("Matrix Representation", opts.instances, [&](std::size_t i) -> Failure {
    const Context ctx{sg.state(), sg.valuation()};
    const RegisterString one{qr}, two{qr, qs_};
    const FormalOp t = i % 3 == 0   ? sol::apply(builtin_constant("H"), one)
                       : i % 3 == 1 ? sol::apply(builtin_constant("CNOT"), two)
                                    : FormalOp::var(sg.op_x(), Signature{one, one});
    const RewriteResult res = rewrite_step(t, matrix_representation_rule(), Discharge::concrete(qs, ctx.sigma));
    if (!res.applied) return to_string(t) + ": not applied (" + res.reason + ")";
    const Judgement j = decide_ground_equality(qs, ctx, t, res.term);
    if (!j) return to_string(t) + ": expansion differs: " + j.reason;
    return std::nullopt;
  }));

  out.push_back(run_case("failed conditions leave the term unchanged", opts.instances, [&](std::size_t i) -> Failure {
    State sigma = sg.state();
    sigma.scalars["c"] = Value{!as_bool(sigma.get("b"))};
    const FormalOp t = i % 2 ? FormalOp::ket(b, qr) + FormalOp::ket(c, qr)
                             : FormalOp::product(FormalOp::product(FormalOp::ket(b, qr), FormalOp::bra(b, qs_)),
                                                 FormalOp::ket(c, qs_));
    const RewriteRule rule = i % 2 ? coefficient_addition_rule() : self_outer_product_rule();
    const RewriteResult res = rewrite_step(t, rule, Discharge::concrete(qs, sigma));
    if (res.applied || res.term != t || res.reason.empty()) return to_string(t) + " was rewritten to " + to_string(res.term);
    return std::nullopt;
  }));

  // Redexes planted in random contexts must keep their meaning.
  std::size_t applied = 0;
  SuiteCase planted = run_case("rewriting inside random contexts preserves meaning", opts.instances,
                               [&](std::size_t i) -> Failure {
    const Context ctx{gen.state(), gen.valuation()};
    const RegisterString dom{gen.pool()[3]};
    FormalOp redex;
    RewriteRule rule;
    switch (i % 4) {
      case 0:
        redex = FormalOp::scale(gen.expr(BasicType::Complex, 1), FormalOp::ket(b, dom[0])) +
                FormalOp::scale(gen.expr(BasicType::Complex, 1), FormalOp::ket(gen.expr(BasicType::Bool, 1), dom[0]));
        rule = coefficient_addition_rule();
        break;
      case 1:
        redex = FormalOp::product(FormalOp::product(FormalOp::ket(b, dom[0]), FormalOp::bra(c, gen.pool()[4])),
                                  FormalOp::ket(gen.expr(BasicType::Bool, 1), gen.pool()[4]));
        rule = self_outer_product_rule();
        break;
      case 2:
        redex = FormalOp::product(FormalOp::ket(Expr::boolean(false), dom[0]), FormalOp::bra(Expr::boolean(false), dom[0])) +
                FormalOp::product(FormalOp::ket(gen.expr(BasicType::Bool, 1), dom[0]),
                                  FormalOp::bra(gen.expr(BasicType::Bool, 1), dom[0]));
        rule = identity_rule();
        break;
      default:
        redex = gen.op(dom, dom, 2, 4);
        rule = matrix_representation_rule();
        break;
    }
    const Signature sig = static_signature(redex);
    FormalOp t = redex;
    if (gen.coin()) t = FormalOp::scale(gen.expr(BasicType::Complex, 1), t);
    if (gen.coin()) t = FormalOp::sum(t, gen.op(sig.dom, sig.cod, 2, 4));
    const RewriteResult res = rewrite_step(t, rule, Discharge::concrete(qs, ctx.sigma));
    if (!res.applied) return std::nullopt;
    ++applied;
    const Judgement j = decide_ground_equality(qs, ctx, t, res.term);
    if (!j) return to_string(t) + " -> " + to_string(res.term) + ": " + j.reason;
    return std::nullopt;
  });
  planted.note = std::to_string(applied) + " rewrites applied";
  out.push_back(planted);
  return out;
}

}  // namespace

SuiteReport axiom_suite(const SuiteOptions& opts) { return {"axioms", axiom_cases(opts)}; }

SuiteReport schema_suite(const SuiteOptions& opts) {
  SuiteReport r{"schemas", axiom_cases(opts)};
  for (auto& c : schema_cases(opts)) r.cases.push_back(std::move(c));
  return r;
}

SuiteReport order_laws_suite(const SuiteOptions& opts) { return {"order", order_cases(opts)}; }

SuiteReport substitution_suite(const SuiteOptions& opts) { return {"substitution", substitution_cases(opts)}; }

SuiteReport signing_suite(const SuiteOptions& opts) { return {"signing", signing_cases(opts)}; }

SuiteReport rewrite_suite(const SuiteOptions& opts) { return {"rewrite", rewrite_cases(opts)}; }

SuiteReport deduction_suite(const SuiteOptions& opts) { return {"deduction", {deduction_case(opts)}}; }

}  // namespace sol

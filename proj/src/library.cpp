#include "sol/library.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "sol/gates.hpp"
#include "sol/sampling.hpp"

namespace sol {

namespace {

constexpr double kPi = std::numbers::pi;
const double kHalfRoot = 1.0 / std::sqrt(2.0);

const VarType kIntToBool{{BasicType::Int}, BasicType::Bool};

Expr int_var(const std::string& name) { return Expr::var(name, BasicType::Int); }
Expr lit(std::int64_t i) { return Expr::integer(i); }
Formula holds(const std::string& op, const Expr& a, const Expr& b) { return Formula::atom(Expr::app(op, {a, b})); }

FormalOp ket(std::int64_t label, const QuantumRef& r) { return FormalOp::ket(lit(label), r); }
FormalOp bra(std::int64_t label, const QuantumRef& r) { return FormalOp::bra(lit(label), r); }

/// (|0> + phase |1>)/√2 on r.
FormalOp plus_state(const QuantumRef& r, const std::optional<Expr>& phase = std::nullopt) {
  FormalOp one = phase ? FormalOp::scale(*phase, ket(1, r)) : ket(1, r);
  return Expr::complex(kHalfRoot) * (ket(0, r) + one);
}

/// Σ_{t=a}^{b} bits[t] 2^{a-t-1}
Expr binary_fraction(const std::string& bits, std::int64_t a, std::int64_t b) {
  Expr sum = Expr::complex(0.0);
  for (std::int64_t t = a; t <= b; ++t) {
    const Expr bit = Expr::subscript(bits, kIntToBool, {lit(t)});
    const double w = std::ldexp(1.0, static_cast<int>(a - t - 1));
    sum = sum + Expr::cond(bit, Expr::complex(w), Expr::complex(0.0));
  }
  return sum;
}

Expr phase_of(const Expr& fraction) {
  return Expr::app("exp", {Expr::complex(Complex(0.0, 2.0 * kPi)) * fraction});
}

/// Rows of ζ(a) reordered to `rows` and columns to `cols`.
CMatrix aligned(const QuantumStructure& qs, const Context& ctx, const FormalOp& a, const RegisterString& rows,
                const RegisterString& cols = {}) {
  Matrix m = evaluate(qs, ctx, a);
  m = with_row_order(m, ground_string(qs.classical, ctx.sigma, rows), qs.range());
  m = with_col_order(m, ground_string(qs.classical, ctx.sigma, cols), qs.range());
  return m.data;
}

/// Frobenius distance between ζ(a) and ζ(b) after aligning b to a's register order.
double distance(const QuantumStructure& qs, const Context& ctx, const FormalOp& a, const FormalOp& b) {
  const Matrix l = evaluate(qs, ctx, a);
  Matrix r = evaluate(qs, ctx, b);
  if (!same_register_set(l.rows, r.rows) || !same_register_set(l.cols, r.cols))
    throw EvalError("signatures differ: " + to_string(GroundSignature{l.rows, l.cols}) + " vs " +
                    to_string(GroundSignature{r.rows, r.cols}));
  r = with_row_order(r, l.rows, qs.range());
  r = with_col_order(r, l.cols, qs.range());
  return (l.data - r.data).norm();
}

QuantumStructure library_structure(const SuiteOptions& opts, IntRange range = {-8, 16}) {
  Config cfg;
  cfg.int_range = range;
  cfg.tol = opts.tol;
  cfg.samples = opts.samples;
  cfg.seed = opts.seed;
  return standard_structure(cfg);
}

std::string fmt(double d) { return format_real(d); }

std::string bits_text(bool x, bool y) { return std::string("x=") + (x ? "1" : "0") + " y=" + (y ? "1" : "0"); }

}  // namespace

FormalOp bell(const Expr& x, const Expr& y, const QuantumRef& a, const QuantumRef& b) {
  const Expr sign = Expr::cond(x, lit(-1), lit(1));
  const FormalOp first = FormalOp::tensor(ket(0, a), FormalOp::ket(y, b));
  const FormalOp second = FormalOp::tensor(ket(1, a), FormalOp::ket(Expr::app("not", {y}), b));
  return Expr::complex(kHalfRoot) * (first + sign * second);
}

// ---------------------------------------------------------------- recursive definitions

std::vector<std::shared_ptr<const RecursiveDef>> StateLibrary::defs() const {
  return {eqsup, ghz, basis_state, qft_prefix, qft_state};
}

std::shared_ptr<const RecursiveDef> StateLibrary::find(const std::string& name) const {
  for (const auto& d : defs())
    if (d && d->name == name) return d;
  return nullptr;
}

RegisterString array_section(const QuantumVarPtr& q, std::int64_t lo, std::int64_t hi) {
  RegisterString rs;
  for (std::int64_t i = lo; i <= hi; ++i) rs.emplace_back(q, std::vector<Expr>{lit(i)});
  return rs;
}

StateLibrary make_state_library(QuantumVarPtr q, const std::string& bits) {
  if (!q) q = make_qvar("q", kIntToBool);
  if (q->type != kIntToBool)
    throw TypeError("state definitions need a qubit array of type Int -> Bool, got " + q->name + " : " +
                    to_string(q->type));
  StateLibrary lib;
  lib.q = q;
  lib.bits = bits;

  const Expr m = int_var("m"), n = int_var("n"), k = int_var("k"), l = int_var("l"), r = int_var("r");
  auto at = [q](const Expr& i) { return QuantumRef(q, {i}); };
  auto bit = [bits](const Expr& i) { return Expr::subscript(bits, kIntToBool, {i}); };
  const auto I = builtin_constant("I");
  const auto CNOT = builtin_constant("CNOT");
  const std::vector<std::pair<std::string, BasicType>> mn{{"m", BasicType::Int}, {"n", BasicType::Int}};
  const std::vector<std::pair<std::string, BasicType>> kl{{"k", BasicType::Int}, {"l", BasicType::Int}};

  {
    auto def = std::make_shared<RecursiveDef>();
    def->name = "eqsup";
    def->params = mn;
    const std::shared_ptr<const RecursiveDef> self = def;
    def->cases.push_back({Formula::atom(eq(n, m)), plus_state(at(m)), {}});
    def->cases.push_back(
        {holds(">", n, m), FormalOp::tensor(FormalOp::call(self, {m, n - lit(1)}), plus_state(at(n))), {}});
    lib.eqsup = def;
  }
  {
    auto def = std::make_shared<RecursiveDef>();
    def->name = "ghz";
    def->params = mn;
    std::weak_ptr<const RecursiveDef> self = def;
    def->cases.push_back({Formula::atom(eq(n, m)), plus_state(at(m)), {}});
    // CNOT[q[n-1], q[n]] only covers two of the qubits; the rest of the
    // section is padded with the identity so the product signs.
    def->cases.push_back({holds(">", n, m), std::nullopt, [self, q, I, CNOT](const std::vector<Value>& a) {
                            const auto mv = as_int(a.at(0)), nv = as_int(a.at(1));
                            auto cell = [q](std::int64_t i) { return QuantumRef(q, {Expr::integer(i)}); };
                            FormalOp gate = sol::apply(CNOT, {cell(nv - 1), cell(nv)});
                            const RegisterString pad = array_section(q, mv, nv - 2);
                            if (!pad.empty()) gate = FormalOp::tensor(sol::apply(I, pad), gate);
                            const FormalOp prev = FormalOp::call(self.lock(), {Expr::integer(mv), Expr::integer(nv - 1)});
                            return gate * FormalOp::tensor(prev, FormalOp::ket(Expr::integer(0), cell(nv)));
                          }});
    lib.ghz = def;
  }
  {
    auto def = std::make_shared<RecursiveDef>();
    def->name = "basis_state";
    def->params = kl;
    const std::shared_ptr<const RecursiveDef> self = def;
    const Formula from_one = holds("<=", lit(1), k);
    def->cases.push_back({Formula::conj(from_one, Formula::atom(eq(l, k))), FormalOp::ket(bit(l), at(l)), {}});
    def->cases.push_back({Formula::conj(from_one, holds("<", k, l)),
                          FormalOp::tensor(FormalOp::call(self, {k, l - lit(1)}), FormalOp::ket(bit(l), at(l))),
                          {}});
    lib.basis_state = def;
  }
  {
    auto def = std::make_shared<RecursiveDef>();
    def->name = "qft_prefix";
    def->params = {{"k", BasicType::Int}, {"r", BasicType::Int}, {"l", BasicType::Int}};
    def->captured = {{bits, kIntToBool}};
    std::weak_ptr<const RecursiveDef> self = def;
    const Formula in_range = Formula::conj(holds("<=", lit(1), k), holds("<=", r, l));
    // base: (|0> + e^{2πi 0.j[l]} |1>)/√2 on q[k]
    const Expr base_fraction = Expr::cond(bit(l), Expr::complex(0.5), Expr::complex(0.0));
    def->cases.push_back({Formula::conj(in_range, Formula::atom(eq(r, k))), plus_state(at(k), phase_of(base_fraction)), {}});
    // step: qubit q[r] carries 0.j[l-(r-k) : l]
    def->cases.push_back({Formula::conj(in_range, holds("<", k, r)), std::nullopt,
                          [self, q, bits](const std::vector<Value>& a) {
                            const auto kv = as_int(a.at(0)), rv = as_int(a.at(1)), lv = as_int(a.at(2));
                            const QuantumRef cell(q, {Expr::integer(rv)});
                            const FormalOp prev = FormalOp::call(
                                self.lock(), {Expr::integer(kv), Expr::integer(rv - 1), Expr::integer(lv)});
                            return FormalOp::tensor(prev,
                                                    plus_state(cell, phase_of(binary_fraction(bits, lv - (rv - kv), lv))));
                          }});
    lib.qft_prefix = def;
  }
  {
    auto def = std::make_shared<RecursiveDef>();
    def->name = "qft_state";
    def->params = kl;
    const Formula guard = Formula::all_of({holds("<=", lit(1), k), holds("<=", k, l), holds("<=", l - k, lit(5))});
    def->cases.push_back({guard, FormalOp::call(lib.qft_prefix, {k, l, l}), {}});
    lib.qft_state = def;
  }
  return lib;
}

State bits_state(const std::string& bits, std::uint64_t value, int l) {
  State s;
  ArrayValue arr;
  for (int t = 1; t <= l; ++t) arr.cells[{t}] = Value{((value >> (l - t)) & 1U) != 0};
  s.arrays[bits] = arr;
  return s;
}

double qft_residual(const QuantumStructure& qs, const StateLibrary& lib, int l, std::uint64_t j) {
  Context ctx{bits_state(lib.bits, j, l), {}};
  const RegisterString regs = array_section(lib.q, 1, l);
  const FormalOp input = FormalOp::call(lib.basis_state, {lit(1), lit(l)});
  const FormalOp transformed = sol::apply(builtin_constant("QFT"), regs, {lit(l)}) * input;
  const FormalOp product_form = FormalOp::call(lib.qft_state, {lit(1), lit(l)});
  const CMatrix a = aligned(qs, ctx, transformed, regs);
  const CMatrix b = aligned(qs, ctx, product_form, regs);
  const CMatrix dft = dft_matrix(l).col(static_cast<Eigen::Index>(j));
  return std::max({max_abs(a - b), max_abs(a - dft), max_abs(b - dft)});
}

// ---------------------------------------------------------------- teleportation

FormalOp teleport_branch(bool x, bool y, bool m, bool ma, const QuantumRef& q, const QuantumRef& qa,
                         const QuantumRef& qb, const TeleportOptions& opts) {
  const auto I = builtin_constant("I");
  const FormalOp entangle = FormalOp::tensor(sol::apply(builtin_constant("CNOT"), {q, qa}), sol::apply(I, {qb}));
  const FormalOp rotate = FormalOp::tensor(sol::apply(builtin_constant("H"), {q}), sol::apply(I, {qa, qb}));
  const FormalOp measure = tensor({bra(m, q), bra(ma, qa), sol::apply(I, {qb})});
  FormalOp op = measure * (rotate * entangle);
  if (opts.x_correction && (y != ma)) op = sol::apply(builtin_constant("X"), {qb}) * op;
  if (opts.z_correction && (x != m)) op = sol::apply(builtin_constant("Z"), {qb}) * op;
  if (opts.phase_correction && x && ma) op = sol::apply(builtin_constant("Ph"), {qb}) * op;
  return op;
}

std::vector<BranchCheck> teleport_verify(bool x, bool y, const TeleportOptions& opts, double tol) {
  Config cfg;
  cfg.tol = tol;
  const QuantumStructure qs = standard_structure(cfg);
  const QuantumRef q(make_qubit("q")), qa(make_qubit("q_a")), qb(make_qubit("q_b"));
  const struct {
    const char* name;
    Complex alpha, beta;
  } inputs[] = {{"(1, 0)", 1.0, 0.0}, {"(0, 1)", 0.0, 1.0}, {"(1/sqrt2, i/sqrt2)", kHalfRoot, Complex(0, kHalfRoot)}};

  std::vector<BranchCheck> out;
  const Context ctx;
  for (bool m : {false, true})
    for (bool ma : {false, true}) {
      const FormalOp branch = teleport_branch(x, y, m, ma, q, qa, qb, opts);
      for (const auto& in : inputs) {
        auto psi = [&](const QuantumRef& r) {
          return Expr::complex(in.alpha) * ket(0, r) + Expr::complex(in.beta) * ket(1, r);
        };
        const FormalOp start = FormalOp::tensor(psi(q), bell(Expr::boolean(x), Expr::boolean(y), qa, qb));
        const FormalOp expected = Expr::complex(0.5) * psi(qb);
        BranchCheck c{x, y, m, ma, in.name, 0.0, false};
        c.residual = distance(qs, ctx, branch * start, expected);
        c.ok = c.residual <= tol;
        out.push_back(c);
      }
    }
  return out;
}

// ---------------------------------------------------------------- Z-Y decomposition and Bloch angles

ZYAngles zy_decompose(const CMatrix& u, double tol) {
  if (u.rows() != 2 || u.cols() != 2) throw EvalError("Z-Y decomposition needs a 2x2 matrix");
  if (!is_unitary(u, tol)) throw EvalError("Z-Y decomposition needs a unitary matrix");
  ZYAngles out;
  out.theta = std::arg(u.determinant()) / 2.0;
  // v = e^{-iθ} u = [[e^{-i(β+δ)/2} c, ...], [e^{i(β-δ)/2} s, ...]]
  const CMatrix v = u * std::exp(Complex(0.0, -out.theta));
  const Complex a = v(0, 0), b = v(1, 0);
  out.theta2 = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double sum = -2.0 * std::arg(a);
  const double diff = 2.0 * std::arg(b);
  out.theta1 = (sum + diff) / 2.0;
  out.theta3 = (sum - diff) / 2.0;
  return out;
}

CMatrix zy_reconstruct(const ZYAngles& a) {
  return std::exp(Complex(0.0, a.theta)) * rotation('z', a.theta1) * rotation('y', a.theta2) *
         rotation('z', a.theta3);
}

FormalOp zy_term(const ZYAngles& a, const QuantumRef& q) {
  auto rot = [&](const char* name, double t) {
    return sol::apply(builtin_constant(name), {q}, {Expr::complex(t)});
  };
  const Expr global = Expr::app("exp", {Expr::complex(Complex(0.0, a.theta))});
  return global * (rot("R_z", a.theta1) * (rot("R_y", a.theta2) * rot("R_z", a.theta3)));
}

BlochAngles bloch(Complex alpha, Complex beta, double tol) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > tol)
    throw EvalError("Bloch angles need |alpha|^2 + |beta|^2 = 1");
  BlochAngles out;
  out.theta = 2.0 * std::atan2(std::abs(beta), std::abs(alpha));
  out.gamma = std::abs(alpha) > 0 ? std::arg(alpha) : std::arg(beta);
  if (std::abs(beta) > 0) {
    out.phi = std::remainder(std::arg(beta) - out.gamma, 2.0 * kPi);
    if (out.phi < 0) out.phi += 2.0 * kPi;
  }
  return out;
}

std::pair<Complex, Complex> bloch_state(const BlochAngles& a) {
  const Complex g = std::exp(Complex(0.0, a.gamma));
  return {g * std::cos(a.theta / 2.0), g * std::exp(Complex(0.0, a.phi)) * std::sin(a.theta / 2.0)};
}

// ---------------------------------------------------------------- no-cloning

std::optional<CloningWitness> no_cloning_refute(const CMatrix& u, double tol) {
  if (u.rows() != 4 || u.cols() != 4 || !is_unitary(u, tol)) throw EvalError("no-cloning needs a 4x4 unitary");
  Config cfg;
  cfg.tol = tol;
  const QuantumStructure qs = standard_structure(cfg);
  const QuantumRef a(make_qubit("a")), b(make_qubit("b"));
  const auto U = std::make_shared<const OperatorVarDecl>(
      OperatorVarDecl{"U", QuantumType{{BasicType::Bool, BasicType::Bool}, {BasicType::Bool, BasicType::Bool}}});
  const Context ctx{{}, {{"U", u}}};
  const FormalOp machine = FormalOp::var(U, Signature{{a, b}, {a, b}});
  const std::pair<const char*, std::function<FormalOp(const QuantumRef&)>> witnesses[] = {
      {"|0>", [](const QuantumRef& r) { return ket(0, r); }},
      {"|1>", [](const QuantumRef& r) { return ket(1, r); }},
      {"|+>", [](const QuantumRef& r) { return plus_state(r); }},
  };
  for (const auto& [name, psi] : witnesses) {
    const double d = distance(qs, ctx, machine * FormalOp::tensor(psi(a), ket(0, b)), FormalOp::tensor(psi(a), psi(b)));
    if (d > tol) return CloningWitness{name, d};
  }
  return std::nullopt;
}

SolFormula no_cloning_formula(const QuantumRef& a, const QuantumRef& b) {
  const auto U = std::make_shared<const OperatorVarDecl>(
      OperatorVarDecl{"U", QuantumType{{BasicType::Bool, BasicType::Bool}, {BasicType::Bool, BasicType::Bool}}});
  const auto psi = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{"psi", QuantumType{{BasicType::Bool}, {}}});
  const FormalOp machine = FormalOp::var(U, Signature{{a, b}, {a, b}});
  const FormalOp psi_a = FormalOp::var(psi, Signature{{a}, {}});
  const FormalOp psi_b = FormalOp::var(psi, Signature{{b}, {}});
  const SolFormula copies =
      SolFormula::implies(SolFormula::predicate(PredicateKind::PureState, psi_a, RegisterString{a}),
                          SolFormula::equal(machine * FormalOp::tensor(psi_a, ket(0, b)), FormalOp::tensor(psi_a, psi_b)));
  const SolFormula cloner =
      SolFormula::conj(SolFormula::predicate(PredicateKind::Unitary, machine, RegisterString{a, b}),
                       SolFormula::quant_op(SolFormula::Quantifier::ForAll, psi, copies));
  return SolFormula::negation(SolFormula::quant_op(SolFormula::Quantifier::Exists, U, cloner));
}

// ---------------------------------------------------------------- projection

FormalOp projection_example(const QuantumVarPtr& q, std::int64_t k, std::int64_t l) {
  if (l < k || l - k + 1 > 12) throw EvalError("projection needs 1 to 12 qubits");
  const RegisterString regs = array_section(q, k, l);
  std::vector<FormalOp> kets, bras;
  for (const auto& r : regs) {
    kets.push_back(ket(0, r));
    bras.push_back(bra(0, r));
  }
  return sol::apply(builtin_constant("I"), regs) + lit(-1) * (tensor(kets) * tensor(bras));
}

Judgement projection_check(const QuantumStructure& qs, const QuantumVarPtr& q, std::int64_t k, std::int64_t l) {
  const FormalOp p = projection_example(q, k, l);
  const RegisterString regs = array_section(q, k, l);
  const Context ctx;
  const CMatrix m = aligned(qs, ctx, p, regs, regs);
  const double tol = qs.tol();
  if (max_abs(m * m - m) > tol) return Judgement::no("P*P differs from P");
  if (max_abs(m.adjoint() - m) > tol) return Judgement::no("P is not self-adjoint");
  const double rank = std::ldexp(1.0, static_cast<int>(l - k + 1)) - 1.0;
  if (std::abs(m.trace() - rank) > tol) return Judgement::no("tr P = " + to_string(Value{m.trace()}));
  if (auto j = compare(qs, ctx, p * p, p, Relation::Equal); !j) return Judgement::no("P*P == P: " + j.reason);
  return Judgement::yes();
}

// ---------------------------------------------------------------- suites

SuiteReport teleport_suite(const SuiteOptions& opts) {
  SuiteReport rep{"teleport", {}};
  std::vector<BranchCheck> all;
  for (bool x : {false, true})
    for (bool y : {false, true})
      for (const auto& c : teleport_verify(x, y, {}, opts.tol)) all.push_back(c);
  rep.cases.push_back(run_case("branches", all.size(), [&](std::size_t i) -> Failure {
    const auto& c = all[i];
    if (c.ok) return std::nullopt;
    return bits_text(c.x, c.y) + " m=" + (c.m ? "1" : "0") + " m_a=" + (c.ma ? "1" : "0") + " input " + c.input +
           ": residual " + fmt(c.residual);
  }));
  const std::pair<const char*, TeleportOptions> mutations[] = {
      {"dropping the X correction is detected", {false, true, true}},
      {"dropping the Z correction is detected", {true, false, true}},
      {"dropping the phase correction is detected", {true, true, false}},
  };
  for (const auto& [name, mutated] : mutations) {
    std::size_t failures = 0;
    for (bool x : {false, true})
      for (bool y : {false, true})
        for (const auto& c : teleport_verify(x, y, mutated, opts.tol)) failures += c.ok ? 0 : 1;
    auto c = run_case(name, 1, [&](std::size_t) -> Failure {
      if (failures > 0) return std::nullopt;
      return std::string("all branches still pass");
    });
    c.note = std::to_string(failures) + " failing checks";
    rep.cases.push_back(c);
  }
  return rep;
}

SuiteReport qft_suite(const SuiteOptions& opts) {
  SuiteReport rep{"qft", {}};
  const QuantumStructure qs = library_structure(opts);
  const StateLibrary lib = make_state_library();
  for (int l = 1; l <= 5; ++l) {
    const std::size_t count = std::size_t{1} << l;
    rep.cases.push_back(run_case("l = " + std::to_string(l), count, [&](std::size_t j) -> Failure {
      const double r = qft_residual(qs, lib, l, j);
      if (r <= opts.tol) return std::nullopt;
      return "j = " + std::to_string(j) + ": deviation " + fmt(r);
    }));
  }
  rep.cases.push_back(run_case("zero bits give the equal superposition", 5, [&](std::size_t i) -> Failure {
    const int l = static_cast<int>(i) + 1;
    const Context ctx{bits_state(lib.bits, 0, l), {}};
    const double d = distance(qs, ctx, FormalOp::call(lib.qft_state, {lit(1), lit(l)}),
                              FormalOp::call(lib.eqsup, {lit(1), lit(l)}));
    if (d <= opts.tol) return std::nullopt;
    return "l = " + std::to_string(l) + ": distance " + fmt(d);
  }));
  return rep;
}

SuiteReport ghz_suite(const SuiteOptions& opts) {
  SuiteReport rep{"ghz", {}};
  const QuantumStructure qs = library_structure(opts);
  const StateLibrary lib = make_state_library();
  const Expr m = int_var("m"), n = int_var("n");

  CheckResult entail;
  rep.cases.push_back(run_case("m = n entails S(m,n) = GHZ(m,n)", 1, [&](std::size_t) -> Failure {
    EntailmentQuery query;
    query.sigma = {Formula::atom(eq(m, n))};
    query.goal = SolFormula::equal(FormalOp::call(lib.eqsup, {m, n}), FormalOp::call(lib.ghz, {m, n}));
    query.ranges = {{"m", {0, 10}}, {"n", {0, 10}}};
    query.sampling = {opts.samples, opts.seed};
    entail = check_entailment(qs, query);
    if (entail.verdict == Verdict::Valid) return std::nullopt;
    return to_string(entail.verdict) + ": " + entail.reason;
  }));
  rep.cases.back().note = std::to_string(entail.stats.satisfying) + " satisfying states";

  rep.cases.push_back(run_case("GHZ(0,2) matches the hand-built state", 1, [&](std::size_t) -> Failure {
    const RegisterString regs = array_section(lib.q, 0, 2);
    const FormalOp by_hand =
        Expr::complex(kHalfRoot) * (tensor({ket(0, regs[0]), ket(0, regs[1]), ket(0, regs[2])}) +
                                    tensor({ket(1, regs[0]), ket(1, regs[1]), ket(1, regs[2])}));
    const Context ctx;
    const FormalOp g = FormalOp::call(lib.ghz, {lit(0), lit(2)});
    CMatrix dense = CMatrix::Zero(8, 1);
    dense(0, 0) = dense(7, 0) = kHalfRoot;
    const double d = std::max(distance(qs, ctx, g, by_hand), max_abs(aligned(qs, ctx, g, regs) - dense));
    if (d <= opts.tol) return std::nullopt;
    return "distance " + fmt(d);
  }));

  std::vector<std::pair<std::int64_t, std::int64_t>> params;
  for (std::int64_t lo = 0; lo <= 6; ++lo)
    for (std::int64_t hi = lo; hi <= 6; ++hi) params.emplace_back(lo, hi);
  rep.cases.push_back(run_case("unrollings are pure states", params.size(), [&](std::size_t i) -> Failure {
    const auto [lo, hi] = params[i];
    const Context ctx;
    for (const auto& def : {lib.eqsup, lib.ghz}) {
      const auto j = check_predicate(qs, ctx, PredicateKind::PureState, FormalOp::call(def, {lit(lo), lit(hi)}));
      if (!j) return def->name + "(" + std::to_string(lo) + "," + std::to_string(hi) + "): " + j.reason;
    }
    return std::nullopt;
  }));

  rep.cases.push_back(run_case("m > n has no case", 1, [&](std::size_t) -> Failure {
    try {
      evaluate(qs, Context{}, FormalOp::call(lib.ghz, {lit(3), lit(2)}));
    } catch (const EvalError&) {
      return std::nullopt;
    }
    return std::string("GHZ(3,2) evaluated");
  }));
  return rep;
}

SuiteReport zy_suite(const SuiteOptions& opts) {
  SuiteReport rep{"zy", {}};
  Config cfg;
  cfg.tol = opts.tol;
  const QuantumStructure qs = standard_structure(cfg);
  const QuantumRef q(make_qubit("q"));

  // dense rebuild and, independently, Σ a_ij |i><j| == e^{iθ} R_z R_y R_z through evaluation
  auto check = [&](const CMatrix& u) -> Failure {
    const ZYAngles a = zy_decompose(u, opts.tol);
    const double dense = max_abs(zy_reconstruct(a) - u);
    if (dense > opts.tol) return "rebuild deviates by " + fmt(dense);
    std::vector<std::vector<Expr>> coeffs(2, std::vector<Expr>(2));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) coeffs[i][j] = Expr::complex(u(i, j));
    const Context ctx;
    if (auto j = compare(qs, ctx, coefficient_operator(coeffs, {q}), zy_term(a, q), Relation::Equal); !j)
      return "evaluated forms differ: " + j.reason;
    return std::nullopt;
  };

  rep.cases.push_back(run_case("identity", 1, [&](std::size_t) -> Failure {
    const ZYAngles a = zy_decompose(CMatrix::Identity(2, 2), opts.tol);
    if (std::abs(a.theta2) > opts.tol) return "theta2 = " + fmt(a.theta2);
    return check(CMatrix::Identity(2, 2));
  }));
  rep.cases.push_back(run_case("Hadamard", 1, [&](std::size_t) { return check(hadamard()); }));
  rep.cases.push_back(run_case("Pauli gates", 3, [&](std::size_t i) {
    return check(i == 0 ? pauli_x() : i == 1 ? pauli_y() : pauli_z());
  }));
  Rng rng(mix_seed(opts.seed, "zy"));
  rep.cases.push_back(run_case("Haar unitaries", opts.instances, [&](std::size_t) { return check(haar_unitary(2, rng)); }));
  rep.cases.push_back(run_case("non-unitary input is rejected", 1, [&](std::size_t) -> Failure {
    CMatrix bad = CMatrix::Identity(2, 2);
    bad(0, 1) = 0.5;
    try {
      zy_decompose(bad, opts.tol);
    } catch (const EvalError&) {
      return std::nullopt;
    }
    return std::string("accepted");
  }));
  return rep;
}

SuiteReport bloch_suite(const SuiteOptions& opts) {
  SuiteReport rep{"bloch", {}};
  auto rebuilds = [&](Complex alpha, Complex beta, const BlochAngles& b) -> Failure {
    const auto [a2, b2] = bloch_state(b);
    const double d = std::max(std::abs(a2 - alpha), std::abs(b2 - beta));
    if (d > opts.tol) return "rebuild deviates by " + fmt(d);
    if (b.theta < 0 || b.theta > kPi || b.phi < 0 || b.phi >= 2.0 * kPi) return std::string("angle out of range");
    return std::nullopt;
  };
  const struct {
    const char* name;
    Complex alpha, beta;
    double theta, phi;
  } fixed[] = {{"north pole", 1.0, 0.0, 0.0, 0.0},
               {"(1/sqrt2, 1/sqrt2)", kHalfRoot, kHalfRoot, kPi / 2, 0.0},
               {"(1/sqrt2, i/sqrt2)", kHalfRoot, Complex(0, kHalfRoot), kPi / 2, kPi / 2}};
  for (const auto& f : fixed)
    rep.cases.push_back(run_case(f.name, 1, [&](std::size_t) -> Failure {
      const BlochAngles b = bloch(f.alpha, f.beta, opts.tol);
      if (std::abs(b.theta - f.theta) > opts.tol || std::abs(b.phi - f.phi) > opts.tol || std::abs(b.gamma) > opts.tol)
        return "theta = " + fmt(b.theta) + ", phi = " + fmt(b.phi) + ", gamma = " + fmt(b.gamma);
      return rebuilds(f.alpha, f.beta, b);
    }));
  Rng rng(mix_seed(opts.seed, "bloch"));
  rep.cases.push_back(run_case("random states", opts.instances, [&](std::size_t) {
    const CMatrix v = random_unit_vector(2, rng);
    return rebuilds(v(0, 0), v(1, 0), bloch(v(0, 0), v(1, 0), opts.tol));
  }));
  rep.cases.push_back(run_case("unnormalised input is rejected", 1, [&](std::size_t) -> Failure {
    try {
      bloch(1.0, 1.0, opts.tol);
    } catch (const EvalError&) {
      return std::nullopt;
    }
    return std::string("accepted");
  }));
  return rep;
}

SuiteReport nocloning_suite(const SuiteOptions& opts) {
  SuiteReport rep{"nocloning", {}};
  auto expect = [&](const CMatrix& u, const std::string& want) -> Failure {
    const auto w = no_cloning_refute(u, opts.tol);
    if (!w) return std::string("no witness");
    if (!want.empty() && w->state != want) return "witness " + w->state + ", expected " + want;
    return std::nullopt;
  };
  rep.cases.push_back(run_case("identity is refuted by |1>", 1, [&](std::size_t) {
    return expect(CMatrix::Identity(4, 4), "|1>");
  }));
  rep.cases.push_back(run_case("CNOT is refuted by |+>", 1, [&](std::size_t) { return expect(cnot_matrix(), "|+>"); }));
  Rng rng(mix_seed(opts.seed, "nocloning"));
  std::map<std::string, std::size_t> found;
  rep.cases.push_back(run_case("Haar unitaries", opts.instances, [&](std::size_t) -> Failure {
    const auto w = no_cloning_refute(haar_unitary(4, rng), opts.tol);
    if (!w) return std::string("no witness");
    ++found[w->state];
    return std::nullopt;
  }));
  for (const auto& [state, count] : found)
    rep.cases.back().note += (rep.cases.back().note.empty() ? "" : ", ") + state + ": " + std::to_string(count);

  rep.cases.push_back(run_case("the raw formula is Unknown (sampled)", 1, [&](std::size_t) -> Failure {
    Config cfg;
    cfg.tol = opts.tol;
    const QuantumStructure qs = standard_structure(cfg);
    EntailmentQuery query;
    query.goal = no_cloning_formula(QuantumRef(make_qubit("a")), QuantumRef(make_qubit("b")));
    query.sampling = {opts.samples, opts.seed};
    const CheckResult r = check_entailment(qs, query);
    if (r.verdict == Verdict::Unknown && r.reason == "sampled") return std::nullopt;
    return to_string(r.verdict) + ": " + r.reason;
  }));
  return rep;
}

SuiteReport projection_suite(const SuiteOptions& opts) {
  SuiteReport rep{"projection", {}};
  const QuantumStructure qs = library_structure(opts);
  const auto q = make_qvar("q", kIntToBool);
  const std::pair<std::int64_t, std::int64_t> sections[] = {{1, 1}, {0, 2}, {3, 6}, {-2, 3}, {1, 8}};
  rep.cases.push_back(run_case("projector of the right rank", std::size(sections), [&](std::size_t i) -> Failure {
    const auto [k, l] = sections[i];
    const auto j = projection_check(qs, q, k, l);
    if (j) return std::nullopt;
    return "[" + std::to_string(k) + ", " + std::to_string(l) + "]: " + j.reason;
  }));
  rep.cases.push_back(run_case("one qubit gives |1><1|", 1, [&](std::size_t) -> Failure {
    const QuantumRef r(q, {lit(4)});
    if (auto j = compare(qs, Context{}, projection_example(q, 4, 4), ket(1, r) * bra(1, r), Relation::Equal); !j)
      return j.reason;
    return std::nullopt;
  }));
  return rep;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"axioms",   "schemas", "order", "substitution", "signing",
                                              "rewrite",  "deduction", "teleport", "qft",     "ghz",
                                              "zy",       "bloch",   "nocloning", "projection"};
  return names;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  static const std::map<std::string, SuiteReport (*)(const SuiteOptions&)> table{
      {"axioms", axiom_suite},       {"schemas", schema_suite},     {"order", order_laws_suite},
      {"substitution", substitution_suite}, {"signing", signing_suite}, {"rewrite", rewrite_suite},
      {"deduction", deduction_suite}, {"teleport", teleport_suite}, {"qft", qft_suite},
      {"ghz", ghz_suite},             {"zy", zy_suite},              {"bloch", bloch_suite},
      {"nocloning", nocloning_suite}, {"projection", projection_suite}};
  const auto it = table.find(name);
  if (it == table.end()) throw EvalError("unknown suite '" + name + "'");
  return it->second(opts);
}

}  // namespace sol

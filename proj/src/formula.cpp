#include "sol/formula.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <set>

#include "sol/sampling.hpp"

namespace sol {

std::string to_string(CmpRel r) {
  switch (r) {
    case CmpRel::Eq:
      return "=";
    case CmpRel::Lt:
      return "<";
    case CmpRel::Gt:
      return ">";
  }
  return "?";
}

struct SolFormulaFactory {
  static SolFormula make(SolNode n) { return SolFormula(std::make_shared<const SolNode>(std::move(n))); }
};

namespace {

SolFormula wrap(SolNode n) { return SolFormulaFactory::make(std::move(n)); }

}  // namespace

SolFormula SolFormula::norm(FormalOp a, CmpRel rel, double lambda) { return wrap({NormAtom{std::move(a), rel, lambda}}); }

SolFormula SolFormula::trace(FormalOp a, CmpRel rel, Complex lambda) {
  if (rel != CmpRel::Eq && lambda.imag() != 0.0) throw TypeError("trace comparison with < or > needs a real constant");
  return wrap({TraceAtom{std::move(a), rel, lambda}});
}

SolFormula SolFormula::predicate(PredicateKind kind, FormalOp a, std::optional<RegisterString> regs) {
  return wrap({PredAtom{kind, std::move(a), std::move(regs)}});
}

SolFormula SolFormula::equal(FormalOp a, FormalOp b) { return wrap({EqAtom{std::move(a), std::move(b)}}); }
SolFormula SolFormula::leq(FormalOp a, FormalOp b) { return wrap({LeqAtom{std::move(a), std::move(b)}}); }
SolFormula SolFormula::classical(Formula f) { return wrap({ClassicalAtom{std::move(f)}}); }
SolFormula SolFormula::negation(SolFormula f) { return wrap({SolNot{std::move(f)}}); }
SolFormula SolFormula::binary(BinOp op, SolFormula a, SolFormula b) {
  return wrap({SolBin{op, std::move(a), std::move(b)}});
}

SolFormula SolFormula::quant(Quantifier q, std::string var, BasicType type, SolFormula body) {
  return wrap({SolQuant{q, std::move(var), type, std::move(body)}});
}

SolFormula SolFormula::quant_op(Quantifier q, OpVarPtr var, SolFormula body) {
  return wrap({SolOpQuant{q, std::move(var), std::move(body)}});
}

SolFormula SolFormula::all_of(const std::vector<SolFormula>& fs) {
  if (fs.empty()) return classical(Formula::truth(true));
  SolFormula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

bool operator==(const SolFormula& a, const SolFormula& b) {
  if (&a.node() == &b.node()) return true;
  const auto& x = a.node().v;
  const auto& y = b.node().v;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& l) -> bool {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(y);
        if constexpr (std::is_same_v<T, NormAtom> || std::is_same_v<T, TraceAtom>) {
          return l.a == r.a && l.rel == r.rel && l.lambda == r.lambda;
        } else if constexpr (std::is_same_v<T, PredAtom>) {
          return l.kind == r.kind && l.a == r.a && l.regs == r.regs;
        } else if constexpr (std::is_same_v<T, EqAtom> || std::is_same_v<T, LeqAtom>) {
          return l.a == r.a && l.b == r.b;
        } else if constexpr (std::is_same_v<T, ClassicalAtom>) {
          return l.f == r.f;
        } else if constexpr (std::is_same_v<T, SolNot>) {
          return l.body == r.body;
        } else if constexpr (std::is_same_v<T, SolBin>) {
          return l.op == r.op && l.lhs == r.lhs && l.rhs == r.rhs;
        } else if constexpr (std::is_same_v<T, SolQuant>) {
          return l.q == r.q && l.var == r.var && l.type == r.type && l.body == r.body;
        } else {
          return l.q == r.q && l.var->name == r.var->name && l.var->type == r.var->type && l.body == r.body;
        }
      },
      x);
}

std::string to_string(const SolFormula& f) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NormAtom>) {
          return "norm(" + to_string(x.a) + ") " + to_string(x.rel) + " " + format_real(x.lambda);
        } else if constexpr (std::is_same_v<T, TraceAtom>) {
          return "tr(" + to_string(x.a) + ") " + to_string(x.rel) + " " + to_string(Value{x.lambda});
        } else if constexpr (std::is_same_v<T, PredAtom>) {
          std::string s = to_string(x.kind) + "(" + to_string(x.a) + ")";
          if (x.regs) s += x.regs->size() == 1 ? " : " + to_string(*x.regs) : " : (" + to_string(*x.regs) + ")";
          return s;
        } else if constexpr (std::is_same_v<T, EqAtom>) {
          return "(" + to_string(x.a) + " == " + to_string(x.b) + ")";
        } else if constexpr (std::is_same_v<T, LeqAtom>) {
          return "(" + to_string(x.a) + " <= " + to_string(x.b) + ")";
        } else if constexpr (std::is_same_v<T, ClassicalAtom>) {
          return "{" + to_string(x.f) + "}";
        } else if constexpr (std::is_same_v<T, SolNot>) {
          return "!" + to_string(x.body);
        } else if constexpr (std::is_same_v<T, SolBin>) {
          const char* op = x.op == SolFormula::BinOp::And ? " & " : x.op == SolFormula::BinOp::Or ? " || " : " -> ";
          return "(" + to_string(x.lhs) + op + to_string(x.rhs) + ")";
        } else if constexpr (std::is_same_v<T, SolQuant>) {
          return std::string("(") + (x.q == SolFormula::Quantifier::ForAll ? "forall " : "exists ") + x.var + ":" +
                 to_string(x.type) + " . " + to_string(x.body) + ")";
        } else {
          return std::string("(") + (x.q == SolFormula::Quantifier::ForAll ? "forallOp " : "existsOp ") +
                 x.var->name + " : " + to_string(x.var->type) + " . " + to_string(x.body) + ")";
        }
      },
      f.node().v);
}

// ---------------------------------------------------------------- free variables

namespace {

void collect_regs(const RegisterString& rs, std::map<std::string, VarType>& out) {
  for (const auto& r : rs)
    for (const auto& e : r.indices) collect_vars(e, out);
}

void free_classical(const SolFormula& f, std::map<std::string, VarType>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NormAtom> || std::is_same_v<T, TraceAtom>) {
          collect_classical_vars(x.a, out);
        } else if constexpr (std::is_same_v<T, PredAtom>) {
          collect_classical_vars(x.a, out);
          if (x.regs) collect_regs(*x.regs, out);
        } else if constexpr (std::is_same_v<T, EqAtom> || std::is_same_v<T, LeqAtom>) {
          collect_classical_vars(x.a, out);
          collect_classical_vars(x.b, out);
        } else if constexpr (std::is_same_v<T, ClassicalAtom>) {
          for (auto& [n, t] : free_vars(x.f)) out.emplace(n, t);
        } else if constexpr (std::is_same_v<T, SolNot>) {
          free_classical(x.body, out);
        } else if constexpr (std::is_same_v<T, SolBin>) {
          free_classical(x.lhs, out);
          free_classical(x.rhs, out);
        } else if constexpr (std::is_same_v<T, SolQuant>) {
          std::map<std::string, VarType> inner;
          free_classical(x.body, inner);
          inner.erase(x.var);
          out.insert(inner.begin(), inner.end());
        } else {
          free_classical(x.body, out);
        }
      },
      f.node().v);
}

void free_operators(const SolFormula& f, std::map<std::string, OpVarPtr>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NormAtom> || std::is_same_v<T, TraceAtom> || std::is_same_v<T, PredAtom>) {
          collect_operator_vars(x.a, out);
        } else if constexpr (std::is_same_v<T, EqAtom> || std::is_same_v<T, LeqAtom>) {
          collect_operator_vars(x.a, out);
          collect_operator_vars(x.b, out);
        } else if constexpr (std::is_same_v<T, SolNot>) {
          free_operators(x.body, out);
        } else if constexpr (std::is_same_v<T, SolBin>) {
          free_operators(x.lhs, out);
          free_operators(x.rhs, out);
        } else if constexpr (std::is_same_v<T, SolQuant>) {
          free_operators(x.body, out);
        } else if constexpr (std::is_same_v<T, SolOpQuant>) {
          std::map<std::string, OpVarPtr> inner;
          free_operators(x.body, inner);
          inner.erase(x.var->name);
          out.insert(inner.begin(), inner.end());
        }
      },
      f.node().v);
}

}  // namespace

std::map<std::string, VarType> free_classical_vars(const SolFormula& f) {
  std::map<std::string, VarType> out;
  free_classical(f, out);
  return out;
}

std::map<std::string, OpVarPtr> free_operator_vars(const SolFormula& f) {
  std::map<std::string, OpVarPtr> out;
  free_operators(f, out);
  return out;
}

// ---------------------------------------------------------------- substitution

namespace {

/// Rebuild the atoms of f with `op` and `form`, leaving binders to `quant`.
template <class OpFn, class RegFn, class FormFn, class QuantFn, class OpQuantFn>
SolFormula rebuild(const SolFormula& f, OpFn op, RegFn regs, FormFn form, QuantFn quant, OpQuantFn opquant) {
  return std::visit(
      [&](const auto& x) -> SolFormula {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NormAtom>) {
          return SolFormula::norm(op(x.a), x.rel, x.lambda);
        } else if constexpr (std::is_same_v<T, TraceAtom>) {
          return SolFormula::trace(op(x.a), x.rel, x.lambda);
        } else if constexpr (std::is_same_v<T, PredAtom>) {
          std::optional<RegisterString> rs;
          if (x.regs) rs = regs(*x.regs);
          return SolFormula::predicate(x.kind, op(x.a), std::move(rs));
        } else if constexpr (std::is_same_v<T, EqAtom>) {
          return SolFormula::equal(op(x.a), op(x.b));
        } else if constexpr (std::is_same_v<T, LeqAtom>) {
          return SolFormula::leq(op(x.a), op(x.b));
        } else if constexpr (std::is_same_v<T, ClassicalAtom>) {
          return SolFormula::classical(form(x.f));
        } else if constexpr (std::is_same_v<T, SolNot>) {
          return SolFormula::negation(rebuild(x.body, op, regs, form, quant, opquant));
        } else if constexpr (std::is_same_v<T, SolBin>) {
          return SolFormula::binary(x.op, rebuild(x.lhs, op, regs, form, quant, opquant),
                                    rebuild(x.rhs, op, regs, form, quant, opquant));
        } else if constexpr (std::is_same_v<T, SolQuant>) {
          return quant(x);
        } else {
          return opquant(x);
        }
      },
      f.node().v);
}

std::set<std::string> names_of(const std::map<std::string, VarType>& m) {
  std::set<std::string> s;
  for (const auto& [n, t] : m) s.insert(n);
  return s;
}

SolFormula subst_simple(const SolFormula& f, const Substitution& sub) {
  if (sub.empty()) return f;
  return rebuild(
      f, [&](const FormalOp& a) { return subst_classical(a, sub); },
      [&](const RegisterString& rs) { return subst_registers(rs, sub); },
      [&](const Formula& g) { return subst_formula(g, sub); },
      [&](const SolQuant& x) -> SolFormula {
        Substitution inner = sub;
        inner.erase(x.var);
        std::set<std::string> rhs_vars;
        for (const auto& [k, t] : inner)
          for (const auto& [n, ty] : vars_of(t)) rhs_vars.insert(n);
        std::string var = x.var;
        SolFormula body = x.body;
        if (rhs_vars.count(x.var)) {
          std::set<std::string> used = names_of(free_classical_vars(x.body));
          used.insert(rhs_vars.begin(), rhs_vars.end());
          for (const auto& [k, t] : inner) used.insert(k);
          used.insert(x.var);
          var = fresh_name(x.var, used);
          body = subst_simple(body, Substitution{{x.var, Expr::var(var, x.type)}});
        }
        return SolFormula::quant(x.q, var, x.type, subst_simple(body, inner));
      },
      [&](const SolOpQuant& x) { return SolFormula::quant_op(x.q, x.var, subst_simple(x.body, sub)); });
}

SolFormula subst_cell(const SolFormula& f, const CellSubstitution& sub) {
  return rebuild(
      f, [&](const FormalOp& a) { return subst_classical(a, sub); },
      [&](const RegisterString& rs) { return subst_registers(rs, sub); },
      [&](const Formula& g) { return subst_formula(g, sub); },
      [&](const SolQuant& x) -> SolFormula {
        std::set<std::string> rhs_vars = names_of(vars_of(sub.value));
        for (const auto& e : sub.indices)
          for (const auto& [n, t] : vars_of(e)) rhs_vars.insert(n);
        std::string var = x.var;
        SolFormula body = x.body;
        if (rhs_vars.count(x.var)) {
          std::set<std::string> used = names_of(free_classical_vars(x.body));
          used.insert(rhs_vars.begin(), rhs_vars.end());
          used.insert(sub.array);
          used.insert(x.var);
          var = fresh_name(x.var, used);
          body = subst_simple(body, Substitution{{x.var, Expr::var(var, x.type)}});
        }
        return SolFormula::quant(x.q, var, x.type, subst_cell(body, sub));
      },
      [&](const SolOpQuant& x) { return SolFormula::quant_op(x.q, x.var, subst_cell(x.body, sub)); });
}

/// X'[p̄ -> p̄'] over placeholder registers, used to rename a bound operator variable.
FormalOp placeholder_application(const OpVarPtr& renamed) {
  RegisterString dom, cod;
  int k = 0;
  for (BasicType t : renamed->type.dom) dom.emplace_back(make_qvar("_p" + std::to_string(k++), VarType{{}, t}));
  for (BasicType t : renamed->type.cod) cod.emplace_back(make_qvar("_p" + std::to_string(k++), VarType{{}, t}));
  return FormalOp::var(renamed, Signature{dom, cod});
}

SolFormula subst_ops(const SolFormula& f, const std::map<std::string, FormalOp>& sub) {
  if (sub.empty()) return f;
  std::set<std::string> rhs_ops;
  std::map<std::string, VarType> rhs_classical;
  for (const auto& [k, b] : sub) {
    for (const auto& [n, d] : free_operator_vars(b)) rhs_ops.insert(n);
    collect_classical_vars(b, rhs_classical);
  }
  return rebuild(
      f, [&](const FormalOp& a) { return subst_operator(a, sub); }, [](const RegisterString& rs) { return rs; },
      [](const Formula& g) { return g; },
      [&](const SolQuant& x) -> SolFormula {
        if (!rhs_classical.count(x.var)) return SolFormula::quant(x.q, x.var, x.type, subst_ops(x.body, sub));
        std::set<std::string> used = names_of(free_classical_vars(x.body));
        const auto rv = names_of(rhs_classical);
        used.insert(rv.begin(), rv.end());
        used.insert(x.var);
        const std::string var = fresh_name(x.var, used);
        const SolFormula body = subst_simple(x.body, Substitution{{x.var, Expr::var(var, x.type)}});
        return SolFormula::quant(x.q, var, x.type, subst_ops(body, sub));
      },
      [&](const SolOpQuant& x) -> SolFormula {
        auto inner = sub;
        inner.erase(x.var->name);
        if (inner.empty()) return SolFormula::quant_op(x.q, x.var, x.body);
        std::set<std::string> inner_rhs;
        for (const auto& [k, b] : inner)
          for (const auto& [n, d] : free_operator_vars(b)) inner_rhs.insert(n);
        if (!inner_rhs.count(x.var->name)) return SolFormula::quant_op(x.q, x.var, subst_ops(x.body, inner));
        std::set<std::string> used;
        for (const auto& [n, d] : free_operator_vars(x.body)) used.insert(n);
        used.insert(inner_rhs.begin(), inner_rhs.end());
        for (const auto& [k, b] : inner) used.insert(k);
        used.insert(x.var->name);
        auto renamed = std::make_shared<const OperatorVarDecl>(OperatorVarDecl{fresh_name(x.var->name, used), x.var->type});
        const SolFormula body = subst_ops(x.body, {{x.var->name, placeholder_application(renamed)}});
        return SolFormula::quant_op(x.q, renamed, subst_ops(body, inner));
      });
}

}  // namespace

SolFormula subst_sol(const SolFormula& f, const Substitution& sub) { return subst_simple(f, sub); }
SolFormula subst_sol(const SolFormula& f, const CellSubstitution& sub) { return subst_cell(f, sub); }
SolFormula subst_sol(const SolFormula& f, const std::map<std::string, FormalOp>& sub) { return subst_ops(f, sub); }

// ---------------------------------------------------------------- satisfaction

namespace {

/// Six significant digits per entry, rows in brackets.
std::string brief_matrix(const CMatrix& m) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << (r ? ", [" : "[");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex z = m(r, c);
      const double re = std::abs(z.real()) < 5e-7 ? 0.0 : z.real();
      const double im = std::abs(z.imag()) < 5e-7 ? 0.0 : z.imag();
      out << (c ? ", " : "") << re;
      if (im != 0.0) out << (im < 0 ? "-" : "+") << std::abs(im) << "i";
    }
    out << "]";
  }
  out << "]";
  return out.str();
}

}  // namespace

void SatTrace::note(std::string s) {
  constexpr std::size_t kMaxNotes = 8;
  for (const auto& d : diagnostics)
    if (d == s) return;
  if (diagnostics.size() < kMaxNotes) diagnostics.push_back(std::move(s));
}

std::vector<CMatrix> samples_for(const QuantumStructure& qs, const OperatorVarDecl& x, const SamplingOptions& opts) {
  auto side = [&](const std::vector<BasicType>& ts) {
    std::size_t d = 1;
    for (BasicType t : ts) {
      d *= dim_of_type(t, qs.range());
      if (d > qs.max_dim)
        throw ResourceError("operator variable '" + x.name + "' has dimension above the cap of " +
                            std::to_string(qs.max_dim));
    }
    return static_cast<Eigen::Index>(d);
  };
  const auto rows = side(x.type.dom);
  const auto cols = side(x.type.cod);
  return operator_samples(rows, cols, opts.samples,
                          mix_seed(opts.seed, x.name, static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(cols)));
}

namespace {

Truth t_and(Truth a, Truth b) {
  if ((!a.value && a.certain) || (!b.value && b.certain)) return {false, true};
  return {a.value && b.value, a.certain && b.certain};
}

Truth t_or(Truth a, Truth b) {
  if ((a.value && a.certain) || (b.value && b.certain)) return {true, true};
  return {a.value || b.value, a.certain && b.certain};
}

Truth t_not(Truth a) { return {!a.value, a.certain}; }

bool compare_real(double v, CmpRel rel, double lambda, double tol) {
  switch (rel) {
    case CmpRel::Eq:
      return std::abs(v - lambda) <= tol;
    case CmpRel::Lt:
      return v < lambda - tol;
    case CmpRel::Gt:
      return v > lambda + tol;
  }
  return false;
}

class Sat {
 public:
  Sat(const QuantumStructure& qs, const SamplingOptions& opts, SatTrace* trace) : qs_(qs), opts_(opts), trace_(trace) {}

  Truth eval(const Context& ctx, const SolFormula& f) {
    return std::visit([&](const auto& x) { return this->on(ctx, x); }, f.node().v);
  }

 private:
  void note(const std::string& s) {
    if (trace_) trace_->note(s);
  }

  /// Signing or evaluation failure makes the atom false.
  template <class F>
  Truth atom(F&& body) {
    try {
      return {body(), true};
    } catch (const SigningError& e) {
      note(e.what());
    } catch (const EvalError& e) {
      note(e.what());
    }
    return {false, true};
  }

  Truth on(const Context& ctx, const NormAtom& x) {
    return atom([&] { return compare_real(frobenius_norm(qs_, ctx, x.a), x.rel, x.lambda, qs_.tol()); });
  }

  Truth on(const Context& ctx, const TraceAtom& x) {
    return atom([&] {
      const Complex t = trace(qs_, ctx, x.a);
      if (x.rel == CmpRel::Eq) return std::abs(t - x.lambda) <= qs_.tol();
      if (std::abs(t.imag()) > qs_.tol()) return false;
      return compare_real(t.real(), x.rel, x.lambda.real(), qs_.tol());
    });
  }

  Truth on(const Context& ctx, const PredAtom& x) {
    return atom([&] {
      check_signing(qs_, ctx.sigma, x.a);
      return check_predicate(qs_, ctx, x.kind, x.a, x.regs).holds;
    });
  }

  Truth on(const Context& ctx, const EqAtom& x) {
    return atom([&] {
      check_signing(qs_, ctx.sigma, x.a);
      check_signing(qs_, ctx.sigma, x.b);
      return compare(qs_, ctx, x.a, x.b, Relation::Equal).holds;
    });
  }

  Truth on(const Context& ctx, const LeqAtom& x) {
    return atom([&] {
      check_signing(qs_, ctx.sigma, x.a);
      check_signing(qs_, ctx.sigma, x.b);
      return compare(qs_, ctx, x.a, x.b, Relation::Loewner).holds;
    });
  }

  Truth on(const Context& ctx, const ClassicalAtom& x) { return {satisfies(qs_.classical, ctx.sigma, x.f), true}; }

  Truth on(const Context& ctx, const SolNot& x) { return t_not(eval(ctx, x.body)); }

  Truth on(const Context& ctx, const SolBin& x) {
    switch (x.op) {
      case SolFormula::BinOp::And: {
        const Truth a = eval(ctx, x.lhs);
        if (!a.value && a.certain) return a;
        return t_and(a, eval(ctx, x.rhs));
      }
      case SolFormula::BinOp::Or: {
        const Truth a = eval(ctx, x.lhs);
        if (a.value && a.certain) return a;
        return t_or(a, eval(ctx, x.rhs));
      }
      case SolFormula::BinOp::Implies: {
        const Truth a = t_not(eval(ctx, x.lhs));
        if (a.value && a.certain) return a;
        return t_or(a, eval(ctx, x.rhs));
      }
    }
    return {};
  }

  Truth on(const Context& ctx, const SolQuant& x) {
    const bool all = x.q == SolFormula::Quantifier::ForAll;
    Truth acc{all, true};
    Context inner = ctx;
    for (const Value& d : qs_.classical.domain(x.type)) {
      inner.sigma.scalars[x.var] = d;
      const Truth t = eval(inner, x.body);
      acc = all ? t_and(acc, t) : t_or(acc, t);
      if (acc.certain && acc.value != all) break;
    }
    return acc;
  }

  Truth on(const Context& ctx, const SolOpQuant& x) {
    const bool all = x.q == SolFormula::Quantifier::ForAll;
    if (trace_) trace_->used_sampling = true;
    Truth acc{all, true};
    Context inner = ctx;
    const std::vector<CMatrix> samples = samples_for(qs_, *x.var, opts_);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      inner.eta[x.var->name] = samples[i];
      const Truth t = eval(inner, x.body);
      acc = all ? t_and(acc, t) : t_or(acc, t);
      if (acc.certain && acc.value != all) {
        note(std::string(all ? "forallOp " : "existsOp ") + x.var->name + ": sample " + std::to_string(i + 1) + " of " +
             std::to_string(samples.size()) + (all ? " falsifies the body: " : " satisfies the body: ") +
             brief_matrix(samples[i]));
        return acc;
      }
    }
    // the samples are only evidence for the quantifier's own outcome
    if (acc.value == all) acc.certain = false;
    return acc;
  }

  const QuantumStructure& qs_;
  const SamplingOptions& opts_;
  SatTrace* trace_;
};

}  // namespace

Truth sat_sol(const QuantumStructure& qs, const Context& ctx, const SolFormula& f, const SamplingOptions& opts,
              SatTrace* trace) {
  return Sat(qs, opts, trace).eval(ctx, f);
}

}  // namespace sol

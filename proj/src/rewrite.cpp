#include "sol/rewrite.hpp"

#include <algorithm>
#include <cmath>

#include "sol/gates.hpp"

namespace sol {

// ---------------------------------------------------------------- normal forms

namespace {

using Labels = NormalForm::Labels;
constexpr int kMaxUnrollDepth = 256;

std::vector<std::size_t> radices(const std::vector<GroundRef>& regs, const IntRange& range) {
  std::vector<std::size_t> r;
  r.reserve(regs.size());
  for (const auto& g : regs) r.push_back(dim_of_type(g.value_type(), range));
  return r;
}

Labels decode(std::size_t idx, const std::vector<std::size_t>& radix) {
  Labels out(radix.size());
  for (std::size_t i = radix.size(); i-- > 0;) {
    out[i] = idx % radix[i];
    idx /= radix[i];
  }
  return out;
}

std::size_t encode(const Labels& labels, const std::vector<std::size_t>& radix) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < radix.size(); ++i) idx = idx * radix[i] + labels[i];
  return idx;
}

std::vector<GroundRef> sorted_refs(std::vector<GroundRef> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void add_term(NormalForm& nf, Labels r, Labels c, Complex v) {
  auto [it, fresh] = nf.terms.try_emplace({std::move(r), std::move(c)}, v);
  if (!fresh) it->second += v;
}

void drop_small(NormalForm& nf, double tol) {
  for (auto it = nf.terms.begin(); it != nf.terms.end();) {
    if (std::abs(it->second) < tol)
      it = nf.terms.erase(it);
    else
      ++it;
  }
}

/// Position of each ref of `part` inside `whole`.
std::vector<std::size_t> positions(const std::vector<GroundRef>& part, const std::vector<GroundRef>& whole) {
  std::vector<std::size_t> pos;
  pos.reserve(part.size());
  for (const auto& g : part)
    pos.push_back(static_cast<std::size_t>(std::find(whole.begin(), whole.end(), g) - whole.begin()));
  return pos;
}

class Normalizer {
 public:
  Normalizer(const QuantumStructure& qs, const Context& ctx) : qs_(qs), ctx_(ctx) {}

  NormalForm go(const FormalOp& a, int depth = 0) {
    return std::visit([&](const auto& x) { return this->on(x, depth); }, a.node().v);
  }

 private:
  const Structure& cs() const { return qs_.classical; }
  double tol() const { return qs_.tol(); }

  NormalForm on(const ScalarOp& x, int) {
    NormalForm nf;
    const Complex c = as_complex(eval_expr(cs(), ctx_.sigma, x.c));
    if (std::abs(c) >= tol()) nf.terms[{{}, {}}] = c;
    return nf;
  }

  NormalForm on(const KetOp& x, int) {
    NormalForm nf;
    nf.rows = {ground(cs(), ctx_.sigma, x.reg)};
    nf.terms[{{basis_index(eval_expr(cs(), ctx_.sigma, x.label), x.reg.value_type(), qs_.range(), tol())}, {}}] = 1.0;
    return nf;
  }

  NormalForm on(const BraOp& x, int) {
    NormalForm nf;
    nf.cols = {ground(cs(), ctx_.sigma, x.reg)};
    nf.terms[{{}, {basis_index(eval_expr(cs(), ctx_.sigma, x.label), x.reg.value_type(), qs_.range(), tol())}}] = 1.0;
    return nf;
  }

  /// Opaque operators are expanded entry by entry from their matrices.
  NormalForm from_matrix(const FormalOp& a) {
    Matrix m = evaluate(qs_, ctx_, a);
    NormalForm nf;
    nf.rows = sorted_refs(m.rows);
    nf.cols = sorted_refs(m.cols);
    m = with_col_order(with_row_order(m, nf.rows, qs_.range()), nf.cols, qs_.range());
    const auto rr = radices(nf.rows, qs_.range());
    const auto cr = radices(nf.cols, qs_.range());
    for (Eigen::Index i = 0; i < m.data.rows(); ++i)
      for (Eigen::Index j = 0; j < m.data.cols(); ++j) {
        const Complex v = m.data(i, j);
        if (std::abs(v) >= tol())
          nf.terms[{decode(static_cast<std::size_t>(i), rr), decode(static_cast<std::size_t>(j), cr)}] = v;
      }
    return nf;
  }

  NormalForm on(const VarOp& x, int) { return from_matrix(FormalOp::var(x.decl, x.sig)); }
  NormalForm on(const ConstOp& x, int) { return from_matrix(FormalOp::constant(x.decl, x.params, x.sig)); }

  NormalForm on(const ScaleOp& x, int depth) {
    NormalForm nf = go(x.a, depth);
    const Complex c = as_complex(eval_expr(cs(), ctx_.sigma, x.c));
    for (auto& [k, v] : nf.terms) v *= c;
    drop_small(nf, tol());
    return nf;
  }

  NormalForm on(const AdjointOp& x, int depth) {
    NormalForm in = go(x.a, depth);
    NormalForm nf;
    nf.rows = in.cols;
    nf.cols = in.rows;
    for (const auto& [k, v] : in.terms) nf.terms[{k.second, k.first}] = std::conj(v);
    return nf;
  }

  NormalForm on(const SumOp& x, int depth) {
    NormalForm l = go(x.a, depth);
    NormalForm r = go(x.b, depth);
    if (l.rows != r.rows || l.cols != r.cols)
      throw SigningError("Sign-Add", "summands have signatures " + to_string(GroundSignature{l.rows, l.cols}) +
                                         " and " + to_string(GroundSignature{r.rows, r.cols}));
    for (auto& [k, v] : r.terms) add_term(l, k.first, k.second, v);
    drop_small(l, tol());
    return l;
  }

  NormalForm on(const ProductOp& x, int depth) {
    NormalForm l = go(x.a, depth);
    NormalForm r = go(x.b, depth);
    if (l.cols != r.rows)
      throw SigningError("Sign-Mult", "left factor has codomain " + to_string(l.cols) +
                                          " but right factor has domain " + to_string(r.rows));
    std::map<Labels, std::vector<std::pair<const Labels*, Complex>>> by_row;
    for (const auto& [k, v] : r.terms) by_row[k.first].emplace_back(&k.second, v);
    NormalForm nf;
    nf.rows = l.rows;
    nf.cols = r.cols;
    for (const auto& [k, v] : l.terms) {
      const auto it = by_row.find(k.second);
      if (it == by_row.end()) continue;
      for (const auto& [cols, w] : it->second) add_term(nf, k.first, *cols, v * w);
    }
    drop_small(nf, tol());
    return nf;
  }

  NormalForm on(const TensorOp& x, int depth) {
    NormalForm l = go(x.a, depth);
    NormalForm r = go(x.b, depth);
    if (overlaps(l.rows, r.rows) || overlaps(l.cols, r.cols))
      throw SigningError("Sign-Tensor", "factors share registers: " + to_string(GroundSignature{l.rows, l.cols}) +
                                            " and " + to_string(GroundSignature{r.rows, r.cols}));
    NormalForm nf;
    nf.rows = l.rows;
    nf.rows.insert(nf.rows.end(), r.rows.begin(), r.rows.end());
    nf.cols = l.cols;
    nf.cols.insert(nf.cols.end(), r.cols.begin(), r.cols.end());
    nf.rows = sorted_refs(nf.rows);
    nf.cols = sorted_refs(nf.cols);
    const auto lr = positions(l.rows, nf.rows), rr = positions(r.rows, nf.rows);
    const auto lc = positions(l.cols, nf.cols), rc = positions(r.cols, nf.cols);
    for (const auto& [lk, lv] : l.terms)
      for (const auto& [rk, rv] : r.terms) {
        Labels row(nf.rows.size()), col(nf.cols.size());
        for (std::size_t i = 0; i < lr.size(); ++i) row[lr[i]] = lk.first[i];
        for (std::size_t i = 0; i < rr.size(); ++i) row[rr[i]] = rk.first[i];
        for (std::size_t i = 0; i < lc.size(); ++i) col[lc[i]] = lk.second[i];
        for (std::size_t i = 0; i < rc.size(); ++i) col[rc[i]] = rk.second[i];
        add_term(nf, std::move(row), std::move(col), lv * rv);
      }
    drop_small(nf, tol());
    return nf;
  }

  NormalForm on(const CallOp& x, int depth) {
    if (depth >= kMaxUnrollDepth) throw ResourceError("recursion depth limit reached while unrolling '" + x.name + "'");
    const auto def = x.def.lock();
    if (!def) throw EvalError("recursive definition '" + x.name + "' is no longer available");
    std::vector<Value> args;
    for (const auto& e : x.args) args.push_back(eval_expr(cs(), ctx_.sigma, e));
    return go(unroll(cs(), *def, args), depth + 1);
  }

  const QuantumStructure& qs_;
  const Context& ctx_;
};

QuantumRef to_ref(const GroundRef& g) {
  std::vector<Expr> idx;
  for (std::size_t i = 0; i < g.index.size(); ++i)
    idx.push_back(g.var->type.args[i] == BasicType::Bool ? Expr::boolean(g.index[i] != 0) : Expr::integer(g.index[i]));
  return QuantumRef(g.var, std::move(idx));
}

std::string labels_text(const Labels& ls, const std::vector<GroundRef>& regs, const IntRange& range) {
  std::string s;
  for (std::size_t i = 0; i < ls.size(); ++i)
    s += (i ? ", " : "") + to_string(basis_label(ls[i], regs[i].value_type(), range));
  return s;
}

std::string regs_text(const std::vector<GroundRef>& regs) {
  if (regs.size() == 1) return to_string(regs[0]);
  return to_string(regs);
}

}  // namespace

NormalForm normalize(const QuantumStructure& qs, const Context& ctx, const FormalOp& a) {
  return Normalizer(qs, ctx).go(a);
}

Matrix to_matrix(const NormalForm& nf, const IntRange& range) {
  const auto rr = radices(nf.rows, range);
  const auto cr = radices(nf.cols, range);
  Matrix m{CMatrix::Zero(static_cast<Eigen::Index>(dim_of(nf.rows, range)),
                         static_cast<Eigen::Index>(dim_of(nf.cols, range))),
           nf.rows, nf.cols};
  for (const auto& [k, v] : nf.terms)
    m.data(static_cast<Eigen::Index>(encode(k.first, rr)), static_cast<Eigen::Index>(encode(k.second, cr))) += v;
  return m;
}

FormalOp to_term(const NormalForm& nf, const IntRange& range) {
  RegisterString rows, cols;
  for (const auto& g : nf.rows) rows.push_back(to_ref(g));
  for (const auto& g : nf.cols) cols.push_back(to_ref(g));
  if (nf.terms.empty()) {
    if (rows.empty() && cols.empty()) return FormalOp::scalar(Expr::complex(0.0));
    return FormalOp::constant(builtin_constant("Zero"), {}, Signature{rows, cols});
  }
  std::optional<FormalOp> sum;
  for (const auto& [k, v] : nf.terms) {
    std::vector<FormalOp> kets, bras;
    for (std::size_t i = 0; i < rows.size(); ++i)
      kets.push_back(FormalOp::ket(Expr::constant(basis_label(k.first[i], nf.rows[i].value_type(), range)), rows[i]));
    for (std::size_t i = 0; i < cols.size(); ++i)
      bras.push_back(FormalOp::bra(Expr::constant(basis_label(k.second[i], nf.cols[i].value_type(), range)), cols[i]));
    const Expr c = Expr::complex(v);
    FormalOp term = kets.empty() && bras.empty() ? FormalOp::scalar(c)
                    : kets.empty()               ? FormalOp::scale(c, tensor(bras))
                    : bras.empty()               ? FormalOp::scale(c, tensor(kets))
                                                 : FormalOp::scale(c, FormalOp::product(tensor(kets), tensor(bras)));
    sum = sum ? FormalOp::sum(*sum, term) : term;
  }
  return *sum;
}

std::string to_string(const NormalForm& nf, const IntRange& range) {
  if (nf.terms.empty()) return "0";
  std::string out;
  for (const auto& [k, v] : nf.terms) {
    if (!out.empty()) out += "\n";
    out += "(" + to_string(Value{v}) + ")";
    if (!nf.rows.empty()) out += " |" + labels_text(k.first, nf.rows, range) + ">_" + regs_text(nf.rows);
    if (!nf.cols.empty()) out += " <" + labels_text(k.second, nf.cols, range) + "|_" + regs_text(nf.cols);
  }
  return out;
}

Judgement decide_ground_equality(const QuantumStructure& qs, const Context& ctx, const FormalOp& a, const FormalOp& b) {
  NormalForm l, r;
  try {
    l = normalize(qs, ctx, a);
    r = normalize(qs, ctx, b);
  } catch (const SigningError& e) {
    return Judgement::no(e.what());
  } catch (const EvalError& e) {
    return Judgement::no(e.what());
  }
  if (l.rows != r.rows || l.cols != r.cols)
    return Judgement::no("signatures differ: " + to_string(GroundSignature{l.rows, l.cols}) + " vs " +
                         to_string(GroundSignature{r.rows, r.cols}));
  for (const auto& [k, v] : l.terms) {
    const auto it = r.terms.find(k);
    const Complex w = it == r.terms.end() ? Complex(0.0) : it->second;
    if (std::abs(v - w) > qs.tol()) return Judgement::no("coefficients differ at a dyad");
  }
  for (const auto& [k, v] : r.terms)
    if (!l.terms.count(k) && std::abs(v) > qs.tol()) return Judgement::no("coefficients differ at a dyad");
  return Judgement::yes();
}

// ---------------------------------------------------------------- discharge

Discharge Discharge::concrete(const QuantumStructure& qs, State sigma) {
  Discharge d;
  d.qs = &qs;
  d.sigma = std::move(sigma);
  return d;
}

Discharge Discharge::symbolic(const QuantumStructure& qs, std::vector<Formula> theory,
                              std::map<std::string, IntRange> ranges) {
  Discharge d;
  d.qs = &qs;
  d.theory = std::move(theory);
  d.ranges = std::move(ranges);
  return d;
}

bool Discharge::holds(const Formula& f, std::string* why) const {
  if (sigma) {
    try {
      if (satisfies(qs->classical, *sigma, f)) return true;
      if (why) *why = "condition " + to_string(f) + " is false in the given state";
    } catch (const Error& e) {
      if (why) *why = "condition " + to_string(f) + " could not be evaluated: " + e.what();
    }
    return false;
  }
  EntailmentQuery q;
  q.sigma = theory;
  q.goal = SolFormula::classical(f);
  q.ranges = ranges;
  const CheckResult r = check_entailment(*qs, q);
  if (r.verdict == Verdict::Valid) return true;
  if (why) *why = "condition " + to_string(f) + " is not entailed (" + to_string(r.verdict) + ": " + r.reason + ")";
  return false;
}

// ---------------------------------------------------------------- matching

namespace {

bool is_meta(const std::string& name) { return !name.empty() && name[0] == '?'; }

bool match_expr(const Expr& p, const Expr& t, Bindings& b) {
  if (const auto* v = std::get_if<VarExpr>(&p.node().v); v && is_meta(v->name)) {
    const auto [it, fresh] = b.exprs.try_emplace(v->name, t);
    return fresh || it->second == t;
  }
  const auto& x = p.node().v;
  const auto& y = t.node().v;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& l) -> bool {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(y);
        if constexpr (std::is_same_v<T, VarExpr> || std::is_same_v<T, ConstExpr>) {
          return p == t;
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          if (l.op != r.op || l.args.size() != r.args.size()) return false;
          for (std::size_t i = 0; i < l.args.size(); ++i)
            if (!match_expr(l.args[i], r.args[i], b)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, SubscriptExpr>) {
          if (l.array != r.array || l.indices.size() != r.indices.size()) return false;
          for (std::size_t i = 0; i < l.indices.size(); ++i)
            if (!match_expr(l.indices[i], r.indices[i], b)) return false;
          return true;
        } else {
          return match_expr(l.guard, r.guard, b) && match_expr(l.then_branch, r.then_branch, b) &&
                 match_expr(l.else_branch, r.else_branch, b);
        }
      },
      x);
}

bool match_ref(const QuantumRef& p, const QuantumRef& t, Bindings& b) {
  if (is_meta(p.name())) {
    const auto [it, fresh] = b.refs.try_emplace(p.name(), t);
    return fresh || it->second == t;
  }
  if (p.name() != t.name() || p.indices.size() != t.indices.size()) return false;
  for (std::size_t i = 0; i < p.indices.size(); ++i)
    if (!match_expr(p.indices[i], t.indices[i], b)) return false;
  return true;
}

bool match_string(const RegisterString& p, const RegisterString& t, Bindings& b) {
  if (p.size() != t.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!match_ref(p[i], t[i], b)) return false;
  return true;
}

bool match_sig(const Signature& p, const Signature& t, Bindings& b) {
  return match_string(p.dom, t.dom, b) && match_string(p.cod, t.cod, b);
}

QuantumRef instantiate_ref(const QuantumRef& r, const Bindings& b) {
  if (is_meta(r.name())) {
    const auto it = b.refs.find(r.name());
    if (it == b.refs.end()) throw TypeError("unbound register metavariable '" + r.name() + "'");
    return it->second;
  }
  std::vector<Expr> idx;
  for (const auto& e : r.indices) idx.push_back(instantiate(e, b));
  return QuantumRef(r.var, std::move(idx));
}

RegisterString instantiate_string(const RegisterString& rs, const Bindings& b) {
  RegisterString out;
  for (const auto& r : rs) out.push_back(instantiate_ref(r, b));
  return out;
}

Formula instantiate_formula(const Formula& f, const Bindings& b) {
  return std::visit(
      [&](const auto& x) -> Formula {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AtomF>) {
          return Formula::atom(instantiate(x.expr, b));
        } else if constexpr (std::is_same_v<T, NotF>) {
          return Formula::negation(instantiate_formula(x.body, b));
        } else if constexpr (std::is_same_v<T, BinF>) {
          return Formula::binary(x.op, instantiate_formula(x.lhs, b), instantiate_formula(x.rhs, b));
        } else {
          return Formula::quant(x.q, x.var, x.type, instantiate_formula(x.body, b));
        }
      },
      f.node().v);
}

}  // namespace

bool match(const FormalOp& pattern, const FormalOp& term, Bindings& b) {
  const auto& pv = pattern.node().v;
  const auto& tv = term.node().v;
  if (const auto* v = std::get_if<VarOp>(&pv); v && is_meta(v->decl->name)) {
    const auto [it, fresh] = b.ops.try_emplace(v->decl->name, term);
    return fresh || it->second == term;
  }
  // a bare term matches c.P with c = 1
  if (const auto* s = std::get_if<ScaleOp>(&pv); s && !std::holds_alternative<ScaleOp>(tv))
    return match_expr(s->c, Expr::integer(1), b) && match(s->a, term, b);
  if (pv.index() != tv.index()) return false;
  return std::visit(
      [&](const auto& l) -> bool {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(tv);
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return match_expr(l.c, r.c, b);
        } else if constexpr (std::is_same_v<T, KetOp> || std::is_same_v<T, BraOp>) {
          return match_expr(l.label, r.label, b) && match_ref(l.reg, r.reg, b);
        } else if constexpr (std::is_same_v<T, VarOp>) {
          return l.decl->name == r.decl->name && match_sig(l.sig, r.sig, b);
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          if (l.decl->name != r.decl->name || l.params.size() != r.params.size()) return false;
          for (std::size_t i = 0; i < l.params.size(); ++i)
            if (!match_expr(l.params[i], r.params[i], b)) return false;
          return match_sig(l.sig, r.sig, b);
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return match_expr(l.c, r.c, b) && match(l.a, r.a, b);
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          return match(l.a, r.a, b);
        } else if constexpr (std::is_same_v<T, CallOp>) {
          if (l.name != r.name || l.args.size() != r.args.size()) return false;
          for (std::size_t i = 0; i < l.args.size(); ++i)
            if (!match_expr(l.args[i], r.args[i], b)) return false;
          return true;
        } else {
          return match(l.a, r.a, b) && match(l.b, r.b, b);
        }
      },
      pv);
}

Expr instantiate(const Expr& tmpl, const Bindings& b) {
  const Expr e = map_expr(tmpl, [&](const Expr& n) -> Expr {
    if (const auto* v = std::get_if<VarExpr>(&n.node().v); v && is_meta(v->name)) {
      const auto it = b.exprs.find(v->name);
      if (it == b.exprs.end()) throw TypeError("unbound metavariable '" + v->name + "'");
      return it->second;
    }
    return n;
  });
  return fold_constants(e, Structure{});
}

FormalOp instantiate(const FormalOp& tmpl, const Bindings& b) {
  return std::visit(
      [&](const auto& x) -> FormalOp {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return FormalOp::scalar(instantiate(x.c, b));
        } else if constexpr (std::is_same_v<T, KetOp>) {
          return FormalOp::ket(instantiate(x.label, b), instantiate_ref(x.reg, b));
        } else if constexpr (std::is_same_v<T, BraOp>) {
          return FormalOp::bra(instantiate(x.label, b), instantiate_ref(x.reg, b));
        } else if constexpr (std::is_same_v<T, VarOp>) {
          if (is_meta(x.decl->name)) {
            const auto it = b.ops.find(x.decl->name);
            if (it == b.ops.end()) throw TypeError("unbound operator metavariable '" + x.decl->name + "'");
            return it->second;
          }
          return FormalOp::var(x.decl, Signature{instantiate_string(x.sig.dom, b), instantiate_string(x.sig.cod, b)});
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          std::vector<Expr> ps;
          for (const auto& p : x.params) ps.push_back(instantiate(p, b));
          return FormalOp::constant(x.decl, std::move(ps),
                                    Signature{instantiate_string(x.sig.dom, b), instantiate_string(x.sig.cod, b)});
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return FormalOp::scale(instantiate(x.c, b), instantiate(x.a, b));
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          return FormalOp::adjoint(instantiate(x.a, b));
        } else if constexpr (std::is_same_v<T, SumOp>) {
          return FormalOp::sum(instantiate(x.a, b), instantiate(x.b, b));
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          return FormalOp::product(instantiate(x.a, b), instantiate(x.b, b));
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          return FormalOp::tensor(instantiate(x.a, b), instantiate(x.b, b));
        } else {
          return tmpl;
        }
      },
      tmpl.node().v);
}

Formula instantiate_condition(const RuleCondition& c, const Bindings& b) {
  std::vector<Formula> parts{instantiate_formula(c.classical, b)};
  for (const auto& [x, y] : c.same_register) {
    const QuantumRef rx = instantiate_ref(QuantumRef(make_qubit(x)), b);
    const QuantumRef ry = instantiate_ref(QuantumRef(make_qubit(y)), b);
    if (rx.name() != ry.name() || rx.indices.size() != ry.indices.size()) {
      parts.push_back(Formula::truth(false));
      continue;
    }
    for (std::size_t i = 0; i < rx.indices.size(); ++i) parts.push_back(Formula::atom(eq(rx.indices[i], ry.indices[i])));
  }
  return Formula::all_of(parts);
}

// ---------------------------------------------------------------- rewriting

namespace {

class Rewriter {
 public:
  Rewriter(const RewriteRule& rule, const Discharge& how, const Bindings& initial)
      : rule_(rule), how_(how), initial_(initial) {}

  std::optional<FormalOp> visit(const FormalOp& t) {
    if (auto r = attempt(t)) return r;
    return std::visit(
        [&](const auto& x) -> std::optional<FormalOp> {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ScaleOp>) {
            if (auto a = visit(x.a)) return FormalOp::scale(x.c, *a);
          } else if constexpr (std::is_same_v<T, AdjointOp>) {
            if (auto a = visit(x.a)) return FormalOp::adjoint(*a);
          } else if constexpr (std::is_same_v<T, SumOp>) {
            if (auto a = visit(x.a)) return FormalOp::sum(*a, x.b);
            if (auto b = visit(x.b)) return FormalOp::sum(x.a, *b);
          } else if constexpr (std::is_same_v<T, ProductOp>) {
            if (auto a = visit(x.a)) return FormalOp::product(*a, x.b);
            if (auto b = visit(x.b)) return FormalOp::product(x.a, *b);
          } else if constexpr (std::is_same_v<T, TensorOp>) {
            if (auto a = visit(x.a)) return FormalOp::tensor(*a, x.b);
            if (auto b = visit(x.b)) return FormalOp::tensor(x.a, *b);
          }
          return std::nullopt;
        },
        t.node().v);
  }

  const std::string& reason() const { return reason_; }

 private:
  void record(const std::string& why) {
    if (reason_.empty() && !why.empty()) reason_ = why;
  }

  std::optional<FormalOp> attempt(const FormalOp& t) {
    if (rule_.native) {
      std::string why;
      auto r = rule_.native(t, how_, why);
      if (!r) record(why);
      return r;
    }
    Bindings b = initial_;
    if (!match(rule_.lhs, t, b)) return std::nullopt;
    std::string why;
    try {
      const Formula cond = instantiate_condition(rule_.condition, b);
      if (how_.holds(cond, &why)) return instantiate(rule_.rhs, b);
    } catch (const TypeError& e) {
      why = std::string("instantiation failed: ") + e.what();
    }
    record(why);
    return std::nullopt;
  }

  const RewriteRule& rule_;
  const Discharge& how_;
  const Bindings& initial_;
  std::string reason_;
};

Expr mexpr(const std::string& name, BasicType t = BasicType::Int) { return Expr::var("?" + name, t); }
QuantumRef mref(const std::string& name) { return QuantumRef(make_qubit("?" + name)); }

void flatten(const FormalOp& a, std::vector<FormalOp>& out, bool sums) {
  const auto& v = a.node().v;
  if (sums) {
    if (const auto* s = std::get_if<SumOp>(&v)) {
      flatten(s->a, out, true);
      flatten(s->b, out, true);
      return;
    }
  } else if (const auto* t = std::get_if<TensorOp>(&v)) {
    flatten(t->a, out, false);
    flatten(t->b, out, false);
    return;
  }
  out.push_back(a);
}

/// Labels and registers of a tensor product of kets (or bras).
bool basis_factors(const FormalOp& a, bool kets, std::vector<Expr>& labels, RegisterString& regs) {
  std::vector<FormalOp> parts;
  flatten(a, parts, false);
  for (const auto& p : parts) {
    if (kets) {
      const auto* k = std::get_if<KetOp>(&p.node().v);
      if (!k) return false;
      labels.push_back(k->label);
      regs.push_back(k->reg);
    } else {
      const auto* k = std::get_if<BraOp>(&p.node().v);
      if (!k) return false;
      labels.push_back(k->label);
      regs.push_back(k->reg);
    }
  }
  return true;
}

std::vector<std::vector<Expr>> all_labels(const RegisterString& regs, const IntRange& range) {
  std::vector<std::vector<Expr>> out{{}};
  for (const auto& r : regs) {
    std::vector<std::vector<Expr>> next;
    const std::size_t d = dim_of_type(r.value_type(), range);
    for (const auto& prefix : out)
      for (std::size_t i = 0; i < d; ++i) {
        auto e = prefix;
        e.push_back(Expr::constant(basis_label(i, r.value_type(), range)));
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

FormalOp basis_term(const std::vector<Expr>& labels, const RegisterString& regs, bool ket) {
  std::vector<FormalOp> parts;
  for (std::size_t i = 0; i < regs.size(); ++i)
    parts.push_back(ket ? FormalOp::ket(labels[i], regs[i]) : FormalOp::bra(labels[i], regs[i]));
  return tensor(parts);
}

}  // namespace

RewriteResult rewrite_step(const FormalOp& a, const RewriteRule& rule, const Discharge& how, const Bindings& initial) {
  Rewriter rw(rule, how, initial);
  if (auto r = rw.visit(a)) return {*r, true, "applied " + rule.name};
  return {a, false, rw.reason().empty() ? "no subterm matches " + rule.name : rw.reason()};
}

RewriteRule coefficient_addition_rule() {
  RewriteRule r;
  r.name = "Coefficient Addition";
  const Expr a1 = mexpr("a1", BasicType::Complex), a2 = mexpr("a2", BasicType::Complex);
  const Expr s1 = mexpr("s1"), s2 = mexpr("s2");
  const QuantumRef q1 = mref("q1"), q2 = mref("q2");
  r.lhs = FormalOp::sum(FormalOp::scale(a1, FormalOp::ket(s1, q1)), FormalOp::scale(a2, FormalOp::ket(s2, q2)));
  r.rhs = FormalOp::scale(a1 + a2, FormalOp::ket(s1, q1));
  r.condition.classical = Formula::atom(eq(s1, s2));
  r.condition.same_register = {{"?q1", "?q2"}};
  return r;
}

RewriteRule self_outer_product_rule() {
  RewriteRule r;
  r.name = "Self Outer-Product";
  const Expr s1 = mexpr("s1"), s2 = mexpr("s2"), s3 = mexpr("s3");
  const QuantumRef q1 = mref("q1"), q2 = mref("q2"), q3 = mref("q3");
  r.lhs = FormalOp::product(FormalOp::product(FormalOp::ket(s1, q1), FormalOp::bra(s2, q2)), FormalOp::ket(s3, q3));
  r.rhs = FormalOp::ket(s1, q1);
  r.condition.classical = Formula::atom(eq(s2, s3));
  r.condition.same_register = {{"?q2", "?q3"}};
  return r;
}

RewriteRule self_outer_product_adjoint_rule() {
  RewriteRule r = self_outer_product_rule();
  const Expr s1 = mexpr("s1"), s2 = mexpr("s2"), s3 = mexpr("s3");
  const QuantumRef q1 = mref("q1"), q2 = mref("q2"), q3 = mref("q3");
  r.lhs = FormalOp::product(FormalOp::product(FormalOp::ket(s1, q1), FormalOp::adjoint(FormalOp::ket(s2, q2))),
                            FormalOp::ket(s3, q3));
  return r;
}

RewriteRule identity_rule() {
  RewriteRule r;
  r.name = "Identity";
  r.native = [](const FormalOp& t, const Discharge& how, std::string& why) -> std::optional<FormalOp> {
    if (!std::holds_alternative<SumOp>(t.node().v)) return std::nullopt;
    std::vector<FormalOp> terms;
    flatten(t, terms, true);
    RegisterString regs;
    std::vector<std::vector<Expr>> labels;
    for (const auto& term : terms) {
      const auto* p = std::get_if<ProductOp>(&term.node().v);
      if (!p) return std::nullopt;
      std::vector<Expr> kl, bl;
      RegisterString kr, br;
      if (!basis_factors(p->a, true, kl, kr) || !basis_factors(p->b, false, bl, br)) return std::nullopt;
      if (kr != br || kl != bl) return std::nullopt;
      if (labels.empty())
        regs = kr;
      else if (kr != regs)
        return std::nullopt;
      labels.push_back(std::move(kl));
    }
    const std::size_t dim = dim_of(regs, how.qs->range());
    if (labels.size() != dim) {
      why = "Identity: " + std::to_string(labels.size()) + " dyads but the registers have dimension " +
            std::to_string(dim);
      return std::nullopt;
    }
    std::vector<Formula> conds{distinctness_formula(regs)};
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        std::vector<Formula> differ;
        for (std::size_t l = 0; l < regs.size(); ++l) differ.push_back(Formula::atom(ne(labels[i][l], labels[j][l])));
        conds.push_back(Formula::any_of(differ));
      }
    if (!how.holds(Formula::all_of(conds), &why)) return std::nullopt;
    return sol::apply(builtin_constant("I"), regs);
  };
  return r;
}

RewriteRule matrix_representation_rule() {
  RewriteRule r;
  r.name = "Matrix Representation";
  r.native = [](const FormalOp& t, const Discharge& how, std::string& why) -> std::optional<FormalOp> {
    const Signature* sig = nullptr;
    if (const auto* v = std::get_if<VarOp>(&t.node().v)) sig = &v->sig;
    if (const auto* c = std::get_if<ConstOp>(&t.node().v)) sig = &c->sig;
    if (!sig) return std::nullopt;
    const IntRange& range = how.qs->range();
    constexpr std::size_t kMaxDyads = 256;
    if (dim_of(sig->dom, range) * dim_of(sig->cod, range) > kMaxDyads) {
      why = "Matrix Representation: more than " + std::to_string(kMaxDyads) + " dyads";
      return std::nullopt;
    }
    const Formula cond = Formula::conj(distinctness_formula(sig->dom), distinctness_formula(sig->cod));
    if (!how.holds(cond, &why)) return std::nullopt;
    std::optional<FormalOp> sum;
    for (const auto& si : all_labels(sig->dom, range))
      for (const auto& sk : all_labels(sig->cod, range)) {
        const FormalOp coeff =
            FormalOp::product(FormalOp::product(basis_term(si, sig->dom, false), t), basis_term(sk, sig->cod, true));
        const FormalOp dyad = FormalOp::product(basis_term(si, sig->dom, true), basis_term(sk, sig->cod, false));
        const FormalOp term = FormalOp::tensor(coeff, dyad);
        sum = sum ? FormalOp::sum(*sum, term) : term;
      }
    return *sum;
  };
  return r;
}

}  // namespace sol

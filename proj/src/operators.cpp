#include "sol/operators.hpp"

#include <algorithm>
#include <set>

namespace sol {

std::string to_string(const QuantumType& t) {
  auto side = [](const std::vector<BasicType>& ts) {
    if (ts.empty()) return std::string("()");
    std::string s;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) s += "*";
      s += to_string(ts[i]);
    }
    return s;
  };
  return side(t.dom) + " -> " + side(t.cod);
}

QuantumType Signature::type() const {
  QuantumType t;
  for (const auto& r : dom) t.dom.push_back(r.value_type());
  for (const auto& r : cod) t.cod.push_back(r.value_type());
  return t;
}

bool operator==(const Signature& a, const Signature& b) { return a.dom == b.dom && a.cod == b.cod; }

std::string to_string(const Signature& s) { return to_string(s.dom) + " -> " + to_string(s.cod); }

namespace {

std::vector<BasicType> sorted(std::vector<BasicType> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool same_types_up_to_order(const std::vector<BasicType>& a, const std::vector<BasicType>& b) {
  return sorted(a) == sorted(b);
}

}  // namespace

FormalOp FormalOp::scalar(Expr c) {
  if (!is_numeric(c.type())) throw TypeError("scalar operator must be numeric, got Bool");
  return FormalOp(std::make_shared<const OpNode>(OpNode{ScalarOp{std::move(c)}}));
}

FormalOp FormalOp::ket(Expr label, QuantumRef reg) {
  if (!label_type_ok(label.type(), reg.value_type()))
    throw TypeError("ket label of type " + to_string(label.type()) + " does not match register '" + to_string(reg) +
                    "' of type " + to_string(reg.value_type()));
  return FormalOp(std::make_shared<const OpNode>(OpNode{KetOp{std::move(label), std::move(reg)}}));
}

FormalOp FormalOp::bra(Expr label, QuantumRef reg) {
  if (!label_type_ok(label.type(), reg.value_type()))
    throw TypeError("bra label of type " + to_string(label.type()) + " does not match register '" + to_string(reg) +
                    "' of type " + to_string(reg.value_type()));
  return FormalOp(std::make_shared<const OpNode>(OpNode{BraOp{std::move(label), std::move(reg)}}));
}

FormalOp FormalOp::var(OpVarPtr decl, Signature sig) {
  if (sig.type() != decl->type)
    throw TypeError("operator variable '" + decl->name + "' of type " + to_string(decl->type) +
                    " applied to signature of type " + to_string(sig.type()));
  return FormalOp(std::make_shared<const OpNode>(OpNode{VarOp{std::move(decl), std::move(sig)}}));
}

FormalOp FormalOp::constant(OpConstPtr decl, std::vector<Expr> params, Signature sig) {
  if (params.size() != decl->params.size())
    throw TypeError("operator constant '" + decl->name + "' expects " + std::to_string(decl->params.size()) +
                    " parameter(s), got " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const BasicType want = decl->params[i];
    const BasicType got = params[i].type();
    if (got != want && !(want == BasicType::Complex && got == BasicType::Int))
      throw TypeError("parameter " + std::to_string(i + 1) + " of '" + decl->name + "' has type " + to_string(got) +
                      ", expected " + to_string(want));
  }
  const QuantumType t = sig.type();
  switch (decl->shape) {
    case ConstShape::Fixed:
      if (t != decl->type)
        throw TypeError("operator constant '" + decl->name + "' of type " + to_string(decl->type) +
                        " applied to signature of type " + to_string(t));
      break;
    case ConstShape::Square:
      if (t.dom != t.cod)
        throw TypeError("operator constant '" + decl->name + "' needs the same register types on both sides");
      if (!decl->type.dom.empty())
        for (BasicType b : t.dom)
          if (b != decl->type.dom[0])
            throw TypeError("operator constant '" + decl->name + "' acts on registers of type " +
                            to_string(decl->type.dom[0]));
      break;
    case ConstShape::Any:
      break;
  }
  return FormalOp(std::make_shared<const OpNode>(OpNode{ConstOp{std::move(decl), std::move(params), std::move(sig)}}));
}

FormalOp FormalOp::scale(Expr c, FormalOp a) {
  if (!is_numeric(c.type())) throw TypeError("scaling factor must be numeric, got Bool");
  return FormalOp(std::make_shared<const OpNode>(OpNode{ScaleOp{std::move(c), std::move(a)}}));
}

FormalOp FormalOp::adjoint(FormalOp a) {
  return FormalOp(std::make_shared<const OpNode>(OpNode{AdjointOp{std::move(a)}}));
}

FormalOp FormalOp::sum(FormalOp a, FormalOp b) {
  const auto ta = static_type(a);
  const auto tb = static_type(b);
  if (ta && tb && (!same_types_up_to_order(ta->dom, tb->dom) || !same_types_up_to_order(ta->cod, tb->cod)))
    throw TypeError("sum of operators of types " + to_string(*ta) + " and " + to_string(*tb));
  return FormalOp(std::make_shared<const OpNode>(OpNode{SumOp{std::move(a), std::move(b)}}));
}

FormalOp FormalOp::product(FormalOp a, FormalOp b) {
  const auto ta = static_type(a);
  const auto tb = static_type(b);
  if (ta && tb && !same_types_up_to_order(ta->cod, tb->dom))
    throw TypeError("product of operators of types " + to_string(*ta) + " and " + to_string(*tb) +
                    ": codomain of the left factor does not match the domain of the right factor");
  return FormalOp(std::make_shared<const OpNode>(OpNode{ProductOp{std::move(a), std::move(b)}}));
}

FormalOp FormalOp::tensor(FormalOp a, FormalOp b) {
  return FormalOp(std::make_shared<const OpNode>(OpNode{TensorOp{std::move(a), std::move(b)}}));
}

FormalOp FormalOp::call(const std::shared_ptr<const RecursiveDef>& def, std::vector<Expr> args) {
  if (args.size() != def->params.size())
    throw TypeError("'" + def->name + "' expects " + std::to_string(def->params.size()) + " argument(s), got " +
                    std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    const BasicType want = def->params[i].second;
    if (args[i].type() != want && !(want == BasicType::Complex && args[i].type() == BasicType::Int))
      throw TypeError("argument " + std::to_string(i + 1) + " of '" + def->name + "' has type " +
                      to_string(args[i].type()) + ", expected " + to_string(want));
  }
  return FormalOp(std::make_shared<const OpNode>(OpNode{CallOp{def->name, def, std::move(args)}}));
}

FormalOp unroll(const Structure& s, const RecursiveDef& def, const std::vector<Value>& args) {
  if (args.size() != def.params.size()) throw EvalError("'" + def.name + "' called with the wrong number of arguments");
  Substitution sub;
  for (std::size_t i = 0; i < args.size(); ++i) sub[def.params[i].first] = Expr::constant(args[i]);
  const RecursiveCase* chosen = nullptr;
  const State empty;
  for (const auto& c : def.cases) {
    if (!satisfies(s, empty, subst_formula(c.guard, sub))) continue;
    if (chosen) throw EvalError("'" + def.name + "': more than one case applies");
    chosen = &c;
  }
  if (!chosen) {
    std::string shown;
    for (std::size_t i = 0; i < args.size(); ++i) shown += (i ? ", " : "") + to_string(args[i]);
    throw EvalError("'" + def.name + "(" + shown + ")': no case applies");
  }
  if (chosen->build) return chosen->build(args);
  return subst_classical(*chosen->body, sub);
}

// ---------------------------------------------------------------- equality and printing

bool operator==(const FormalOp& a, const FormalOp& b) {
  if (a.valid() != b.valid()) return false;
  if (!a.valid()) return true;
  if (&a.node() == &b.node()) return true;
  const auto& x = a.node().v;
  const auto& y = b.node().v;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& l) -> bool {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(y);
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return l.c == r.c;
        } else if constexpr (std::is_same_v<T, KetOp> || std::is_same_v<T, BraOp>) {
          return l.label == r.label && l.reg == r.reg;
        } else if constexpr (std::is_same_v<T, VarOp>) {
          return l.decl->name == r.decl->name && l.sig == r.sig;
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          return l.decl->name == r.decl->name && l.params == r.params && l.sig == r.sig;
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return l.c == r.c && l.a == r.a;
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          return l.a == r.a;
        } else if constexpr (std::is_same_v<T, CallOp>) {
          return l.name == r.name && l.args == r.args;
        } else {
          return l.a == r.a && l.b == r.b;
        }
      },
      x);
}

namespace {

std::string paren_if_negative(const std::string& s) { return (!s.empty() && s[0] == '-') ? "(" + s + ")" : s; }

bool is_primary(const FormalOp& a) {
  const auto& v = a.node().v;
  return std::holds_alternative<KetOp>(v) || std::holds_alternative<BraOp>(v) || std::holds_alternative<VarOp>(v) ||
         std::holds_alternative<ConstOp>(v) || std::holds_alternative<CallOp>(v) || std::holds_alternative<AdjointOp>(v);
}

std::string join(const std::vector<Expr>& es) {
  std::string s;
  for (std::size_t i = 0; i < es.size(); ++i) s += (i ? ", " : "") + to_string(es[i]);
  return s;
}

std::string applied(const std::string& name, const std::vector<Expr>* params, const Signature& sig) {
  std::string s = name;
  if (params && !params->empty()) s += "(" + join(*params) + ")";
  return s + "[" + to_string(sig.dom) + " -> " + to_string(sig.cod) + "]";
}

}  // namespace

std::string to_string(const FormalOp& a) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return "[" + to_string(x.c) + "]";
        } else if constexpr (std::is_same_v<T, KetOp>) {
          return "|" + paren_if_negative(to_string(x.label)) + ">_" + to_string(x.reg);
        } else if constexpr (std::is_same_v<T, BraOp>) {
          return "<" + paren_if_negative(to_string(x.label)) + "|_" + to_string(x.reg);
        } else if constexpr (std::is_same_v<T, VarOp>) {
          return applied(x.decl->name, nullptr, x.sig);
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          return applied(x.decl->name, &x.params, x.sig);
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return "((" + to_string(x.c) + ") . " + (is_primary(x.a) ? to_string(x.a) : "(" + to_string(x.a) + ")") + ")";
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          const auto& in = x.a.node().v;
          const bool bare = std::holds_alternative<VarOp>(in) || std::holds_alternative<ConstOp>(in) ||
                            std::holds_alternative<CallOp>(in) || std::holds_alternative<AdjointOp>(in);
          return (bare ? to_string(x.a) : "(" + to_string(x.a) + ")") + "^+";
        } else if constexpr (std::is_same_v<T, SumOp>) {
          return "(" + to_string(x.a) + " + " + to_string(x.b) + ")";
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          return "(" + to_string(x.a) + " * " + to_string(x.b) + ")";
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          return "(" + to_string(x.a) + " >< " + to_string(x.b) + ")";
        } else {
          return x.name + "(" + join(x.args) + ")";
        }
      },
      a.node().v);
}

// ---------------------------------------------------------------- signatures

std::optional<Signature> try_static_signature(const FormalOp& a) {
  return std::visit(
      [&](const auto& x) -> std::optional<Signature> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return Signature{};
        } else if constexpr (std::is_same_v<T, KetOp>) {
          return Signature{{x.reg}, {}};
        } else if constexpr (std::is_same_v<T, BraOp>) {
          return Signature{{}, {x.reg}};
        } else if constexpr (std::is_same_v<T, VarOp> || std::is_same_v<T, ConstOp>) {
          return x.sig;
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return try_static_signature(x.a);
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          auto s = try_static_signature(x.a);
          if (s) std::swap(s->dom, s->cod);
          return s;
        } else if constexpr (std::is_same_v<T, SumOp>) {
          auto s = try_static_signature(x.a);
          return s ? s : try_static_signature(x.b);
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          auto l = try_static_signature(x.a);
          auto r = try_static_signature(x.b);
          if (!l || !r) return std::nullopt;
          return Signature{l->dom, r->cod};
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          auto l = try_static_signature(x.a);
          auto r = try_static_signature(x.b);
          if (!l || !r) return std::nullopt;
          Signature s = *l;
          s.dom.insert(s.dom.end(), r->dom.begin(), r->dom.end());
          s.cod.insert(s.cod.end(), r->cod.begin(), r->cod.end());
          return s;
        } else {
          return std::nullopt;
        }
      },
      a.node().v);
}

Signature static_signature(const FormalOp& a) {
  auto s = try_static_signature(a);
  if (!s) throw EvalError("signature of '" + to_string(a) + "' depends on a recursive definition");
  return *s;
}

std::optional<QuantumType> static_type(const FormalOp& a) {
  return std::visit(
      [&](const auto& x) -> std::optional<QuantumType> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return QuantumType{};
        } else if constexpr (std::is_same_v<T, KetOp>) {
          return QuantumType{{x.reg.value_type()}, {}};
        } else if constexpr (std::is_same_v<T, BraOp>) {
          return QuantumType{{}, {x.reg.value_type()}};
        } else if constexpr (std::is_same_v<T, VarOp> || std::is_same_v<T, ConstOp>) {
          return x.sig.type();
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return static_type(x.a);
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          auto t = static_type(x.a);
          if (t) std::swap(t->dom, t->cod);
          return t;
        } else if constexpr (std::is_same_v<T, SumOp>) {
          auto t = static_type(x.a);
          return t ? t : static_type(x.b);
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          auto l = static_type(x.a);
          auto r = static_type(x.b);
          if (!l || !r) return std::nullopt;
          return QuantumType{l->dom, r->cod};
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          auto l = static_type(x.a);
          auto r = static_type(x.b);
          if (!l || !r) return std::nullopt;
          QuantumType t = *l;
          t.dom.insert(t.dom.end(), r->dom.begin(), r->dom.end());
          t.cod.insert(t.cod.end(), r->cod.begin(), r->cod.end());
          return t;
        } else {
          return std::nullopt;
        }
      },
      a.node().v);
}

// ---------------------------------------------------------------- traversal

namespace {

QuantumRef map_ref_exprs(const QuantumRef& r, const std::function<Expr(const Expr&)>& f) {
  std::vector<Expr> idx;
  idx.reserve(r.indices.size());
  for (const auto& e : r.indices) idx.push_back(f(e));
  return QuantumRef(r.var, std::move(idx));
}

RegisterString map_string(const RegisterString& rs, const std::function<QuantumRef(const QuantumRef&)>& f) {
  RegisterString out;
  out.reserve(rs.size());
  for (const auto& r : rs) out.push_back(f(r));
  return out;
}

FormalOp rebuild_call(const CallOp& c, std::vector<Expr> args) {
  auto def = c.def.lock();
  if (!def) throw EvalError("recursive definition '" + c.name + "' is no longer available");
  return FormalOp::call(def, std::move(args));
}

}  // namespace

FormalOp map_exprs(const FormalOp& a, const std::function<Expr(const Expr&)>& f) {
  auto ref = [&](const QuantumRef& r) { return map_ref_exprs(r, f); };
  return std::visit(
      [&](const auto& x) -> FormalOp {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return FormalOp::scalar(f(x.c));
        } else if constexpr (std::is_same_v<T, KetOp>) {
          return FormalOp::ket(f(x.label), ref(x.reg));
        } else if constexpr (std::is_same_v<T, BraOp>) {
          return FormalOp::bra(f(x.label), ref(x.reg));
        } else if constexpr (std::is_same_v<T, VarOp>) {
          return FormalOp::var(x.decl, Signature{map_string(x.sig.dom, ref), map_string(x.sig.cod, ref)});
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          std::vector<Expr> ps;
          for (const auto& p : x.params) ps.push_back(f(p));
          return FormalOp::constant(x.decl, std::move(ps),
                                    Signature{map_string(x.sig.dom, ref), map_string(x.sig.cod, ref)});
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return FormalOp::scale(f(x.c), map_exprs(x.a, f));
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          return FormalOp::adjoint(map_exprs(x.a, f));
        } else if constexpr (std::is_same_v<T, SumOp>) {
          return FormalOp::sum(map_exprs(x.a, f), map_exprs(x.b, f));
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          return FormalOp::product(map_exprs(x.a, f), map_exprs(x.b, f));
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          return FormalOp::tensor(map_exprs(x.a, f), map_exprs(x.b, f));
        } else {
          std::vector<Expr> args;
          for (const auto& e : x.args) args.push_back(f(e));
          return rebuild_call(x, std::move(args));
        }
      },
      a.node().v);
}

FormalOp map_refs(const FormalOp& a, const std::function<QuantumRef(const QuantumRef&)>& f) {
  return std::visit(
      [&](const auto& x) -> FormalOp {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          return a;
        } else if constexpr (std::is_same_v<T, KetOp>) {
          return FormalOp::ket(x.label, f(x.reg));
        } else if constexpr (std::is_same_v<T, BraOp>) {
          return FormalOp::bra(x.label, f(x.reg));
        } else if constexpr (std::is_same_v<T, VarOp>) {
          return FormalOp::var(x.decl, Signature{map_string(x.sig.dom, f), map_string(x.sig.cod, f)});
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          return FormalOp::constant(x.decl, x.params, Signature{map_string(x.sig.dom, f), map_string(x.sig.cod, f)});
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return FormalOp::scale(x.c, map_refs(x.a, f));
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          return FormalOp::adjoint(map_refs(x.a, f));
        } else if constexpr (std::is_same_v<T, SumOp>) {
          return FormalOp::sum(map_refs(x.a, f), map_refs(x.b, f));
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          return FormalOp::product(map_refs(x.a, f), map_refs(x.b, f));
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          return FormalOp::tensor(map_refs(x.a, f), map_refs(x.b, f));
        } else {
          throw EvalError("cannot rename registers inside the recursive call '" + x.name + "'");
        }
      },
      a.node().v);
}

std::vector<QuantumRef> refs_of(const FormalOp& a) {
  std::vector<QuantumRef> out;
  std::function<void(const FormalOp&)> walk = [&](const FormalOp& t) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, KetOp> || std::is_same_v<T, BraOp>) {
            out.push_back(x.reg);
          } else if constexpr (std::is_same_v<T, VarOp> || std::is_same_v<T, ConstOp>) {
            out.insert(out.end(), x.sig.dom.begin(), x.sig.dom.end());
            out.insert(out.end(), x.sig.cod.begin(), x.sig.cod.end());
          } else if constexpr (std::is_same_v<T, ScaleOp> || std::is_same_v<T, AdjointOp>) {
            walk(x.a);
          } else if constexpr (std::is_same_v<T, SumOp> || std::is_same_v<T, ProductOp> ||
                               std::is_same_v<T, TensorOp>) {
            walk(x.a);
            walk(x.b);
          }
        },
        t.node().v);
  };
  walk(a);
  return out;
}

// ---------------------------------------------------------------- substitution

FormalOp subst_classical(const FormalOp& a, const Substitution& sub) {
  if (sub.empty()) return a;
  return map_exprs(a, [&](const Expr& e) { return subst_expr(e, sub); });
}

FormalOp subst_classical(const FormalOp& a, const CellSubstitution& sub) {
  return map_exprs(a, [&](const Expr& e) { return subst_expr(e, sub); });
}

namespace {

/// B with its signature registers renamed to the occurrence's registers.
FormalOp retarget(const FormalOp& b, const Signature& b_sig, const Signature& site, const std::string& xname) {
  if (b_sig.dom.size() != site.dom.size() || b_sig.cod.size() != site.cod.size())
    throw TypeError("substitution for '" + xname + "': signature shape mismatch");
  std::vector<std::pair<QuantumRef, QuantumRef>> mapping;
  auto bind = [&](const QuantumRef& from, const QuantumRef& to) {
    for (const auto& [f, t] : mapping) {
      if (f == from) {
        if (t != to)
          throw TypeError("substitution for '" + xname + "': register " + to_string(from) +
                          " would be renamed inconsistently");
        return;
      }
    }
    mapping.emplace_back(from, to);
  };
  for (std::size_t i = 0; i < site.dom.size(); ++i) bind(b_sig.dom[i], site.dom[i]);
  for (std::size_t i = 0; i < site.cod.size(); ++i) bind(b_sig.cod[i], site.cod[i]);
  return map_refs(b, [&](const QuantumRef& r) -> QuantumRef {
    for (const auto& [f, t] : mapping)
      if (f == r) return t;
    throw TypeError("substitution for '" + xname + "': register " + to_string(r) +
                    " is not part of the substituted operator's signature");
  });
}

struct OpSubstEntry {
  FormalOp b;
  Signature sig;
};

FormalOp subst_op_impl(const FormalOp& a, const std::map<std::string, OpSubstEntry>& sub) {
  return std::visit(
      [&](const auto& x) -> FormalOp {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarOp>) {
          const auto it = sub.find(x.decl->name);
          if (it == sub.end()) return a;
          return retarget(it->second.b, it->second.sig, x.sig, x.decl->name);
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          return FormalOp::scale(x.c, subst_op_impl(x.a, sub));
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          return FormalOp::adjoint(subst_op_impl(x.a, sub));
        } else if constexpr (std::is_same_v<T, SumOp>) {
          return FormalOp::sum(subst_op_impl(x.a, sub), subst_op_impl(x.b, sub));
        } else if constexpr (std::is_same_v<T, ProductOp>) {
          return FormalOp::product(subst_op_impl(x.a, sub), subst_op_impl(x.b, sub));
        } else if constexpr (std::is_same_v<T, TensorOp>) {
          return FormalOp::tensor(subst_op_impl(x.a, sub), subst_op_impl(x.b, sub));
        } else {
          return a;
        }
      },
      a.node().v);
}

}  // namespace

FormalOp subst_operator(const FormalOp& a, const std::map<std::string, FormalOp>& sub) {
  if (sub.empty()) return a;
  std::map<std::string, OpSubstEntry> entries;
  for (const auto& [name, b] : sub) {
    auto sig = try_static_signature(b);
    if (!sig) throw TypeError("cannot substitute a recursive call for operator variable '" + name + "'");
    entries.emplace(name, OpSubstEntry{b, *sig});
  }
  // type agreement with each occurrence is checked against the declaration
  std::map<std::string, OpVarPtr> vars;
  collect_operator_vars(a, vars);
  for (const auto& [name, e] : entries) {
    const auto it = vars.find(name);
    if (it != vars.end() && it->second->type != e.sig.type())
      throw TypeError("operator of type " + to_string(e.sig.type()) + " substituted for '" + name + "' of type " +
                      to_string(it->second->type));
  }
  return subst_op_impl(a, entries);
}

FormalOp subst_operator(const FormalOp& a, const FormalOp& b, const OperatorVarDecl& x) {
  const auto sig = try_static_signature(b);
  if (!sig) throw TypeError("cannot substitute a recursive call for operator variable '" + x.name + "'");
  if (sig->type() != x.type)
    throw TypeError("operator of type " + to_string(sig->type()) + " substituted for '" + x.name + "' of type " +
                    to_string(x.type));
  return subst_operator(a, std::map<std::string, FormalOp>{{x.name, b}});
}

namespace {

// `open` holds the definitions being scanned, so self-references stop there.
void collect_vars_in(const FormalOp& a, std::map<std::string, VarType>& out, std::set<const RecursiveDef*>& open) {
  auto refs = [&](const RegisterString& rs) {
    for (const auto& r : rs)
      for (const auto& e : r.indices) collect_vars(e, out);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ScalarOp>) {
          collect_vars(x.c, out);
        } else if constexpr (std::is_same_v<T, KetOp> || std::is_same_v<T, BraOp>) {
          collect_vars(x.label, out);
          refs({x.reg});
        } else if constexpr (std::is_same_v<T, VarOp>) {
          refs(x.sig.dom);
          refs(x.sig.cod);
        } else if constexpr (std::is_same_v<T, ConstOp>) {
          for (const auto& p : x.params) collect_vars(p, out);
          refs(x.sig.dom);
          refs(x.sig.cod);
        } else if constexpr (std::is_same_v<T, ScaleOp>) {
          collect_vars(x.c, out);
          collect_vars_in(x.a, out, open);
        } else if constexpr (std::is_same_v<T, AdjointOp>) {
          collect_vars_in(x.a, out, open);
        } else if constexpr (std::is_same_v<T, CallOp>) {
          for (const auto& e : x.args) collect_vars(e, out);
          // free variables of the definition body other than its parameters
          auto def = x.def.lock();
          if (def && open.insert(def.get()).second) {
            std::set<std::string> params;
            for (const auto& [n, t] : def->params) params.insert(n);
            for (const auto& c : def->cases) {
              std::map<std::string, VarType> inner = free_vars(c.guard);
              if (c.body) collect_vars_in(*c.body, inner, open);
              for (const auto& [n, t] : inner)
                if (!params.count(n)) out.emplace(n, t);
            }
            for (const auto& [n, t] : def->captured) out.emplace(n, t);
            open.erase(def.get());
          }
        } else {
          collect_vars_in(x.a, out, open);
          collect_vars_in(x.b, out, open);
        }
      },
      a.node().v);
}

}  // namespace

void collect_classical_vars(const FormalOp& a, std::map<std::string, VarType>& out) {
  std::set<const RecursiveDef*> open;
  collect_vars_in(a, out, open);
}

std::map<std::string, VarType> free_classical_vars(const FormalOp& a) {
  std::map<std::string, VarType> out;
  collect_classical_vars(a, out);
  return out;
}

void collect_operator_vars(const FormalOp& a, std::map<std::string, OpVarPtr>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarOp>) {
          out.emplace(x.decl->name, x.decl);
        } else if constexpr (std::is_same_v<T, ScaleOp> || std::is_same_v<T, AdjointOp>) {
          collect_operator_vars(x.a, out);
        } else if constexpr (std::is_same_v<T, SumOp> || std::is_same_v<T, ProductOp> || std::is_same_v<T, TensorOp>) {
          collect_operator_vars(x.a, out);
          collect_operator_vars(x.b, out);
        }
      },
      a.node().v);
}

std::map<std::string, OpVarPtr> free_operator_vars(const FormalOp& a) {
  std::map<std::string, OpVarPtr> out;
  collect_operator_vars(a, out);
  return out;
}

// ---------------------------------------------------------------- shorthands

FormalOp operator+(const FormalOp& a, const FormalOp& b) { return FormalOp::sum(a, b); }
FormalOp operator*(const FormalOp& a, const FormalOp& b) { return FormalOp::product(a, b); }
FormalOp operator*(const Expr& c, const FormalOp& a) { return FormalOp::scale(c, a); }

FormalOp tensor(const std::vector<FormalOp>& parts) {
  if (parts.empty()) return FormalOp::scalar(Expr::integer(1));
  FormalOp acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = FormalOp::tensor(acc, parts[i]);
  return acc;
}

FormalOp apply(const OpConstPtr& decl, RegisterString regs, std::vector<Expr> params) {
  Signature sig{regs, regs};
  return FormalOp::constant(decl, std::move(params), std::move(sig));
}

}  // namespace sol

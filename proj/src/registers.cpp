#include "sol/registers.hpp"

#include <cmath>

namespace sol {

QuantumVarPtr make_qubit(const std::string& name) {
  return std::make_shared<const QuantumVarDecl>(QuantumVarDecl{name, VarType{{}, BasicType::Bool}});
}

QuantumVarPtr make_qvar(const std::string& name, VarType type) {
  if (!is_enumerable(type.value)) throw TypeError("quantum variable '" + name + "' must have an enumerable value type");
  for (BasicType a : type.args)
    if (!is_enumerable(a)) throw TypeError("quantum array '" + name + "' must have enumerable argument types");
  return std::make_shared<const QuantumVarDecl>(QuantumVarDecl{name, std::move(type)});
}

QuantumRef::QuantumRef(QuantumVarPtr v, std::vector<Expr> idx) : var(std::move(v)), indices(std::move(idx)) {
  const auto& args = var->type.args;
  if (indices.size() != args.size())
    throw TypeError("quantum variable '" + var->name + "' expects " + std::to_string(args.size()) + " index(es), got " +
                    std::to_string(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (indices[i].type() != args[i])
      throw TypeError("index " + std::to_string(i + 1) + " of '" + var->name + "' has type " +
                      to_string(indices[i].type()) + ", expected " + to_string(args[i]));
}

bool operator==(const QuantumRef& a, const QuantumRef& b) {
  return a.var->name == b.var->name && a.indices == b.indices;
}

std::string to_string(const QuantumRef& r) {
  if (r.indices.empty()) return r.var->name;
  std::string s = r.var->name + "[";
  for (std::size_t i = 0; i < r.indices.size(); ++i) {
    if (i) s += ", ";
    s += to_string(r.indices[i]);
  }
  return s + "]";
}

std::string to_string(const RegisterString& rs) {
  std::string s;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) s += ", ";
    s += to_string(rs[i]);
  }
  return s;
}

bool operator==(const GroundRef& a, const GroundRef& b) { return a.var->name == b.var->name && a.index == b.index; }

bool operator<(const GroundRef& a, const GroundRef& b) {
  if (a.var->name != b.var->name) return a.var->name < b.var->name;
  return a.index < b.index;
}

std::string to_string(const GroundRef& g) {
  if (g.index.empty()) return g.var->name;
  std::string s = g.var->name + "[";
  for (std::size_t i = 0; i < g.index.size(); ++i) {
    if (i) s += ",";
    if (g.var->type.args[i] == BasicType::Bool)
      s += g.index[i] ? "true" : "false";
    else
      s += std::to_string(g.index[i]);
  }
  return s + "]";
}

std::string to_string(const std::vector<GroundRef>& gs) {
  std::string s = "(";
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (i) s += ", ";
    s += to_string(gs[i]);
  }
  return s + ")";
}

std::size_t dim_of_type(BasicType t, const IntRange& range) {
  switch (t) {
    case BasicType::Bool:
      return 2;
    case BasicType::Int:
      if (range.lo > range.hi) throw EvalError("empty Int range");
      return static_cast<std::size_t>(range.size());
    case BasicType::Complex:
      throw UnsupportedError("type C has no finite quantum domain");
  }
  return 0;
}

std::size_t dim_of(const RegisterString& rs, const IntRange& range) {
  std::size_t d = 1;
  for (const auto& r : rs) d *= dim_of_type(r.value_type(), range);
  return d;
}

std::size_t dim_of(const std::vector<GroundRef>& gs, const IntRange& range) {
  std::size_t d = 1;
  for (const auto& g : gs) d *= dim_of_type(g.value_type(), range);
  return d;
}

Formula distinctness_formula(const RegisterString& rs) {
  std::vector<Formula> conjuncts;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      if (rs[i].name() != rs[j].name()) continue;
      std::vector<Formula> differs;
      for (std::size_t l = 0; l < rs[i].indices.size(); ++l)
        differs.push_back(Formula::atom(ne(rs[i].indices[l], rs[j].indices[l])));
      conjuncts.push_back(Formula::any_of(differs));
    }
  }
  return Formula::all_of(conjuncts);
}

GroundRef ground(const Structure& s, const State& sigma, const QuantumRef& q) {
  GroundRef g{q.var, {}};
  g.index.reserve(q.indices.size());
  for (const auto& e : q.indices) g.index.push_back(index_key(eval_expr(s, sigma, e)));
  return g;
}

std::vector<GroundRef> ground_string(const Structure& s, const State& sigma, const RegisterString& rs) {
  std::vector<GroundRef> out;
  out.reserve(rs.size());
  for (const auto& r : rs) out.push_back(ground(s, sigma, r));
  return out;
}

bool label_type_ok(BasicType label, BasicType reg) {
  if (label == reg) return true;
  if (reg == BasicType::Bool) return true;  // numeric 0/1 labels
  return reg == BasicType::Int && label == BasicType::Complex;
}

std::size_t basis_index(const Value& label, BasicType reg_type, const IntRange& range, double tol) {
  auto integral = [&](std::int64_t& out) {
    if (const auto* i = std::get_if<std::int64_t>(&label)) {
      out = *i;
      return true;
    }
    if (const auto* c = std::get_if<Complex>(&label)) {
      const double r = std::round(c->real());
      if (std::abs(c->imag()) <= tol && std::abs(c->real() - r) <= tol) {
        out = static_cast<std::int64_t>(r);
        return true;
      }
    }
    return false;
  };
  switch (reg_type) {
    case BasicType::Bool: {
      if (const auto* b = std::get_if<bool>(&label)) return *b ? 1 : 0;
      std::int64_t v = 0;
      if (integral(v) && (v == 0 || v == 1)) return static_cast<std::size_t>(v);
      throw EvalError("label " + to_string(label) + " is outside the domain of Bool");
    }
    case BasicType::Int: {
      std::int64_t v = 0;
      if (!integral(v)) throw EvalError("label " + to_string(label) + " is not an integer");
      if (!range.contains(v))
        throw EvalError("label " + std::to_string(v) + " is outside the Int range [" + std::to_string(range.lo) + ", " +
                        std::to_string(range.hi) + "]");
      return static_cast<std::size_t>(v - range.lo);
    }
    case BasicType::Complex:
      break;
  }
  throw UnsupportedError("registers of type C have no standard basis");
}

Value basis_label(std::size_t index, BasicType reg_type, const IntRange& range) {
  if (reg_type == BasicType::Bool) return Value{index != 0};
  return Value{range.lo + static_cast<std::int64_t>(index)};
}

RegisterString subst_registers(const RegisterString& rs, const Substitution& sub) {
  RegisterString out;
  out.reserve(rs.size());
  for (const auto& r : rs) {
    std::vector<Expr> idx;
    for (const auto& e : r.indices) idx.push_back(subst_expr(e, sub));
    out.emplace_back(r.var, std::move(idx));
  }
  return out;
}

RegisterString subst_registers(const RegisterString& rs, const CellSubstitution& sub) {
  RegisterString out;
  out.reserve(rs.size());
  for (const auto& r : rs) {
    std::vector<Expr> idx;
    for (const auto& e : r.indices) idx.push_back(subst_expr(e, sub));
    out.emplace_back(r.var, std::move(idx));
  }
  return out;
}

}  // namespace sol

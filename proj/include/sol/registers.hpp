#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sol/classical.hpp"

namespace sol {

/// A simple (no argument types) or array quantum variable.
struct QuantumVarDecl {
  std::string name;
  VarType type;  // args empty for a simple variable

  bool is_array() const { return type.is_array(); }
  BasicType value_type() const { return type.value; }
};

using QuantumVarPtr = std::shared_ptr<const QuantumVarDecl>;

QuantumVarPtr make_qubit(const std::string& name);
QuantumVarPtr make_qvar(const std::string& name, VarType type);

/// q or q[s1, ..., sn].
struct QuantumRef {
  QuantumVarPtr var;
  std::vector<Expr> indices;

  QuantumRef() = default;
  QuantumRef(QuantumVarPtr v, std::vector<Expr> idx = {});

  const std::string& name() const { return var->name; }
  BasicType value_type() const { return var->value_type(); }
};

bool operator==(const QuantumRef& a, const QuantumRef& b);
inline bool operator!=(const QuantumRef& a, const QuantumRef& b) { return !(a == b); }
std::string to_string(const QuantumRef& r);

using RegisterString = std::vector<QuantumRef>;
std::string to_string(const RegisterString& rs);

/// q[d1, ..., dn] with concrete indices (Bool stored as 0/1).
struct GroundRef {
  QuantumVarPtr var;
  std::vector<std::int64_t> index;

  const std::string& name() const { return var->name; }
  BasicType value_type() const { return var->value_type(); }
};

/// Same subsystem iff same base variable and same index values.
bool operator==(const GroundRef& a, const GroundRef& b);
inline bool operator!=(const GroundRef& a, const GroundRef& b) { return !(a == b); }
/// Canonical order: by base name, then index values.
bool operator<(const GroundRef& a, const GroundRef& b);
std::string to_string(const GroundRef& g);
std::string to_string(const std::vector<GroundRef>& gs);

/// |D_T|; throws for C.
std::size_t dim_of_type(BasicType t, const IntRange& range);
std::size_t dim_of(const RegisterString& rs, const IntRange& range);
std::size_t dim_of(const std::vector<GroundRef>& gs, const IntRange& range);

/// Dist(q̄) as a classical formula.
Formula distinctness_formula(const RegisterString& rs);

GroundRef ground(const Structure& s, const State& sigma, const QuantumRef& q);
std::vector<GroundRef> ground_string(const Structure& s, const State& sigma, const RegisterString& rs);

/// Position of a classical value in the standard basis of a register of type
/// `reg_type`. Bool registers also accept the numeric labels 0 and 1.
std::size_t basis_index(const Value& label, BasicType reg_type, const IntRange& range, double tol);
/// Inverse of basis_index for canonical labels.
Value basis_label(std::size_t index, BasicType reg_type, const IntRange& range);
/// Whether a label of type `label` may name a basis state of a register of type `reg`.
bool label_type_ok(BasicType label, BasicType reg);

/// Register-level renaming applied to a string.
RegisterString subst_registers(const RegisterString& rs, const Substitution& sub);
RegisterString subst_registers(const RegisterString& rs, const CellSubstitution& sub);

}  // namespace sol

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sol/entailment.hpp"
#include "sol/library.hpp"

namespace sol {

/// One declaration or directive of a `.sol` script.
struct ScriptItem {
  enum class Kind : std::uint8_t {
    Var,        // var x : T;
    Quantum,    // qubit q;  qvar q : T;  qreg q : T1*...*Tn -> T;
    OpVar,      // opvar X : T -> T';
    Let,        // let name = A;
    Def,        // def name(p:T, ...) { guard => body; ... }
    Library,    // library q [, j];
    Range,      // range x lo..hi;
    Set,        // set x = e;  set a[i] = e;
    Assume,     // assume F;
    Assert,     // assert A;
    Entail,     // entail F, ... |- A, ... => B;
    Eval,       // eval A;  (operator or formula)
    Normalize,  // normalize A;
    Sign,       // sign A;
    Suite,      // suite name;
  };

  Kind kind = Kind::Var;
  int line = 0;
  std::string name;
  VarType type;
  QuantumType op_type;
  std::optional<FormalOp> op;
  std::optional<SolFormula> sol;
  std::vector<Formula> sigma;
  std::vector<SolFormula> gamma;
  IntRange range;
  /// Set: the cell indices (empty for a simple variable) and the value.
  std::vector<Expr> indices;
  std::optional<Expr> value;
  std::shared_ptr<const RecursiveDef> def;
  /// Library: the bit array name.
  std::string bits;

  bool is_directive() const;
};

bool operator==(const ScriptItem& a, const ScriptItem& b);
std::string to_string(ScriptItem::Kind k);

struct Script {
  std::vector<ScriptItem> items;
  /// Keeps recursive definitions (user and library) alive for the terms that call them.
  std::vector<std::shared_ptr<const RecursiveDef>> defs;
  std::vector<StateLibrary> libraries;
  /// Names of quantum variables whose value type is Int.
  std::vector<std::string> int_quantum_vars;

  // Declarations in scope at the end of the script.
  std::map<std::string, VarType> classical;
  std::map<std::string, QuantumVarPtr> quantum;
  std::map<std::string, OpVarPtr> opvars;
  std::map<std::string, FormalOp> lets;
  std::map<std::string, std::shared_ptr<const RecursiveDef>> callables;
};

/// Parse a script; throws ParseError with line and column.
Script parse_script(const std::string& text);

/// Canonical text of one item, on one line (definitions span several).
std::string print_item(const ScriptItem& item);
/// Canonical text of a script; parse_script(print_script(s)) equals s item by item.
std::string print_script(const Script& s);

/// Parse a lone operator term or SOL formula against the declarations of `context`.
FormalOp parse_operator(const Script& context, const std::string& text);
SolFormula parse_formula(const Script& context, const std::string& text);

}  // namespace sol

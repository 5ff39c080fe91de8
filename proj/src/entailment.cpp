#include "sol/entailment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sol/sampling.hpp"

namespace sol {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid:
      return "Valid";
    case Verdict::Refuted:
      return "Refuted";
    case Verdict::Unknown:
      return "Unknown";
  }
  return "?";
}

namespace {

/// Candidate values for one free classical variable.
struct VarDomain {
  std::string name;
  VarType type;
  std::vector<Value> scalars;
  std::vector<ArrayValue> arrays;
  bool exact = true;

  std::size_t size() const { return type.is_array() ? arrays.size() : scalars.size(); }
};

std::vector<Value> complex_samples(const std::string& name, const SamplingOptions& opts) {
  std::vector<Value> out{Complex(0.0), Complex(1.0), Complex(-1.0), Complex(0.0, 1.0), Complex(1.0 / std::sqrt(2.0))};
  Rng rng(mix_seed(opts.seed, name));
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t i = 0; i < opts.samples; ++i) {
    const double re = n(rng);
    const double im = n(rng);
    out.emplace_back(Complex(re, im));
  }
  return out;
}

Value random_value(BasicType t, const std::vector<Value>& finite, Rng& rng) {
  if (t == BasicType::Complex) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return Complex(re, im);
  }
  std::uniform_int_distribution<std::size_t> pick(0, finite.size() - 1);
  return finite[pick(rng)];
}

VarDomain domain_for(const Structure& s, const std::string& name, const VarType& type,
                     const std::map<std::string, IntRange>& ranges, const SamplingOptions& opts) {
  VarDomain d{name, type, {}, {}, true};
  const auto it = ranges.find(name);
  const IntRange range = it != ranges.end() ? it->second : s.int_range;
  if (!type.is_array()) {
    if (type.value == BasicType::Complex) {
      d.scalars = complex_samples(name, opts);
      d.exact = false;
    } else {
      d.scalars = s.domain(type.value, range);
    }
    return d;
  }
  // arrays: enumerate every total map when small, otherwise sample
  std::vector<std::vector<std::int64_t>> keys{{}};
  for (BasicType a : type.args) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& k : keys)
      for (const Value& v : s.domain(a, range)) {
        auto e = k;
        e.push_back(index_key(v));
        next.push_back(std::move(e));
      }
    keys = std::move(next);
    if (keys.size() > 4096) break;
  }
  std::vector<Value> values;
  if (type.value != BasicType::Complex) values = s.domain(type.value, range);
  constexpr double kMaxEnumerated = 4096;
  const bool enumerable = type.value != BasicType::Complex && keys.size() <= 4096 &&
                          std::pow(static_cast<double>(values.size()), static_cast<double>(keys.size())) <= kMaxEnumerated;
  if (enumerable) {
    std::vector<std::size_t> digit(keys.size(), 0);
    while (true) {
      ArrayValue av;
      av.fallback = values.front();
      for (std::size_t i = 0; i < keys.size(); ++i) av.cells[keys[i]] = values[digit[i]];
      d.arrays.push_back(std::move(av));
      std::size_t i = 0;
      for (; i < digit.size(); ++i) {
        if (++digit[i] < values.size()) break;
        digit[i] = 0;
      }
      if (i == digit.size()) break;
    }
    return d;
  }
  d.exact = false;
  Rng rng(mix_seed(opts.seed, name, keys.size()));
  for (std::size_t n = 0; n < opts.samples; ++n) {
    ArrayValue av;
    av.fallback = random_value(type.value, values, rng);
    if (keys.size() <= 4096)
      for (const auto& k : keys) av.cells[k] = random_value(type.value, values, rng);
    d.arrays.push_back(std::move(av));
  }
  return d;
}

class BudgetExhausted : public std::exception {};

class Checker {
 public:
  Checker(const QuantumStructure& qs, const EntailmentQuery& q) : qs_(qs), q_(q) {}

  CheckResult run() {
    try {
      prepare();
      State sigma = q_.fixed;
      if (!sigma_ok(sigma, -1)) {
        result_.verdict = Verdict::Valid;
        result_.reason = "no state satisfies the assumptions";
        finish();
        return result_;
      }
      if (enumerate(sigma, 0)) return result_;
      finish();
    } catch (const BudgetExhausted&) {
      result_.verdict = Verdict::Unknown;
      result_.reason = "state budget of " + std::to_string(q_.state_budget) + " exhausted";
    } catch (const ResourceError& e) {
      result_.verdict = Verdict::Unknown;
      result_.reason = std::string("resource limit: ") + e.what();
    } catch (const UnsupportedError& e) {
      result_.verdict = Verdict::Unknown;
      result_.reason = std::string("unsupported: ") + e.what();
    } catch (const EvalError& e) {
      result_.verdict = Verdict::Unknown;
      result_.reason = std::string("evaluation error: ") + e.what();
    }
    return result_;
  }

 private:
  void prepare() {
    std::map<std::string, VarType> free;
    for (const auto& f : q_.sigma)
      for (const auto& [n, t] : free_vars(f)) free.emplace(n, t);
    for (const auto& g : q_.gamma)
      for (const auto& [n, t] : free_classical_vars(g)) free.emplace(n, t);
    for (const auto& [n, t] : free_classical_vars(q_.goal)) free.emplace(n, t);
    for (auto it = free.begin(); it != free.end();) {
      if (q_.fixed.scalars.count(it->first) || q_.fixed.arrays.count(it->first))
        it = free.erase(it);
      else
        ++it;
    }
    order_variables(free);
    for (const auto& name : order_) {
      vars_.push_back(domain_for(qs_.classical, name, free.at(name), q_.ranges, q_.sampling));
      if (!vars_.back().exact) result_.exact = false;
    }
    // each assumption is checked as soon as its last variable is assigned
    levels_.assign(q_.sigma.size(), -1);
    for (std::size_t i = 0; i < q_.sigma.size(); ++i)
      for (const auto& [n, t] : free_vars(q_.sigma[i])) {
        const auto pos = std::find(order_.begin(), order_.end(), n);
        if (pos != order_.end()) levels_[i] = std::max(levels_[i], static_cast<int>(pos - order_.begin()));
      }
    std::map<std::string, OpVarPtr> ops;
    for (const auto& g : q_.gamma)
      for (const auto& [n, d] : free_operator_vars(g)) ops.emplace(n, d);
    for (const auto& [n, d] : free_operator_vars(q_.goal)) ops.emplace(n, d);
    for (const auto& [n, d] : ops) {
      op_names_.push_back(n);
      op_samples_.push_back(samples_for(qs_, *d, q_.sampling));
    }
    if (!ops.empty()) result_.exact = false;
  }

  /// Variables of the assumption with the fewest unplaced variables go first.
  void order_variables(const std::map<std::string, VarType>& free) {
    std::vector<std::set<std::string>> pending;
    for (const auto& f : q_.sigma) {
      std::set<std::string> vs;
      for (const auto& [n, t] : free_vars(f))
        if (free.count(n)) vs.insert(n);
      pending.push_back(std::move(vs));
    }
    std::set<std::string> placed;
    while (true) {
      const std::set<std::string>* best = nullptr;
      for (const auto& vs : pending) {
        std::size_t left = 0;
        for (const auto& v : vs) left += placed.count(v) ? 0 : 1;
        if (left == 0) continue;
        std::size_t best_left = 0;
        if (best)
          for (const auto& v : *best) best_left += placed.count(v) ? 0 : 1;
        if (!best || left < best_left) best = &vs;
      }
      if (!best) break;
      for (const auto& v : *best)
        if (placed.insert(v).second) order_.push_back(v);
    }
    for (const auto& [n, t] : free)
      if (!placed.count(n)) order_.push_back(n);
  }

  bool sigma_ok(const State& sigma, int level) {
    for (std::size_t i = 0; i < q_.sigma.size(); ++i)
      if (levels_[i] == level && !satisfies(qs_.classical, sigma, q_.sigma[i])) return false;
    return true;
  }

  void tick() {
    if (++result_.stats.states > q_.state_budget) throw BudgetExhausted();
  }

  /// True once a verdict is final.
  bool enumerate(State& sigma, std::size_t depth) {
    if (depth == vars_.size()) {
      ++result_.stats.satisfying;
      return check_state(sigma);
    }
    const VarDomain& d = vars_[depth];
    for (std::size_t i = 0; i < d.size(); ++i) {
      tick();
      if (d.type.is_array())
        sigma.arrays[d.name] = d.arrays[i];
      else
        sigma.scalars[d.name] = d.scalars[i];
      if (!sigma_ok(sigma, static_cast<int>(depth))) continue;
      if (enumerate(sigma, depth + 1)) return true;
    }
    if (d.type.is_array())
      sigma.arrays.erase(d.name);
    else
      sigma.scalars.erase(d.name);
    return false;
  }

  bool check_state(const State& sigma) {
    Context ctx{sigma, {}};
    std::vector<std::size_t> digit(op_names_.size(), 0);
    for (std::size_t i = 0; i < op_samples_.size(); ++i)
      if (op_samples_[i].empty()) return false;
    while (true) {
      for (std::size_t i = 0; i < op_names_.size(); ++i) ctx.eta[op_names_[i]] = op_samples_[i][digit[i]];
      ++result_.stats.valuations;
      if (check_context(ctx)) return true;
      std::size_t i = 0;
      for (; i < digit.size(); ++i) {
        if (++digit[i] < op_samples_[i].size()) break;
        digit[i] = 0;
      }
      if (i == digit.size()) return false;
    }
  }

  bool check_context(const Context& ctx) {
    SatTrace trace;
    Truth premise{true, true};
    for (const auto& g : q_.gamma) {
      const Truth t = sat_sol(qs_, ctx, g, q_.sampling, &trace);
      premise = {premise.value && t.value, premise.certain && t.certain};
      if (!t.value && t.certain) {
        premise = {false, true};
        break;
      }
    }
    if (trace.used_sampling) result_.exact = false;
    if (!premise.value && premise.certain) return false;
    const Truth goal = sat_sol(qs_, ctx, q_.goal, q_.sampling, &trace);
    if (trace.used_sampling) result_.exact = false;
    if (goal.value) {
      if (!goal.certain) result_.exact = false;
      return false;
    }
    if (premise.value && premise.certain && goal.certain) {
      result_.verdict = Verdict::Refuted;
      result_.reason = "counterexample found";
      result_.witness = ctx;
      result_.diagnostics = trace.diagnostics;
      return true;
    }
    inconclusive_ = true;
    result_.exact = false;
    return false;
  }

  void finish() {
    if (result_.exact && !inconclusive_) {
      result_.verdict = Verdict::Valid;
      if (result_.reason.empty()) result_.reason = "all states checked";
    } else {
      result_.verdict = Verdict::Unknown;
      result_.reason = "sampled";
    }
  }

  const QuantumStructure& qs_;
  const EntailmentQuery& q_;
  CheckResult result_;
  std::vector<std::string> order_;
  std::vector<VarDomain> vars_;
  std::vector<int> levels_;
  std::vector<std::string> op_names_;
  std::vector<std::vector<CMatrix>> op_samples_;
  bool inconclusive_ = false;
};

std::size_t grid_qubits(const std::vector<std::vector<Expr>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw TypeError("coefficient grid size must be a power of two");
  for (const auto& row : a)
    if (row.size() != n) throw TypeError("coefficient grid must be square");
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

RegisterString fresh_qubits(std::size_t k) {
  RegisterString qs;
  for (std::size_t i = 0; i < k; ++i) qs.emplace_back(make_qubit("q" + std::to_string(i + 1)));
  return qs;
}

}  // namespace

CheckResult check_entailment(const QuantumStructure& qs, const EntailmentQuery& q) { return Checker(qs, q).run(); }

FormalOp coefficient_operator(const std::vector<std::vector<Expr>>& a, const RegisterString& qubits) {
  const std::size_t k = grid_qubits(a);
  if (qubits.size() != k) throw TypeError("coefficient grid does not match the number of qubits");
  const std::size_t n = a.size();
  auto basis = [&](std::size_t idx, bool ket) {
    std::vector<FormalOp> parts;
    for (std::size_t b = 0; b < k; ++b) {
      const bool bit = (idx >> (k - 1 - b)) & 1U;
      parts.push_back(ket ? FormalOp::ket(Expr::boolean(bit), qubits[b]) : FormalOp::bra(Expr::boolean(bit), qubits[b]));
    }
    return tensor(parts);
  };
  std::optional<FormalOp> sum;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      FormalOp term = FormalOp::scale(a[i][j], FormalOp::product(basis(i, true), basis(j, false)));
      sum = sum ? FormalOp::sum(*sum, term) : term;
    }
  return *sum;
}

DefinitionCheck unitary_def_check(const QuantumStructure& qs, const State& sigma,
                                  const std::vector<std::vector<Expr>>& a) {
  const std::size_t k = grid_qubits(a);
  const std::size_t n = a.size();
  std::vector<Formula> conds;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = i; l < n; ++l) {
      Expr acc = Expr::integer(0);
      for (std::size_t j = 0; j < n; ++j) acc = acc + a[i][j] * Expr::app("conj", {a[l][j]});
      conds.push_back(Formula::atom(eq(acc, Expr::integer(i == l ? 1 : 0))));
    }
  DefinitionCheck out;
  out.conditions = satisfies(qs.classical, sigma, Formula::all_of(conds));
  const FormalOp u = coefficient_operator(a, fresh_qubits(k));
  out.predicate = check_predicate(qs, Context{sigma, {}}, PredicateKind::Unitary, u).holds;
  return out;
}

DefinitionCheck observable_def_check(const QuantumStructure& qs, const State& sigma,
                                     const std::vector<std::vector<Expr>>& a) {
  const std::size_t k = grid_qubits(a);
  const std::size_t n = a.size();
  std::vector<Formula> conds;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) conds.push_back(Formula::atom(eq(a[i][j], Expr::app("conj", {a[j][i]}))));
  DefinitionCheck out;
  out.conditions = satisfies(qs.classical, sigma, Formula::all_of(conds));
  const FormalOp o = coefficient_operator(a, fresh_qubits(k));
  out.predicate = check_predicate(qs, Context{sigma, {}}, PredicateKind::Observable, o).holds;
  return out;
}

}  // namespace sol

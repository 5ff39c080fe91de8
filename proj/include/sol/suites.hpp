#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sol/core.hpp"

namespace sol {

/// One property checked on `trials` random instances.
struct SuiteCase {
  std::string name;
  std::size_t trials = 0;
  std::size_t passed = 0;
  /// First failing instance, printed.
  std::string counterexample;
  /// Extra counts worth reporting (e.g. how many premises were non-vacuous).
  std::string note;

  bool ok() const { return trials > 0 && passed == trials; }
};

struct SuiteReport {
  std::string name;
  std::vector<SuiteCase> cases;

  bool ok() const;
  std::size_t checks() const;
};

/// Outcome of one trial: a failure message, or nothing on success.
using Failure = std::optional<std::string>;

/// Run `trial` n times; a returned message or an exception is a failure.
SuiteCase run_case(const std::string& name, std::size_t n, const std::function<Failure(std::size_t)>& trial);

struct SuiteOptions {
  std::size_t instances = 100;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  /// Random operators drawn per operator quantifier or variable.
  std::size_t samples = 4;
};

/// Stat1-3, Uni1-2 and Obs1-3 on random instances satisfying each premise.
SuiteReport axiom_suite(const SuiteOptions& opts = {});
/// The four quantifier schemas, the deduction theorem as a metamorphic
/// property of the checker, and closure of Valid under substitution.
SuiteReport schema_suite(const SuiteOptions& opts = {});
/// Anti-symmetry, transitivity, the sound forms of the monotonicity laws,
/// probabilistic combination and preservation of order verdicts under
/// substitution.
SuiteReport order_laws_suite(const SuiteOptions& opts = {});
/// Substitution lemmas for expressions, formulas, operators and SOL formulas.
SuiteReport substitution_suite(const SuiteOptions& opts = {});
/// Random well-signed terms evaluate with the grounded dimensions; ill-signed
/// ones are rejected by the expected rule.
SuiteReport signing_suite(const SuiteOptions& opts = {});
/// Normal forms against dense evaluation, ground equality against compare,
/// and the named rewrite rules on their displayed instances.
SuiteReport rewrite_suite(const SuiteOptions& opts = {});
/// Deduction theorem alone, on `instances` random small queries.
SuiteReport deduction_suite(const SuiteOptions& opts = {});

}  // namespace sol

// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: acceptance <solcheck-binary> <golden-dir>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sol/library.hpp"
#include "sol/runner.hpp"
#include "sol/suites.hpp"

namespace {

using namespace sol;

// Pinned thresholds.
constexpr double kTol = 1e-9;
constexpr std::uint64_t kSeed = 1;
constexpr double kSubstitutionSeconds = 10;
constexpr double kAddressSeconds = 5;
constexpr double kQftSeconds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string secs(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

SuiteOptions options(std::size_t instances) {
  SuiteOptions o;
  o.instances = instances;
  o.seed = kSeed;
  o.tol = kTol;
  return o;
}

const SuiteCase* find_case(const SuiteReport& r, const std::string& name) {
  for (const auto& c : r.cases)
    if (c.name == name) return &c;
  return nullptr;
}

// Every named case is present, ran `trials` times (0 = any) and passed.
bool cases_ok(const SuiteReport& r, const std::vector<std::string>& names, std::size_t trials, std::string& why) {
  for (const auto& n : names) {
    const SuiteCase* c = find_case(r, n);
    if (!c) {
      why += "missing case '" + n + "'; ";
      return false;
    }
    if ((trials && c->trials != trials) || !c->ok()) {
      why += n + ": " + std::to_string(c->passed) + "/" + std::to_string(c->trials) +
             (c->counterexample.empty() ? "" : " (" + c->counterexample + ")") + "; ";
      return false;
    }
  }
  return true;
}

std::string failures(const SuiteReport& r) {
  std::string out;
  for (const auto& c : r.cases)
    if (!c.ok()) out += c.name + ": " + c.counterexample + "; ";
  return out;
}

Outcome substitution() {
  const Stopwatch w;
  const SuiteReport r = substitution_suite(options(1000));
  const double t = w.seconds();
  std::string why;
  const bool ok = cases_ok(r,
                           {"expression substitution", "formula substitution", "array cell substitution",
                            "operator substitution", "SOL classical substitution", "SOL operator substitution"},
                           1000, why);
  return {ok && t < kSubstitutionSeconds,
          std::to_string(r.cases.size()) + " lemmas x 1000 instances, " + secs(t) + " (limit " +
              secs(kSubstitutionSeconds) + ")" + (ok ? "" : "; " + why)};
}

Outcome signing() {
  const SuiteReport r = signing_suite(options(1000));
  std::string why;
  const bool ok = cases_ok(r, {"well-signed terms evaluate"}, 1000, why) &&
                  cases_ok(r, {"ill-signed terms are rejected"}, 200, why);
  return {ok, "1000 well-signed terms evaluate, 200 ill-signed terms rejected by the expected rule" +
                  (ok ? "" : "; " + why)};
}

Outcome axioms() {
  const SuiteReport r = axiom_suite(options(100));
  std::string why;
  const bool ok = cases_ok(r, {"Stat1", "Stat2", "Stat3", "Uni1", "Uni2", "Obs1", "Obs2", "Obs3"}, 100, why);
  return {ok, "8 axioms x 100 instances" + (ok ? "" : "; " + why)};
}

struct EntailRun {
  std::string verdict;
  nlohmann::json detail;
  double seconds = 0;
};

EntailRun run_assert(const std::string& script) {
  Config cfg;
  cfg.int_range = {-20, 40};
  cfg.tol = kTol;
  cfg.seed = kSeed;
  const Stopwatch w;
  const Report rep = run_text(script, cfg);
  EntailRun out;
  out.seconds = w.seconds();
  if (!rep.error.empty()) {
    out.verdict = "error: " + rep.error;
    return out;
  }
  for (const auto& d : rep.directives)
    if (d.kind == "assert") {
      out.verdict = d.verdict;
      out.detail = nlohmann::json::parse(d.detail);
    }
  return out;
}

const char* const kAddressScript = R"(
qreg q : Int -> Bool;
var k, m, n, l : Int;
assume k = 3*m/2 - 2;
assume n = 5*l/7 - 1;
)";
const char* const kAddressGoal =
    "assert CNOT[q[2*k+3], q[5*l-2]] * CNOT[q[3*m-1], q[7*n+5]] == I[q[3*m-1], q[5*l-2]];\n";

Outcome address_arithmetic() {
  const EntailRun r = run_assert(std::string(kAddressScript) + kAddressGoal);
  std::string detail = "verdict " + r.verdict;
  if (r.detail.contains("satisfying"))
    detail += ", " + r.detail["satisfying"].dump() + " satisfying of " + r.detail["states"].dump() + " states";
  if (r.detail.contains("witness")) detail += ", witness " + r.detail["witness"]["state"].dump();
  detail += ", " + secs(r.seconds) + " (limit " + secs(kAddressSeconds) + ")";
  return {r.verdict == "Valid" && r.seconds < kAddressSeconds, detail};
}

// Informational: the same goal once the two controls are assumed distinct.
std::string address_guarded() {
  const EntailRun r =
      run_assert(std::string(kAddressScript) + "assume 3*m - 1 != 5*l - 2;\n" + kAddressGoal);
  std::string s = "with 3m-1 != 5l-2 assumed: " + r.verdict;
  if (r.detail.contains("satisfying")) s += ", " + r.detail["satisfying"].dump() + " satisfying states";
  return s;
}

Outcome ghz() {
  const SuiteReport r = ghz_suite(options(1));
  std::string why;
  const bool ok = cases_ok(r, {"m = n entails S(m,n) = GHZ(m,n)", "GHZ(0,2) matches the hand-built state"}, 1, why);
  const SuiteCase* e = find_case(r, "m = n entails S(m,n) = GHZ(m,n)");
  return {ok, "Valid over m in 0..10" + (e ? " (" + e->note + ")" : "") + ", GHZ(0,2) within 1e-9" +
                  (ok ? "" : "; " + why)};
}

Outcome qft() {
  const Stopwatch w;
  const SuiteReport r = qft_suite(options(1));
  const double t = w.seconds();
  std::string why;
  bool ok = true;
  for (int l = 1; l <= 5; ++l) ok = ok && cases_ok(r, {"l = " + std::to_string(l)}, std::size_t{1} << l, why);
  return {ok && t < kQftSeconds,
          "l = 1..5, 62 bit arrays against the DFT, " + secs(t) + " (limit " + secs(kQftSeconds) + ")" +
              (ok ? "" : "; " + why)};
}

Outcome teleport() {
  std::size_t checks = 0, passed = 0;
  for (bool x : {false, true})
    for (bool y : {false, true})
      for (const auto& c : teleport_verify(x, y, {}, kTol)) {
        ++checks;
        passed += c.ok ? 1 : 0;
      }
  const std::array<TeleportOptions, 3> mutations{TeleportOptions{false, true, true}, TeleportOptions{true, false, true},
                                                  TeleportOptions{true, true, false}};
  std::string counts;
  bool caught = true;
  for (const auto& m : mutations) {
    std::size_t bad = 0;
    for (bool x : {false, true})
      for (bool y : {false, true})
        for (const auto& c : teleport_verify(x, y, m, kTol)) bad += c.ok ? 0 : 1;
    caught = caught && bad > 0;
    counts += (counts.empty() ? "" : "/") + std::to_string(bad);
  }
  return {checks == 48 && passed == 48 && caught,
          std::to_string(passed) + "/" + std::to_string(checks) + " branch checks, mutations (X/Z/phase) fail " +
              counts + " checks"};
}

Outcome zy_bloch() {
  const SuiteReport zy = zy_suite(options(100));
  const SuiteReport bl = bloch_suite(options(100));
  std::string why;
  const bool ok = cases_ok(zy, {"Haar unitaries"}, 100, why) && cases_ok(bl, {"random states"}, 100, why);
  return {ok && zy.ok() && bl.ok(),
          "100 Haar unitaries rebuilt, 100 Bloch states solved" + (ok ? "" : "; " + why) + failures(zy) +
              failures(bl)};
}

Outcome nocloning() {
  const SuiteReport r = nocloning_suite(options(100));
  std::string why;
  const bool ok = cases_ok(r, {"Haar unitaries"}, 100, why) &&
                  cases_ok(r, {"the raw formula is Unknown (sampled)"}, 1, why);
  const SuiteCase* h = find_case(r, "Haar unitaries");
  return {ok, "witnesses for 100 Haar unitaries" + (h ? " (" + h->note + ")" : "") +
                  ", raw formula Unknown(sampled)" + (ok ? "" : "; " + why)};
}

Outcome rewrite() {
  const SuiteReport r = rewrite_suite(options(500));
  std::string why;
  const bool ok = cases_ok(r, {"normal form evaluates like the term", "ground equality agrees with compare"}, 500, why) &&
                  cases_ok(r, {"Coefficient Addition", "Self Outer-Product", "Identity", "Matrix Representation"}, 0,
                           why);
  return {ok, "500 normal forms, 500 ground equalities, 4 named rules" + (ok ? "" : "; " + why)};
}

Outcome deduction() {
  const SuiteReport r = deduction_suite(options(50));
  std::string why;
  const bool ok = cases_ok(r, {"deduction theorem"}, 50, why);
  const SuiteCase* c = find_case(r, "deduction theorem");
  return {ok, "50 queries agree" + (c && !c->note.empty() ? " (" + c->note + ")" : "") + (ok ? "" : "; " + why)};
}

struct Golden {
  const char* name;
  int exit_code;
  const char* flags;
};

const Golden kGoldens[] = {
    {"example1", 0, ""},        {"example2", 0, ""},
    {"example3", 0, ""},        {"generic_entail", 0, ""},
    {"address_arithmetic", 1, "--int-range -20..40"},
    {"address_guarded", 0, "--int-range -20..40"},
    {"theories", 2, ""},        {"forall_unitary", 1, ""},
    {"definitions", 0, ""},     {"equational", 0, ""},
    {"order", 2, ""},           {"axioms", 0, ""},
    {"ghz", 0, "--int-range -2..12"},
    {"qft", 0, ""},             {"nocloning", 2, ""},
    {"projection", 0, ""},      {"parse_error", 3, ""},
};

std::pair<std::string, int> capture(const std::string& command) {
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {"", -1};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome goldens(const std::string& solcheck, const std::string& dir) {
  std::string why;
  std::array<int, 4> seen{};
  for (const auto& g : kGoldens) {
    const std::string cmd = "'" + solcheck + "' --seed 1 " + g.flags + " --json '" + dir + "/" + g.name + ".sol'";
    const auto first = capture(cmd);
    const auto second = capture(cmd);
    const std::string expected = slurp(dir + "/" + g.name + ".json");
    if (first.second != g.exit_code) why += std::string(g.name) + " exit " + std::to_string(first.second) + "; ";
    if (first.first != second.first) why += std::string(g.name) + " not stable across runs; ";
    if (expected.empty() || first.first != expected) why += std::string(g.name) + " differs from frozen JSON; ";
    if (first.second >= 0 && first.second < 4) ++seen[static_cast<std::size_t>(first.second)];
  }
  for (int code = 0; code < 4; ++code)
    if (!seen[static_cast<std::size_t>(code)]) why += "exit code " + std::to_string(code) + " never exercised; ";
  return {why.empty(), std::to_string(std::size(kGoldens)) + " scripts byte-stable, exit codes 0/1/2/3 as pinned" +
                           (why.empty() ? "" : "; " + why)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <solcheck> <golden-dir>\n";
    return 2;
  }
  const std::string solcheck = argv[1], dir = argv[2];
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"substitution lemmas", substitution},
      {"signing soundness", signing},
      {"axiom suite", axioms},
      {"address arithmetic entailment", address_arithmetic},
      {"GHZ entailment", ghz},
      {"QFT recursion", qft},
      {"teleportation", teleport},
      {"Z-Y decomposition and Bloch angles", zy_bloch},
      {"no-cloning", nocloning},
      {"rewrite engine", rewrite},
      {"deduction theorem", deduction},
      {"CLI goldens", [&] { return goldens(solcheck, dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << "\n";
    if (i + 1 == 4) std::cout << "  note: " << address_guarded() << "\n";
    std::cout.flush();
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass\n";
  return failed ? 1 : 0;
}

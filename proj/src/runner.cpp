#include "sol/runner.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sol/gates.hpp"
#include "sol/rewrite.hpp"

namespace sol {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxEntries = 256;

/// Rounded to 12 decimals so that last-bit noise does not reach the report.
double clean(double d) {
  double r = std::round(d * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

std::string format_complex(Complex c) {
  const double re = clean(c.real()), im = clean(c.imag());
  if (im == 0.0) return format_real(re);
  std::string s = re == 0.0 ? "" : format_real(re);
  if (im < 0)
    s += "-";
  else if (!s.empty())
    s += "+";
  return s + format_real(std::abs(im)) + "i";
}

json matrix_json(const Matrix& m) {
  json j;
  j["rows"] = to_string(m.rows);
  j["cols"] = to_string(m.cols);
  j["shape"] = {m.data.rows(), m.data.cols()};
  json entries = json::array();
  bool truncated = false;
  for (Eigen::Index r = 0; r < m.data.rows(); ++r)
    for (Eigen::Index c = 0; c < m.data.cols(); ++c) {
      const Complex z = m.data(r, c);
      if (clean(z.real()) == 0.0 && clean(z.imag()) == 0.0) continue;
      if (entries.size() == kMaxEntries) {
        truncated = true;
        continue;
      }
      entries.push_back({r, c, format_complex(z)});
    }
  j["nonzero"] = entries;
  if (truncated) j["truncated"] = true;
  return j;
}

json witness_json(const Context& ctx) {
  json j;
  j["state"] = to_string(ctx.sigma);
  json eta = json::object();
  for (const auto& [name, m] : ctx.eta) {
    json cells = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(format_complex(m(r, c)));
      cells.push_back(row);
    }
    eta[name] = cells;
  }
  if (!eta.empty()) j["operators"] = eta;
  return j;
}

std::string verdict_string(Verdict v) { return to_string(v); }

class Runner {
 public:
  Runner(const Script& s, const Config& cfg) : script_(s), cfg_(cfg), qs_(standard_structure(cfg)) {}

  Report run() {
    Report r;
    r.config = cfg_;
    if (!script_.int_quantum_vars.empty()) {
      std::string names;
      for (const auto& n : script_.int_quantum_vars) names += (names.empty() ? "" : ", ") + n;
      r.notes.push_back("Int-valued quantum variables (" + names + ") have dimension " +
                        std::to_string(cfg_.int_range.size()) + ", the size of the Int range " +
                        std::to_string(cfg_.int_range.lo) + ".." + std::to_string(cfg_.int_range.hi));
    }
    const auto start = std::chrono::steady_clock::now();
    for (const auto& item : script_.items) {
      if (!item.is_directive()) {
        declare(item, r);
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      DirectiveResult d;
      d.kind = to_string(item.kind);
      d.line = item.line;
      d.text = print_item(item);
      json detail = json::object();
      try {
        directive(item, d, detail);
      } catch (const Error& e) {
        d.verdict = "error";
        d.summary = e.what();
        detail = json::object();
        detail["error"] = e.what();
      }
      d.detail = detail.dump();
      d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      r.directives.push_back(std::move(d));
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::vector<std::string> verdicts;
    for (const auto& d : r.directives) verdicts.push_back(d.verdict);
    r.exit_code = exit_code_for(verdicts);
    r.verdict = overall(r.exit_code);
    return r;
  }

 private:
  static std::string overall(int code) {
    switch (code) {
      case 0:
        return "pass";
      case 1:
        return "fail";
      case 2:
        return "unknown";
      default:
        return "error";
    }
  }

  /// Declarations that change the run state; the rest were handled by the parser.
  void declare(const ScriptItem& item, Report& r) {
    using K = ScriptItem::Kind;
    if (item.kind == K::Range) {
      ranges_[item.name] = item.range;
      return;
    }
    if (item.kind != K::Set) return;
    try {
      const Value v = eval_expr(qs_.classical, fixed_, *item.value);
      if (item.indices.empty()) {
        if (type_of(v) != item.type.value && !(item.type.value == BasicType::Complex && type_of(v) == BasicType::Int))
          throw TypeError("'" + item.name + "' has type " + to_string(item.type.value));
        fixed_ = fixed_.updated(item.name, item.type.value == BasicType::Complex ? Value{as_complex(v)} : v);
      } else {
        std::vector<std::int64_t> key;
        for (const auto& e : item.indices) key.push_back(as_int(eval_expr(qs_.classical, fixed_, e)));
        if (!fixed_.arrays.count(item.name)) {
          ArrayValue av;
          av.fallback = default_value(item.type.value);
          fixed_.arrays[item.name] = av;
        }
        fixed_ = fixed_.updated_cell(item.name, key, v);
      }
    } catch (const Error& e) {
      DirectiveResult d;
      d.kind = to_string(item.kind);
      d.line = item.line;
      d.text = print_item(item);
      d.verdict = "error";
      d.summary = e.what();
      json detail;
      detail["error"] = e.what();
      d.detail = detail.dump();
      r.directives.push_back(std::move(d));
    }
  }

  static Value default_value(BasicType t) {
    switch (t) {
      case BasicType::Bool:
        return Value{false};
      case BasicType::Int:
        return Value{std::int64_t{0}};
      case BasicType::Complex:
        return Value{Complex{}};
    }
    return Value{false};
  }

  EntailmentQuery query(std::vector<Formula> sigma, std::vector<SolFormula> gamma, SolFormula goal) const {
    EntailmentQuery q{std::move(sigma), std::move(gamma), std::move(goal), ranges_, fixed_, {}, cfg_.state_budget};
    q.sampling.samples = cfg_.samples;
    q.sampling.seed = cfg_.seed;
    return q;
  }

  void check(const EntailmentQuery& q, DirectiveResult& d, json& detail) const {
    const CheckResult res = check_entailment(qs_, q);
    d.verdict = verdict_string(res.verdict);
    d.summary = res.reason;
    detail["reason"] = res.reason;
    detail["exact"] = res.exact;
    detail["states"] = res.stats.states;
    detail["satisfying"] = res.stats.satisfying;
    detail["valuations"] = res.stats.valuations;
    if (res.witness) {
      detail["witness"] = witness_json(*res.witness);
      d.summary += " at " + to_string(res.witness->sigma);
    }
    if (!res.diagnostics.empty()) detail["diagnostics"] = res.diagnostics;
  }

  void directive(const ScriptItem& item, DirectiveResult& d, json& detail) {
    using K = ScriptItem::Kind;
    switch (item.kind) {
      case K::Assume:
        assumptions_.push_back(item.sigma.at(0));
        d.verdict = "ok";
        d.summary = std::to_string(assumptions_.size()) + " assumption(s)";
        return;
      case K::Assert:
        check(query(assumptions_, {}, *item.sol), d, detail);
        return;
      case K::Entail: {
        std::vector<Formula> sigma = assumptions_;
        sigma.insert(sigma.end(), item.sigma.begin(), item.sigma.end());
        check(query(sigma, item.gamma, *item.sol), d, detail);
        return;
      }
      case K::Eval:
        if (item.op) {
          require_closed(*item.op);
          const Matrix m = evaluate(qs_, Context{fixed_, {}}, *item.op);
          detail["matrix"] = matrix_json(m);
          d.verdict = "ok";
          d.summary = std::to_string(m.data.rows()) + "x" + std::to_string(m.data.cols()) + " on " +
                      to_string(m.rows) + " -> " + to_string(m.cols);
        } else {
          if (!free_operator_vars(*item.sol).empty())
            throw EvalError("eval of a formula with free operator variables; use assert");
          SatTrace trace;
          SamplingOptions so{cfg_.samples, cfg_.seed};
          const Truth t = sat_sol(qs_, Context{fixed_, {}}, *item.sol, so, &trace);
          detail["value"] = t.value;
          detail["certain"] = t.certain;
          if (!trace.diagnostics.empty()) detail["diagnostics"] = trace.diagnostics;
          d.verdict = "ok";
          d.summary = std::string(t.value ? "true" : "false") + (t.certain ? "" : " (sampled)");
        }
        return;
      case K::Normalize: {
        require_closed(*item.op);
        const NormalForm nf = normalize(qs_, Context{fixed_, {}}, *item.op);
        const std::string s = to_string(nf, qs_.range());
        detail["normal_form"] = s;
        detail["terms"] = nf.terms.size();
        d.verdict = "ok";
        d.summary = s;
        return;
      }
      case K::Sign:
        try {
          const GroundSignature g = check_signing(qs_, fixed_, *item.op);
          detail["signature"] = to_string(g);
          d.verdict = "ok";
          d.summary = to_string(g);
        } catch (const SigningError& e) {
          detail["rule"] = e.rule();
          detail["error"] = e.what();
          d.verdict = "fail";
          d.summary = e.what();
        }
        return;
      case K::Suite: {
        SuiteOptions so;
        so.seed = cfg_.seed;
        so.tol = cfg_.tol;
        const SuiteReport rep = run_suite(item.name, so);
        json cases = json::array();
        for (const auto& c : rep.cases) {
          json jc;
          jc["name"] = c.name;
          jc["trials"] = c.trials;
          jc["passed"] = c.passed;
          jc["ok"] = c.ok();
          if (!c.counterexample.empty()) jc["counterexample"] = c.counterexample;
          if (!c.note.empty()) jc["note"] = c.note;
          cases.push_back(jc);
        }
        detail["checks"] = rep.checks();
        detail["cases"] = cases;
        d.verdict = rep.ok() ? "pass" : "fail";
        std::size_t passed = 0;
        for (const auto& c : rep.cases) passed += c.ok() ? 1 : 0;
        d.summary = std::to_string(passed) + "/" + std::to_string(rep.cases.size()) + " cases, " +
                    std::to_string(rep.checks()) + " checks";
        return;
      }
      default:
        return;
    }
  }

  static void require_closed(const FormalOp& a) {
    const auto ops = free_operator_vars(a);
    if (!ops.empty()) throw EvalError("operator variable '" + ops.begin()->first + "' has no value here");
  }

  const Script& script_;
  Config cfg_;
  QuantumStructure qs_;
  State fixed_;
  std::map<std::string, IntRange> ranges_;
  std::vector<Formula> assumptions_;
};

json config_json(const Config& c) {
  json j;
  j["int_range"] = {c.int_range.lo, c.int_range.hi};
  j["tol"] = c.tol;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["max_dim"] = c.max_dim;
  return j;
}

}  // namespace

int exit_code_for(const std::vector<std::string>& verdicts) {
  bool refuted = false, unknown = false;
  for (const auto& v : verdicts) {
    if (v == "error") return 3;
    if (v == "Refuted" || v == "fail") refuted = true;
    if (v == "Unknown") unknown = true;
  }
  if (refuted) return 1;
  return unknown ? 2 : 0;
}

Report run(const Script& script, const Config& config) { return Runner(script, config).run(); }

Report run_text(const std::string& text, const Config& config) {
  Script s;
  try {
    s = parse_script(text);
  } catch (const ParseError& e) {
    Report r;
    r.config = config;
    r.error = e.what();
    r.verdict = "error";
    r.exit_code = 3;
    return r;
  }
  return run(s, config);
}

std::string report_json(const Report& r, bool timing) {
  json j;
  j["config"] = config_json(r.config);
  json ds = json::array();
  for (const auto& d : r.directives) {
    json jd;
    jd["kind"] = d.kind;
    jd["line"] = d.line;
    jd["text"] = d.text;
    jd["verdict"] = d.verdict;
    jd["detail"] = json::parse(d.detail);
    if (timing) jd["seconds"] = d.seconds;
    ds.push_back(jd);
  }
  j["directives"] = ds;
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.error.empty()) j["error"] = r.error;
  j["verdict"] = r.verdict;
  j["exit_code"] = r.exit_code;
  if (timing) j["timing"] = {{"total_seconds", r.seconds}};
  return j.dump(2) + "\n";
}

std::string report_text(const Report& r, bool timing) {
  std::ostringstream out;
  if (!r.error.empty()) out << "error: " << r.error << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  for (const auto& d : r.directives) {
    out << "line " << d.line << ": " << d.kind << " " << d.verdict;
    if (!d.summary.empty()) {
      std::string s = d.summary;
      for (std::size_t at = s.find('\n'); at != std::string::npos; at = s.find('\n', at)) s.replace(at, 1, "; ");
      out << ": " << s;
    }
    if (timing) out << " [" << d.seconds << "s]";
    out << "\n";
  }
  out << "result: " << r.verdict << " (exit " << r.exit_code << ")";
  if (timing) out << " [" << r.seconds << "s]";
  out << "\n";
  return out.str();
}

}  // namespace sol

#pragma once

#include <string>
#include <vector>

#include "sol/script.hpp"

namespace sol {

/// Result of one directive. `verdict` is one of Valid, Refuted, Unknown (assert,
/// entail), pass, fail (suite, sign), ok (eval, normalize, sign) or error.
struct DirectiveResult {
  std::string kind;
  int line = 0;
  std::string text;
  std::string verdict;
  /// Serialised JSON object with kind-specific fields.
  std::string detail;
  /// One-line summary for the human report.
  std::string summary;
  double seconds = 0;
};

struct Report {
  Config config;
  std::vector<DirectiveResult> directives;
  std::vector<std::string> notes;
  /// Parse error, when the script did not parse.
  std::string error;
  std::string verdict;
  int exit_code = 0;
  double seconds = 0;
};

/// Execute the directives of a parsed script in order.
Report run(const Script& script, const Config& config);
/// Parse and execute; a parse error gives exit code 3.
Report run_text(const std::string& text, const Config& config);

/// JSON report, two-space indented; timing fields only when `timing`.
std::string report_json(const Report& r, bool timing = false);
/// One line per directive and a final verdict line.
std::string report_text(const Report& r, bool timing = false);

/// 3 if any error, else 1 if any Refuted or fail, else 2 if any Unknown, else 0.
int exit_code_for(const std::vector<std::string>& verdicts);

}  // namespace sol

// solcheck: run a .sol script and report one line per directive, or JSON.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sol/runner.hpp"

namespace {

sol::IntRange parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--int-range", "expected lo..hi");
  try {
    sol::IntRange r{std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
    if (r.lo > r.hi) throw CLI::ValidationError("--int-range", "lo exceeds hi");
    return r;
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--int-range", "expected integers in lo..hi");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check a symbolic operator logic script"};
  std::string path;
  std::string range = "-8..8";
  sol::Config cfg;
  bool as_json = false, timing = false;
  app.add_option("script", path, "script file, or - for standard input")->required();
  app.add_option("--int-range", range, "realised Int domain lo..hi")->capture_default_str();
  app.add_option("--tol", cfg.tol, "numeric tolerance")->capture_default_str();
  app.add_option("--samples", cfg.samples, "random operators per operator variable")->capture_default_str();
  app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  app.add_option("--max-dim", cfg.max_dim, "largest matrix dimension evaluated")->capture_default_str();
  app.add_flag("--json", as_json, "print the JSON report");
  app.add_flag("--timing", timing, "include timings");
  try {
    app.parse(argc, argv);
    cfg.int_range = parse_range(range);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  std::string text;
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "solcheck: cannot read " << path << "\n";
      return 3;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  const sol::Report r = sol::run_text(text, cfg);
  if (as_json)
    std::cout << sol::report_json(r, timing);
  else
    std::cout << sol::report_text(r, timing);
  return r.exit_code;
}

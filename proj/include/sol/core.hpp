#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sol {

using Complex = std::complex<double>;

/// Basic classical types. Bool and Int are enumerable (Int through a bounded
/// range); Complex is not.
enum class BasicType : std::uint8_t { Bool, Int, Complex };

std::string to_string(BasicType t);
inline bool is_enumerable(BasicType t) { return t != BasicType::Complex; }
inline bool is_numeric(BasicType t) { return t != BasicType::Bool; }

/// Closed interval of integers realising the domain of Int.
struct IntRange {
  std::int64_t lo = -64;
  std::int64_t hi = 64;

  bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
  std::int64_t size() const { return hi - lo + 1; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

using Value = std::variant<bool, std::int64_t, Complex>;

BasicType type_of(const Value& v);
bool as_bool(const Value& v);
std::int64_t as_int(const Value& v);
/// Numeric promotion Int -> Complex; Bool is rejected.
Complex as_complex(const Value& v);
std::string to_string(const Value& v);
/// Shortest round-tripping decimal form; always contains a '.' or exponent.
std::string format_real(double d);
/// Equality of values; complex comparisons use the absolute tolerance `tol`.
bool values_equal(const Value& a, const Value& b, double tol);

/// Evaluation-wide knobs shared by every layer.
struct Config {
  IntRange int_range{};
  double tol = 1e-9;
  std::size_t samples = 16;
  std::uint64_t seed = 1;
  std::size_t max_dim = 4096;
  std::uint64_t state_budget = 20'000'000;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

/// Quantification over a non-enumerable domain.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Raised by the signing judgement; `rule()` names the failing rule.
class SigningError : public Error {
 public:
  SigningError(std::string rule, const std::string& what)
      : Error(rule + ": " + what), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace sol

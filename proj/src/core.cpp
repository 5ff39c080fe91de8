#include "sol/core.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace sol {

std::string to_string(BasicType t) {
  switch (t) {
    case BasicType::Bool:
      return "Bool";
    case BasicType::Int:
      return "Int";
    case BasicType::Complex:
      return "C";
  }
  return "?";
}

BasicType type_of(const Value& v) {
  switch (v.index()) {
    case 0:
      return BasicType::Bool;
    case 1:
      return BasicType::Int;
    default:
      return BasicType::Complex;
  }
}

bool as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw TypeError("expected a Bool value, got " + to_string(v));
}

std::int64_t as_int(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw TypeError("expected an Int value, got " + to_string(v));
}

Complex as_complex(const Value& v) {
  if (const auto* c = std::get_if<Complex>(&v)) return *c;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return Complex(static_cast<double>(*i), 0.0);
  throw TypeError("expected a numeric value, got " + to_string(v));
}

namespace {

std::string format_double(double d) {
  if (d == 0.0) return "0.0";  // also normalises -0.0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s(buf);
  // keep the shortest representation that reads back identically
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, d);
    if (std::strtod(shorter, nullptr) == d) {
      s = shorter;
      break;
    }
  }
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string format_real(double d) { return format_double(d); }

std::string to_string(const Value& v) {
  switch (v.index()) {
    case 0:
      return std::get<bool>(v) ? "true" : "false";
    case 1:
      return std::to_string(std::get<std::int64_t>(v));
    default: {
      const Complex c = std::get<Complex>(v);
      if (c.imag() == 0.0) return format_double(c.real());
      return "complex(" + format_double(c.real()) + ", " + format_double(c.imag()) + ")";
    }
  }
}

bool values_equal(const Value& a, const Value& b, double tol) {
  if (a.index() == 0 || b.index() == 0) {
    if (a.index() != b.index()) throw TypeError("cannot compare Bool with a numeric value");
    return std::get<bool>(a) == std::get<bool>(b);
  }
  if (a.index() == 1 && b.index() == 1) return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
  return std::abs(as_complex(a) - as_complex(b)) <= tol;
}

}  // namespace sol

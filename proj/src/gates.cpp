#include "sol/gates.hpp"

#include <cmath>
#include <numbers>

namespace sol {

namespace {

const Complex kI(0.0, 1.0);

CMatrix make2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

std::size_t side_dim(const std::vector<GroundRef>& gs, const IntRange& range) { return dim_of(gs, range); }

std::optional<std::string> same_registers(const std::vector<Value>&, const GroundSignature& g) {
  if (same_register_set(g.dom, g.cod)) return std::nullopt;
  return "domain " + to_string(g.dom) + " and codomain " + to_string(g.cod) + " must hold the same registers";
}

ConstInterpretation fixed_bool(const std::string& name, std::size_t qubits, CMatrix m) {
  QuantumType t{std::vector<BasicType>(qubits, BasicType::Bool), std::vector<BasicType>(qubits, BasicType::Bool)};
  auto decl = std::make_shared<const OperatorConstDecl>(OperatorConstDecl{name, {}, t, ConstShape::Fixed});
  return {decl, [m](const std::vector<Value>&, const GroundSignature&, const IntRange&) { return m; }, {}};
}

ConstInterpretation rotation_gate(char axis) {
  const std::string name = std::string("R_") + axis;
  QuantumType t{{BasicType::Bool}, {BasicType::Bool}};
  auto decl =
      std::make_shared<const OperatorConstDecl>(OperatorConstDecl{name, {BasicType::Complex}, t, ConstShape::Fixed});
  return {decl,
          [axis](const std::vector<Value>& p, const GroundSignature&, const IntRange&) {
            return rotation(axis, as_complex(p.at(0)));
          },
          {}};
}

std::vector<ConstInterpretation> make_gates() {
  std::vector<ConstInterpretation> out;
  {
    auto decl = std::make_shared<const OperatorConstDecl>(OperatorConstDecl{"I", {}, {}, ConstShape::Square});
    out.push_back({decl,
                   [](const std::vector<Value>&, const GroundSignature& g, const IntRange& r) -> CMatrix {
                     const auto n = static_cast<Eigen::Index>(side_dim(g.dom, r));
                     // dom and cod are the same set but possibly in a different order
                     CMatrix id = CMatrix::Identity(n, n);
                     if (g.dom == g.cod) return id;
                     Matrix m{id, g.dom, g.dom};
                     return with_col_order(m, g.cod, r).data;
                   },
                   same_registers});
  }
  {
    auto decl = std::make_shared<const OperatorConstDecl>(OperatorConstDecl{"Zero", {}, {}, ConstShape::Any});
    out.push_back({decl,
                   [](const std::vector<Value>&, const GroundSignature& g, const IntRange& r) -> CMatrix {
                     return CMatrix::Zero(static_cast<Eigen::Index>(side_dim(g.dom, r)),
                                          static_cast<Eigen::Index>(side_dim(g.cod, r)));
                   },
                   {}});
  }
  out.push_back(fixed_bool("X", 1, pauli_x()));
  out.push_back(fixed_bool("Y", 1, pauli_y()));
  out.push_back(fixed_bool("Z", 1, pauli_z()));
  out.push_back(fixed_bool("H", 1, hadamard()));
  out.push_back(fixed_bool("CNOT", 2, cnot_matrix()));
  {
    auto decl = std::make_shared<const OperatorConstDecl>(OperatorConstDecl{"Ph", {}, {}, ConstShape::Square});
    out.push_back({decl,
                   [](const std::vector<Value>&, const GroundSignature& g, const IntRange& r) -> CMatrix {
                     const auto n = static_cast<Eigen::Index>(side_dim(g.dom, r));
                     Matrix m{-CMatrix::Identity(n, n), g.dom, g.dom};
                     return with_col_order(m, g.cod, r).data;
                   },
                   same_registers});
  }
  out.push_back(rotation_gate('x'));
  out.push_back(rotation_gate('y'));
  out.push_back(rotation_gate('z'));
  {
    QuantumType t{{BasicType::Bool}, {BasicType::Bool}};
    auto decl =
        std::make_shared<const OperatorConstDecl>(OperatorConstDecl{"QFT", {BasicType::Int}, t, ConstShape::Square});
    out.push_back({decl,
                   [](const std::vector<Value>& p, const GroundSignature&, const IntRange&) {
                     return dft_matrix(static_cast<int>(as_int(p.at(0))));
                   },
                   [](const std::vector<Value>& p, const GroundSignature& g) -> std::optional<std::string> {
                     const auto n = as_int(p.at(0));
                     if (n < 1 || n > 12) return "size " + std::to_string(n) + " is outside 1..12";
                     if (static_cast<std::size_t>(n) != g.dom.size() || g.dom != g.cod)
                       return "QFT(" + std::to_string(n) + ") must act on " + std::to_string(n) +
                              " qubit(s) in the same order on both sides";
                     return std::nullopt;
                   }});
  }
  return out;
}

}  // namespace

CMatrix pauli_x() { return make2(0, 1, 1, 0); }
CMatrix pauli_y() { return make2(0, -kI, kI, 0); }
CMatrix pauli_z() { return make2(1, 0, 0, -1); }
CMatrix hadamard() { return make2(1, 1, 1, -1) / std::sqrt(2.0); }

CMatrix cnot_matrix() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

CMatrix rotation(char axis, Complex theta) {
  CMatrix p;
  switch (axis) {
    case 'x':
      p = pauli_x();
      break;
    case 'y':
      p = pauli_y();
      break;
    case 'z':
      p = pauli_z();
      break;
    default:
      throw EvalError(std::string("unknown rotation axis '") + axis + "'");
  }
  return std::cos(theta / 2.0) * CMatrix::Identity(2, 2) - kI * std::sin(theta / 2.0) * p;
}

CMatrix dft_matrix(int n) {
  if (n < 0 || n > 20) throw EvalError("DFT size out of range");
  const auto dim = Eigen::Index{1} << n;
  CMatrix m(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = 0; k < dim; ++k) {
      const auto e = static_cast<double>((j * k) % dim);
      m(j, k) = std::polar(scale, 2.0 * std::numbers::pi * e / static_cast<double>(dim));
    }
  return m;
}

const std::vector<ConstInterpretation>& builtin_gates() {
  static const std::vector<ConstInterpretation> gates = make_gates();
  return gates;
}

OpConstPtr builtin_constant(const std::string& name) {
  for (const auto& g : builtin_gates())
    if (g.decl->name == name) return g.decl;
  throw EvalError("unknown built-in constant '" + name + "'");
}

QuantumStructure standard_structure(const Config& cfg) {
  QuantumStructure qs;
  qs.classical.int_range = cfg.int_range;
  qs.classical.tol = cfg.tol;
  qs.max_dim = cfg.max_dim;
  for (const auto& g : builtin_gates()) qs.define(g);
  return qs;
}

}  // namespace sol

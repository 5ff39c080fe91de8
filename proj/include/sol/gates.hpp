#pragma once

#include <string>
#include <vector>

#include "sol/semantics.hpp"

namespace sol {

// Plain matrices of the standard gates.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix hadamard();
CMatrix cnot_matrix();
/// cos(θ/2) I - i sin(θ/2) P for P = X, Y or Z (axis 'x', 'y', 'z').
CMatrix rotation(char axis, Complex theta);
/// (1/√N) [ω^{jk}] with ω = e^{2πi/N}, N = 2^n.
CMatrix dft_matrix(int n);

/// I, 0, X, Y, Z, H, CNOT, Ph, R_x, R_y, R_z and QFT with their interpretations.
const std::vector<ConstInterpretation>& builtin_gates();
/// Declaration of a built-in constant; throws for unknown names.
OpConstPtr builtin_constant(const std::string& name);

/// A quantum structure over the configured classical structure holding the
/// built-in gates.
QuantumStructure standard_structure(const Config& cfg);

}  // namespace sol

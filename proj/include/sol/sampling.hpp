#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sol/matrix.hpp"

namespace sol {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts, scaled by 1/√2.
CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
/// Haar-distributed unitary: QR of a complex Gaussian with the phases of R's diagonal removed.
CMatrix haar_unitary(Eigen::Index n, Rng& rng);
CMatrix random_unit_vector(Eigen::Index n, Rng& rng);
/// G G† normalised to unit trace.
CMatrix random_density(Eigen::Index n, Rng& rng);
CMatrix random_hermitian(Eigen::Index n, Rng& rng);
/// G G†, positive semidefinite.
CMatrix random_psd(Eigen::Index n, Rng& rng);

/// Deterministic seed derived from a base seed, a name and a shape.
std::uint64_t mix_seed(std::uint64_t seed, const std::string& name, std::uint64_t a = 0, std::uint64_t b = 0);

/// Fixed matrices of the given shape tried before random ones: zero,
/// identity, cyclic shift, clock, DFT, Pauli Y and a rank-1 projector for
/// square shapes; zero, a basis element and a uniform unit entry pattern otherwise.
std::vector<CMatrix> adversarial_samples(Eigen::Index rows, Eigen::Index cols);

/// The sample set standing in for all operators of one shape: the adversarial
/// matrices followed by `count` seeded random ones (Haar unitaries alternating
/// with Gaussians for square shapes, unit vectors alternating with Gaussians otherwise).
std::vector<CMatrix> operator_samples(Eigen::Index rows, Eigen::Index cols, std::size_t count, std::uint64_t seed);

}  // namespace sol

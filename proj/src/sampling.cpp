#include "sol/sampling.hpp"

#include <cmath>
#include <numbers>

namespace sol {

CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = n(rng);
      const double im = n(rng);
      m(i, j) = Complex(re * s, im * s);
    }
  return m;
}

CMatrix haar_unitary(Eigen::Index n, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    const Complex phase = a > 0 ? r(k, k) / a : Complex(1.0);
    q.col(k) *= phase;
  }
  return q;
}

CMatrix random_unit_vector(Eigen::Index n, Rng& rng) {
  CMatrix v = gaussian_matrix(n, 1, rng);
  return v / v.norm();
}

CMatrix random_density(Eigen::Index n, Rng& rng) {
  const CMatrix p = random_psd(n, rng);
  return p / p.trace();
}

CMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, n, rng);
  return (g + g.adjoint()) / 2.0;
}

CMatrix random_psd(Eigen::Index n, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, n, rng);
  return g * g.adjoint();
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& name, std::uint64_t a, std::uint64_t b) {
  // splitmix64 steps over the inputs
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  for (unsigned char c : name) h = mix(h ^ c);
  h = mix(h ^ a);
  return mix(h ^ b);
}

std::vector<CMatrix> adversarial_samples(Eigen::Index rows, Eigen::Index cols) {
  std::vector<CMatrix> out;
  out.push_back(CMatrix::Zero(rows, cols));
  if (rows == cols) {
    const Eigen::Index n = rows;
    out.push_back(CMatrix::Identity(n, n));
    if (n == 1) {
      out.push_back(CMatrix::Constant(1, 1, Complex(-1.0)));
      out.push_back(CMatrix::Constant(1, 1, Complex(0.0, 1.0)));
      return out;
    }
    CMatrix shift = CMatrix::Zero(n, n);
    CMatrix clock = CMatrix::Zero(n, n);
    CMatrix dft(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      shift((k + 1) % n, k) = 1.0;
      clock(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
      for (Eigen::Index j = 0; j < n; ++j)
        dft(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                               2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n));
    }
    out.push_back(shift);
    out.push_back(clock);
    out.push_back(dft);
    if (n == 2) {
      CMatrix y(2, 2);
      y << 0, Complex(0, -1), Complex(0, 1), 0;
      out.push_back(y);
    }
    out.push_back(CMatrix::Constant(n, n, Complex(1.0 / static_cast<double>(n))));
    return out;
  }
  CMatrix e = CMatrix::Zero(rows, cols);
  e(0, 0) = 1.0;
  out.push_back(e);
  out.push_back(CMatrix::Constant(rows, cols, Complex(1.0 / std::sqrt(static_cast<double>(rows * cols)))));
  return out;
}

std::vector<CMatrix> operator_samples(Eigen::Index rows, Eigen::Index cols, std::size_t count, std::uint64_t seed) {
  std::vector<CMatrix> out = adversarial_samples(rows, cols);
  Rng rng(seed);
  const bool vector_shape = rows == 1 || cols == 1;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 2 == 0 && rows == cols) {
      out.push_back(haar_unitary(rows, rng));
    } else if (i % 2 == 0 && vector_shape) {
      const CMatrix v = random_unit_vector(rows * cols, rng);
      out.push_back(rows == 1 ? CMatrix(v.transpose()) : v);
    } else {
      out.push_back(gaussian_matrix(rows, cols, rng));
    }
  }
  return out;
}

}  // namespace sol

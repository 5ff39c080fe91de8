#include "sol/matrix.hpp"

#include <algorithm>

namespace sol {

bool same_register_set(const std::vector<GroundRef>& a, const std::vector<GroundRef>& b) {
  if (a.size() != b.size()) return false;
  auto x = a;
  auto y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return std::equal(x.begin(), x.end(), y.begin());
}

bool overlaps(const std::vector<GroundRef>& a, const std::vector<GroundRef>& b) {
  for (const auto& g : a)
    if (std::find(b.begin(), b.end(), g) != b.end()) return true;
  return false;
}

std::vector<std::size_t> basis_permutation(const std::vector<GroundRef>& from, const std::vector<GroundRef>& to,
                                           const IntRange& range) {
  const std::size_t n = to.size();
  if (from.size() != n) throw EvalError("register permutation between lists of different length");
  std::vector<std::size_t> where(n);  // position in `from` of to[i]
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::find(from.begin(), from.end(), to[i]);
    if (it == from.end()) throw EvalError("register " + to_string(to[i]) + " missing from " + to_string(from));
    where[i] = static_cast<std::size_t>(it - from.begin());
  }
  std::vector<std::size_t> radix_from(n), stride_from(n);
  for (std::size_t i = 0; i < n; ++i) radix_from[i] = dim_of_type(from[i].value_type(), range);
  std::size_t s = 1;
  for (std::size_t i = n; i-- > 0;) {
    stride_from[i] = s;
    s *= radix_from[i];
  }
  const std::size_t total = s;
  std::vector<std::size_t> radix_to(n);
  for (std::size_t i = 0; i < n; ++i) radix_to[i] = radix_from[where[i]];

  std::vector<std::size_t> out(total);
  std::vector<std::size_t> digits(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < n; ++i) src += digits[i] * stride_from[where[i]];
    out[idx] = src;
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < radix_to[i]) break;
      digits[i] = 0;
    }
  }
  return out;
}

Matrix with_row_order(const Matrix& m, const std::vector<GroundRef>& order, const IntRange& range) {
  if (m.rows == order) return m;
  const auto perm = basis_permutation(m.rows, order, range);
  Matrix out{CMatrix(m.data.rows(), m.data.cols()), order, m.cols};
  for (std::size_t i = 0; i < perm.size(); ++i) out.data.row(static_cast<Eigen::Index>(i)) = m.data.row(static_cast<Eigen::Index>(perm[i]));
  return out;
}

Matrix with_col_order(const Matrix& m, const std::vector<GroundRef>& order, const IntRange& range) {
  if (m.cols == order) return m;
  const auto perm = basis_permutation(m.cols, order, range);
  Matrix out{CMatrix(m.data.rows(), m.data.cols()), m.rows, order};
  for (std::size_t j = 0; j < perm.size(); ++j) out.data.col(static_cast<Eigen::Index>(j)) = m.data.col(static_cast<Eigen::Index>(perm[j]));
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace sol

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sol/registers.hpp"

namespace sol {

using CMatrix = Eigen::MatrixXcd;

/// A dense matrix whose rows span H_rows and columns span H_cols. Basis
/// indices are mixed-radix over the listed registers, first register most
/// significant.
struct Matrix {
  CMatrix data;
  std::vector<GroundRef> rows, cols;
};

/// Whether two register lists contain the same refs, in any order.
bool same_register_set(const std::vector<GroundRef>& a, const std::vector<GroundRef>& b);
/// Whether the two lists share a ref.
bool overlaps(const std::vector<GroundRef>& a, const std::vector<GroundRef>& b);

/// For each basis index of `to`, the matching basis index of `from`. Both
/// lists must hold the same refs.
std::vector<std::size_t> basis_permutation(const std::vector<GroundRef>& from, const std::vector<GroundRef>& to,
                                           const IntRange& range);

/// Reorder rows (resp. columns) to the given register order.
Matrix with_row_order(const Matrix& m, const std::vector<GroundRef>& order, const IntRange& range);
Matrix with_col_order(const Matrix& m, const std::vector<GroundRef>& order, const IntRange& range);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// max_ij |a_ij|
double max_abs(const CMatrix& m);

}  // namespace sol

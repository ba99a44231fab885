#pragma once
// Symbolic determinants and cofactors of small expression matrices; numeric
// Pfaffian.

#include <vector>

#include <Eigen/Dense>

#include "lcsmech/expr.hpp"

namespace lcsmech::linalg {

using ExprMatrix = std::vector<std::vector<expr::ScalarExpr>>;

/// Largest size accepted by the symbolic routines.
inline constexpr int kMaxSymbolicDim = 8;

/// Laplace expansion with memoised column subsets.
expr::ScalarExpr determinant(const ExprMatrix& m);
/// C[i][j] = (-1)^(i+j) det(m without row i and column j).
ExprMatrix cofactors(const ExprMatrix& m);

/// Pfaffian of a skew-symmetric matrix of even size (Pf² = det), by
/// elimination with pivoting.  Odd sizes give 0.
double pfaffian(Eigen::MatrixXd a);

}  // namespace lcsmech::linalg

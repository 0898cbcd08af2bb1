#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bratteli/algebra.hpp"

namespace bratteli {

inline constexpr double kDefaultTolerance = 1e-9;

/// Singular values of a dense row-major rows x cols matrix, descending.
/// Eigen Jacobi SVD; `tolerance` sets the zero threshold.
std::vector<double> singular_values(std::span<const double> a, std::size_t rows,
                                    std::size_t cols, double tolerance = kDefaultTolerance);

double largest_singular_value(std::span<const double> a, std::size_t rows, std::size_t cols,
                              double tolerance = kDefaultTolerance);

/// Max over summands of the largest singular value.  Each block is first split
/// into the connected components of its nonzero pattern, so sparse images of
/// large algebras cost only as much as their largest component.
double operator_norm(const Element& x, double tolerance = kDefaultTolerance);

}  // namespace bratteli

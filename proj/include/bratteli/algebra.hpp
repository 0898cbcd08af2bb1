#pragma once

// Finite-dimensional C*-algebras presented as direct sums of full matrix
// algebras, laid out block-diagonally in {0..m-1}^2.  All indices are
// zero-based; summand s occupies global indices offset(s) .. offset(s)+size(s)-1.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace bratteli {

using Rational = mpq_class;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

struct IndexPair {
  std::size_t row = 0;
  std::size_t col = 0;
  auto operator<=>(const IndexPair&) const = default;
};

class Algebra {
 public:
  Algebra() = default;
  /// Throws ValidationError on an empty list or a zero size.
  static Algebra make(std::vector<std::size_t> sizes);

  std::size_t summands() const noexcept { return sizes_.size(); }
  std::size_t size(std::size_t summand) const { return sizes_.at(summand); }
  std::size_t offset(std::size_t summand) const { return offsets_.at(summand); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  /// m = sum of summand sizes.
  std::size_t total_size() const noexcept { return total_; }
  /// Vector-space dimension, sum of n_i^2.
  std::size_t dimension() const noexcept;

  std::size_t summand_of(std::size_t global) const;
  std::size_t global(std::size_t summand, std::size_t local) const;
  bool contains(IndexPair p) const;

  /// Enumerates the matrix-unit basis in (summand, row, col) order.
  std::vector<IndexPair> basis() const;

  bool operator==(const Algebra& o) const { return sizes_ == o.sizes_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;  // global index -> summand
  std::size_t total_ = 0;
};

/// Integer combination of matrix units; every map in this library sends
/// matrix units to such combinations, so the exact checks run on these.
struct Term {
  IndexPair at;
  std::int64_t coeff = 0;
  auto operator<=>(const Term&) const = default;
};
using UnitSum = std::vector<Term>;

/// Sorts, merges equal positions and drops zero coefficients.
void normalize(UnitSum& sum);

/// Block-diagonal element with exact rational entries.
class Element {
 public:
  Element() = default;
  explicit Element(Algebra algebra) : algebra_(std::move(algebra)) {}

  static Element zero(const Algebra& algebra) { return Element(algebra); }
  static Element identity(const Algebra& algebra);
  static Element from_units(const Algebra& algebra, const UnitSum& sum);

  const Algebra& algebra() const noexcept { return algebra_; }
  const std::map<IndexPair, Rational>& entries() const noexcept { return entries_; }

  Rational get(IndexPair p) const;
  /// Throws ValidationError when p lies outside the block-diagonal support.
  void set(IndexPair p, const Rational& value);
  void add_to(IndexPair p, const Rational& value);

  bool is_zero() const noexcept { return entries_.empty(); }
  bool operator==(const Element& o) const {
    return algebra_ == o.algebra_ && entries_ == o.entries_;
  }

  /// Dense copy of one summand block, row-major.
  std::vector<double> dense_block(std::size_t summand) const;

 private:
  Algebra algebra_;
  std::map<IndexPair, Rational> entries_;
};

Element matrix_unit(const Algebra& algebra, std::size_t summand, std::size_t i, std::size_t j);

Element add(const Element& x, const Element& y);
Element scale(const Element& x, const Rational& c);
Element multiply(const Element& x, const Element& y);
Element adjoint(const Element& x);

Element operator+(const Element& x, const Element& y);
Element operator*(const Element& x, const Element& y);

/// Upper-triangular pattern inside every summand (T_n per summand).
bool is_upper(const Algebra& algebra, IndexPair p);
bool is_strictly_upper(const Algebra& algebra, IndexPair p);
bool is_upper_triangular(const Element& x);
std::vector<IndexPair> triangular_basis(const Algebra& algebra, bool strict = false);

/// Row-major Kronecker identification (i, a) -> i*d + a.
Algebra tensor_with_matrix(const Algebra& algebra, std::size_t d);

}  // namespace bratteli

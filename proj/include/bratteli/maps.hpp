#pragma once

// Maps between finite-dimensional algebras that send matrix units to sums of
// matrix units: *-homomorphisms given by copies of each summand, and linear
// maps of compression type given by elementary index-list summands.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bratteli/algebra.hpp"
#include "bratteli/diagram.hpp"

namespace bratteli {

/// One copy of a domain summand: local index i goes to local index indices[i]
/// of codomain summand `target`.
struct Copy {
  std::size_t target = 0;
  std::vector<std::size_t> indices;
  bool operator==(const Copy&) const = default;
};

class MatrixUnitHom {
 public:
  MatrixUnitHom() = default;
  /// copies[s] lists the copies of domain summand s.  Throws ValidationError
  /// unless every copy is injective and copies sharing a target summand are disjoint.
  static MatrixUnitHom make(Algebra domain, Algebra codomain, std::vector<std::vector<Copy>> copies);
  static MatrixUnitHom identity(const Algebra& algebra);

  const Algebra& domain() const noexcept { return domain_; }
  const Algebra& codomain() const noexcept { return codomain_; }
  const std::vector<std::vector<Copy>>& copies() const noexcept { return copies_; }

  UnitSum image(IndexPair unit) const;  // global indices
  Element apply(const Element& x) const;
  /// k[s][t] = number of copies of summand s inside summand t.
  Matrix multiplicities() const;
  bool unital() const;
  /// Every copy lists increasing indices (maps upper-triangular units to upper).
  bool increasing() const;

  /// Equal as maps (copy order inside a summand is irrelevant).
  bool same_map(const MatrixUnitHom& o) const;

 private:
  Algebra domain_, codomain_;
  std::vector<std::vector<Copy>> copies_;
};

/// x -> (x_{src[s], src[t]}) placed at (dst[s], dst[t]).
struct Elementary {
  std::size_t src_summand = 0;
  std::vector<std::size_t> src;
  std::size_t dst_summand = 0;
  std::vector<std::size_t> dst;
  bool operator==(const Elementary&) const = default;
};

class CompressionMap {
 public:
  CompressionMap() = default;
  /// Throws ValidationError on ranges, repeated indices, overlapping codomain
  /// supports, or (ordered) non-increasing lists.
  static CompressionMap make(Algebra domain, Algebra codomain, std::vector<Elementary> parts,
                             bool ordered = false);
  /// A homomorphism viewed as a compression-type map (one part per copy).
  /// Ordered when every copy is increasing.
  static CompressionMap from_hom(const MatrixUnitHom& hom);
  static CompressionMap identity(const Algebra& algebra);

  const Algebra& domain() const noexcept { return domain_; }
  const Algebra& codomain() const noexcept { return codomain_; }
  const std::vector<Elementary>& parts() const noexcept { return parts_; }
  bool ordered() const noexcept { return ordered_; }

  UnitSum image(IndexPair unit) const;
  Element apply(const Element& x) const;

  /// Same linear map; part order is irrelevant.
  bool same_map(const CompressionMap& o) const;

 private:
  void index();

  Algebra domain_, codomain_;
  std::vector<Elementary> parts_;
  bool ordered_ = false;
  // domain global index -> (part, position), sorted by part
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> lookup_;
};

// ---- composition ------------------------------------------------------------------

MatrixUnitHom compose(const MatrixUnitHom& f, const MatrixUnitHom& g);    // f after g
CompressionMap compose(const CompressionMap& f, const CompressionMap& g);
CompressionMap compose(const MatrixUnitHom& f, const CompressionMap& g);
CompressionMap compose(const CompressionMap& f, const MatrixUnitHom& g);
/// Parts of both maps side by side; supports must not overlap.
CompressionMap direct_sum(const CompressionMap& f, const CompressionMap& g);

// ---- constructors -------------------------------------------------------------

/// a -> a (x) I_t, M_n -> M_{nt}.
MatrixUnitHom refinement_embedding(std::size_t n, std::size_t t);
/// a -> I_t (x) a.
MatrixUnitHom standard_embedding(std::size_t n, std::size_t t);
/// Refinement except e_{i,n} (i < n) -> e_{i,n} (x) u for the permutation u.
MatrixUnitHom twist_embedding(std::size_t n, std::size_t t, const std::vector<std::size_t>& u);
/// Each target summand is the block-diagonal concatenation of its occurrences.
MatrixUnitHom ordered_diagram_embedding(const Algebra& domain, const Algebra& codomain,
                                        const GapOrder& order);

// ---- isometries and inverses ------------------------------------------------------------

struct IsometryCertificate {
  std::vector<std::size_t> chosen;  // part index per domain summand
  MatrixUnitHom gamma_prime;        // the multiplicity-one injection they form
};

struct NotIsometric {
  std::size_t summand = 0;
  Element witness;  // norm of its image drops below its own norm
  std::string explanation;
};

using IsometryResult = std::variant<IsometryCertificate, NotIsometric>;

IsometryResult is_isometric(const CompressionMap& map);

/// Compression onto the range of gamma', then its inverse.  Throws
/// ValidationError when `cert` does not describe `map`.
CompressionMap left_inverse(const CompressionMap& map, const IsometryCertificate& cert);

struct Standardization {
  /// permutation[old global codomain index] = new global index.
  std::vector<std::size_t> permutation;
  MatrixUnitHom standardized;
  Matrix multiplicities;                        // k[s][t]
  std::vector<std::vector<std::size_t>> offsets;  // offsets[t][s], local start of the copies of s
  std::vector<std::size_t> zero_block;            // per codomain summand
};

Standardization standardize(const MatrixUnitHom& hom);

/// Checks that every upper-triangular unit goes to upper-triangular units and
/// returns the map.  PreconditionError when not ordered; InvariantError on a violation.
CompressionMap restrict_to_triangular(const CompressionMap& map);

/// gamma (x) id_d with Kronecker layout i -> i*d + a.
CompressionMap tensor_with_identity(const CompressionMap& map, std::size_t d);
MatrixUnitHom tensor_with_identity(const MatrixUnitHom& hom, std::size_t d);

/// x (x) y for y in a single full matrix algebra M_d.
Element kron(const Element& x, const Element& y);

}  // namespace bratteli

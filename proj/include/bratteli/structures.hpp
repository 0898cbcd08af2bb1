#pragma once

// Finite-level companions of the interpolation engine: the c_0 corner family
// inside the 2^inf systems, the lexicographic product of triangular algebras,
// the twist split T_n = T_n^- + last column, and the small injectivity search
// for maps M_2 -> T_m sending matrix units to sums of matrix units.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bratteli/maps.hpp"
#include "bratteli/system.hpp"

namespace bratteli {

enum class CornerVariant { Refinement, Standard };

std::string to_string(CornerVariant v);
CornerVariant parse_corner_variant(const std::string& text);

struct CornerProjectionFamily {
  CornerVariant variant = CornerVariant::Refinement;
  std::vector<std::size_t> levels;   // k_j, 1-based level of p_j (M_{2^{k_j}})
  std::vector<std::size_t> indices;  // p_j = e_{q_j q_j}, 0-based
  std::vector<std::string> search_log;  // standard variant only
};

struct CornerStructure {
  CornerProjectionFamily family;
  std::size_t top_level = 0;  // K
  /// E_K(a) = sum_j P_j a P_j on M_{2^K}, P_j the image of p_j.
  CompressionMap expectation;
  /// supports[j] = global indices of P_j at level K.
  std::vector<std::vector<std::size_t>> supports;
  bool idempotent = false;
  bool orthogonal = false;
  bool inside_f0 = false;         // no P_j ever touches the last diagonal entry
  bool embeddings_keep_f0 = false;  // each embedding maps M^0 into M^0
  bool passed() const { return idempotent && orthogonal && inside_f0 && embeddings_keep_f0; }
};

/// ConstructionNotFound when the standard search fails within `level_budget` levels.
CornerStructure c0_structure(CornerVariant variant, std::size_t levels, std::size_t level_budget = 24);

struct NormSampleReport {
  std::size_t samples = 0;
  double worst_excess = 0;  // max of ||E(a)|| - ||a||
  bool passed = true;
};

/// Random rational a in M_{2^K}; checks ||E_K(a)|| <= ||a|| + tolerance.
NormSampleReport c0_norm_samples(const CornerStructure& s, std::size_t samples, std::uint64_t seed,
                                 double tolerance = 1e-9);

struct LexicographicProduct {
  std::size_t s = 0, r = 0;
  /// Units of diag(s) (x) T_r + strictly-upper(s) (x) M_r in the Kronecker layout i*r + a.
  std::vector<IndexPair> basis;
  std::size_t dimension = 0;
  bool equals_lex_triangular = false;
};

LexicographicProduct lexicographic_product(std::size_t s, std::size_t r);

struct TwistLevelReport {
  std::size_t level = 0;
  std::size_t size = 0;
  std::size_t minus_dimension = 0;   // T_n^-
  std::size_t column_dimension = 0;  // last column
  bool split_bijective = false;
  bool agrees_with_refinement = false;  // tau = rho on T^-
  bool square_commutes = false;         // S_{k+1} tau = beta S_k
};

struct TwistReport {
  std::vector<TwistLevelReport> levels;
  std::size_t samples = 0;
  double worst_lower = 0;  // max(||a(1-e)||, ||ae||) - ||a||
  double worst_upper = 0;  // ||a|| - 2 max(...)
  bool norms_ok = true;
  bool identity_is_refinement = false;  // only meaningful for identity permutations
  bool passed() const;
};

/// PreconditionError for a system not generated by twist embeddings.
TwistReport twist_decomposition(const DirectSystem& system, std::size_t depth, std::size_t samples,
                                std::uint64_t seed, double tolerance = 1e-9);

struct InjectionVerdict {
  std::size_t m = 0;
  bool feasible = false;
  std::uint64_t candidates = 0;  // full assignments reaching the grid test
  /// Images of e_00, e_01, e_10, e_11 when feasible.
  std::vector<UnitSum> witness;
  std::string reason;
};

/// Exhaustive search over maps M_2 -> T_m, m = 1..m_max; ValidationError when m_max > 6.
std::vector<InjectionVerdict> remark24_search(std::size_t m_max);

}  // namespace bratteli

#pragma once

// Direct systems A_1 -> A_2 -> ... of finite-dimensional algebras with
// matrix-unit embeddings.  Levels are numbered from 1.  A system built from a
// generator (or a diagram with a tail) extends itself on demand.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bratteli/algebra.hpp"
#include "bratteli/diagram.hpp"
#include "bratteli/maps.hpp"

namespace bratteli {

enum class GeneratorKind { None, Refinement, Standard, Alternation, Twist, Diagram };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& text);

struct Generator {
  GeneratorKind kind = GeneratorKind::None;
  std::size_t initial = 2;                      // size of A_1 (single-summand generators)
  std::vector<std::size_t> multiplicities;      // used cyclically
  bool refinement_first = true;                 // alternation only
  std::vector<std::vector<std::size_t>> permutations;  // twist only, used cyclically
  bool operator==(const Generator&) const = default;
};

class DirectSystem {
 public:
  DirectSystem() = default;

  /// Explicit finite system; embeddings[k] : algebras[k] -> algebras[k+1].
  static DirectSystem make(std::vector<Algebra> algebras, std::vector<MatrixUnitHom> embeddings,
                           bool triangular = false);
  static DirectSystem from_generator(const Generator& g, std::size_t levels = 1);
  /// Summands = vertices, embeddings laid out by the (canonical or stored) block order.
  static DirectSystem from_diagram(const BratteliDiagram& d, std::size_t levels = 0);

  std::size_t levels() const noexcept { return algebras_.size(); }
  bool extensible() const noexcept { return generator_.kind != GeneratorKind::None; }
  /// Materializes levels up to `level`; RangeError past the end of a finite system.
  void extend_to(std::size_t level);

  const Algebra& algebra(std::size_t level) const;
  /// Embedding of level `level` into level `level + 1`.
  const MatrixUnitHom& embedding(std::size_t level) const;
  /// Composite embedding from level `from` to level `to` (identity when equal).
  MatrixUnitHom composed(std::size_t from, std::size_t to) const;

  bool unital() const;
  bool triangular() const noexcept { return triangular_; }
  const Generator& generator() const noexcept { return generator_; }
  /// Bratteli diagram of the system (with a tail when generated).
  BratteliDiagram diagram() const;

  const std::vector<Algebra>& algebras() const noexcept { return algebras_; }
  const std::vector<MatrixUnitHom>& embeddings() const noexcept { return embeddings_; }

 private:
  MatrixUnitHom next_embedding(std::size_t level) const;

  std::vector<Algebra> algebras_;
  std::vector<MatrixUnitHom> embeddings_;
  bool triangular_ = false;
  Generator generator_;
  std::optional<BratteliDiagram> source_diagram_;
};

struct Unitization {
  DirectSystem system;
  bool changed = false;  // false when the input was already unital
  /// Per level, the summand index of the adjoined M_1 (when changed).
  std::vector<std::size_t> adjoined;
};

/// Adds an M_1 summand at every level and sends it, plus every uncovered
/// diagonal position, through copies of M_1 so that all embeddings become unital.
/// Only materialized levels are carried over.
Unitization unitize(const DirectSystem& system);

// convenience constructors
DirectSystem uhf_system(std::size_t initial, std::size_t multiplicity, bool refinement = false);
DirectSystem alternation_system(const std::vector<std::size_t>& multiplicities, bool refinement_first,
                                std::size_t initial = 2);
DirectSystem twist_system(std::size_t initial, std::size_t multiplicity,
                          const std::vector<std::size_t>& permutation);

}  // namespace bratteli

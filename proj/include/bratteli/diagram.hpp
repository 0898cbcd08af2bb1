#pragma once

// Bratteli diagrams: truncated, or with an eventually periodic tail.
//
// Levels are numbered from 1; vertices within a level from 0.  Gap k joins
// level k to level k+1 and carries a multiplicity matrix E_k[source][target].
//
// A tail starting at level p repeats the period gaps P_0, ..., P_{q-1}
// forever: gap k >= p uses P_{(k-p) mod q}.  Two tail modes exist:
//   graph  the period matrices are literal partial-embedding multiplicities;
//          tail sizes follow d_{k+1} = E_k^T d_k + padding.
//   tree   the period describes a branching rule for an infinitely wide
//          diagram: every real vertex of type u spawns, for each entry u->w,
//          its own child of type w (size = parent size + pad), and orphan
//          vertices may be born at any tail level.  Paths never reconverge.
//          Tree tails start at level 1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bratteli {

using Matrix = std::vector<std::vector<std::uint64_t>>;

/// One slot of a target summand in an ordered diagram: a source vertex or a zero block.
struct Occurrence {
  std::optional<std::size_t> source;
  std::size_t zero_size = 0;
  bool operator==(const Occurrence&) const = default;
};
/// Per target vertex, the block-diagonal order of its summands.
using GapOrder = std::vector<std::vector<Occurrence>>;

enum class TailMode { Graph, Tree };

struct TreeEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::uint64_t pad = 0;
  bool operator==(const TreeEdge&) const = default;
};

/// A vertex born with no parent; size = base + step * (tail period index).
struct Orphan {
  std::size_t vertex = 0;
  std::int64_t base = 1;
  std::int64_t step = 0;
  bool operator==(const Orphan&) const = default;
};

struct TreeGap {
  std::size_t sources = 0;
  std::size_t targets = 0;
  std::vector<TreeEdge> edges;
  std::vector<Orphan> orphans;
  bool operator==(const TreeGap&) const = default;
};

struct Tail {
  std::size_t from_level = 1;
  TailMode mode = TailMode::Graph;
  std::vector<Matrix> period;                     // graph mode
  std::vector<std::vector<std::uint64_t>> padding;  // graph mode, per phase (may be empty)
  std::vector<TreeGap> tree_period;               // tree mode
  std::vector<GapOrder> order;                    // optional, per phase
  std::size_t length() const {
    return mode == TailMode::Graph ? period.size() : tree_period.size();
  }
  bool operator==(const Tail&) const = default;
};

class BratteliDiagram {
 public:
  BratteliDiagram() = default;

  /// Validates every structural invariant; throws ValidationError.
  static BratteliDiagram make(bool unital, std::vector<std::vector<std::size_t>> level_sizes,
                              std::vector<Matrix> edges, std::optional<Tail> tail = std::nullopt,
                              std::vector<GapOrder> order = {});

  bool unital() const noexcept { return unital_; }
  bool has_tail() const noexcept { return tail_.has_value(); }
  bool is_tree() const noexcept { return tail_ && tail_->mode == TailMode::Tree; }
  bool ordered() const noexcept;
  const std::optional<Tail>& tail() const noexcept { return tail_; }

  /// Levels given explicitly (1..L).
  std::size_t materialized_levels() const noexcept { return levels_.size(); }
  /// Largest valid level; SIZE_MAX for tail-bearing diagrams.
  std::size_t last_level() const noexcept;
  const std::vector<std::vector<std::size_t>>& level_sizes() const noexcept { return levels_; }
  const std::vector<Matrix>& prefix_edges() const noexcept { return edges_; }
  const std::vector<GapOrder>& prefix_order() const noexcept { return order_; }

  std::size_t vertex_count(std::size_t level) const;
  /// Summand sizes at a level (graph mode; tree tails only at level 1).
  std::vector<std::size_t> sizes(std::size_t level) const;
  /// Multiplicity matrix of gap `level` -> `level + 1`.  In tree mode the entry
  /// counts spawned children of each type.
  Matrix gap(std::size_t level) const;
  /// Occurrence order of gap `level`, or the canonical order when unordered.
  GapOrder gap_order(std::size_t level) const;
  /// Graph-mode padding vector of gap `level` (zero block sizes).
  std::vector<std::uint64_t> gap_padding(std::size_t level) const;
  const TreeGap& tree_gap(std::size_t level) const;

  /// Canonical representative for periodic analysis: levels before the tail
  /// map to themselves, tail levels to p + (level - p) mod q.
  std::size_t level_key(std::size_t level) const;

  bool operator==(const BratteliDiagram&) const = default;

 private:
  void validate() const;

  bool unital_ = true;
  std::vector<std::vector<std::size_t>> levels_;
  std::vector<Matrix> edges_;
  std::optional<Tail> tail_;
  std::vector<GapOrder> order_;
};

Matrix identity_matrix(std::size_t n);
Matrix multiply(const Matrix& a, const Matrix& b);  // throws RangeError on overflow

// ---- canonical constructors -------------------------------------------------

/// Single vertex, sizes n, n t, n t^2, ...
BratteliDiagram uhf_diagram(std::size_t initial, std::size_t multiplicity);
/// The 2^infinity (Fermion algebra) diagram.
BratteliDiagram fermion_diagram();
/// Pascal triangle truncated at `depth` levels.
BratteliDiagram pascal_diagram(std::size_t depth);
/// Single vertex, multiplicity one, sizes 1, 2, 3, ... (compact operators).
BratteliDiagram compact_chain_diagram();
/// Stationary graph-mode diagram with the given period matrix.
BratteliDiagram stationary_diagram(const Matrix& period, std::vector<std::size_t> sizes,
                                   bool unital = false);
/// Two disjoint single-vertex multiplicity-one chains (truncated).
BratteliDiagram disjoint_chains_diagram(std::size_t depth);

// ---- predicates -------------------------------------------------------------

struct WitnessNode {
  std::size_t level = 0;
  std::size_t vertex = 0;
  bool operator==(const WitnessNode&) const = default;
};

struct FermionWitness {
  /// Materialized chain; composed multiplicity between neighbours is >= 2.
  std::vector<WitnessNode> chain;
  /// For tail diagrams: chain.front() recurs every `cycle_levels` levels forever.
  std::optional<std::size_t> cycle_levels;
  bool exact = false;
  /// i-th node of the (possibly infinite) witness; nullopt past a finite chain.
  std::optional<WitnessNode> node(std::size_t i) const;
};

struct Absent {
  std::string reason;  // "NoRecurrentBranching", "Truncated", "TreeTail"
  bool exact = false;
};

using FermionResult = std::variant<FermionWitness, Absent>;

struct Verdict {
  bool value = false;
  bool exact = false;
  std::string explanation;
};

struct UniquePath {
  WitnessNode start;
  std::vector<WitnessNode> path;  // start, then one node per level until the path cycles or ends
  std::optional<std::size_t> cycle_levels;
  bool exact = false;
};

/// Path-count matrix between two levels (product of the gap matrices).
Matrix compose_multiplicities(const BratteliDiagram& d, std::size_t from_level, std::size_t to_level);

FermionResult has_fermion_property(const BratteliDiagram& d, std::size_t horizon = 16);
Verdict is_simple(const BratteliDiagram& d);
Verdict has_trivial_centre(const BratteliDiagram& d);
std::optional<UniquePath> find_unique_descending_path(const BratteliDiagram& d);

/// Composes gaps between listed levels.  With `tail_stride` (tail diagrams
/// only) the result keeps a tail: from the last listed level on, one gap per
/// `tail_stride` original levels.  The stride must be a multiple of the tail
/// period.  Tree tails telescope only from levels = {1}.
BratteliDiagram telescope(const BratteliDiagram& d, const std::vector<std::size_t>& levels,
                          std::optional<std::size_t> tail_stride = std::nullopt);

// ---- Type I taxonomy ----------------------------------------------------------

inline constexpr std::uint64_t kDefaultSentinel = 1'000'000;

struct TypePredicates {
  bool bounded = false;              // B: uniform bound on all summand sizes
  bool per_path_bounded = false;     // P: every infinite path has bounded sizes
  bool uncountable_paths = false;    // U: some recurrent class branches internally
  bool branching_bounded = true;     // W: sizes bounded on the branching classes
  bool branching_paths_bounded = true;   // Pb: no growth inside a branching class
  bool countable_paths_bounded = true;   // Pn: no growth inside a non-branching recurrent class
};

struct Classification {
  bool type_one = false;
  std::optional<FermionWitness> witness;  // set when not Type I
  std::string tag;                        // "NonTypeI" or "i" .. "ix"
  TypePredicates predicates;
  bool interpretive = false;  // tags (v)-(viii) rest on a formalized reading
  std::string explanation;
};

/// Throws UnsupportedClassification for truncated diagrams.
Classification classify(const BratteliDiagram& d, std::uint64_t sentinel = kDefaultSentinel);

}  // namespace bratteli

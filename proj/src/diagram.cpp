#include "bratteli/diagram.hpp"

#include <algorithm>
#include <limits>

#include "bratteli/error.hpp"

namespace bratteli {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw RangeError("multiplicity overflow");
  return a + b;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw RangeError("multiplicity overflow");
  return a * b;
}

std::size_t rows(const Matrix& m) { return m.size(); }
std::size_t cols(const Matrix& m) { return m.empty() ? 0 : m.front().size(); }

void check_rectangular(const Matrix& m, std::size_t r, std::size_t c, const std::string& what) {
  if (m.size() != r) throw ValidationError(what + ": expected " + std::to_string(r) + " rows");
  for (const auto& row : m)
    if (row.size() != c)
      throw ValidationError(what + ": expected " + std::to_string(c) + " columns");
}

void check_no_orphans(const Matrix& m, const std::string& what) {
  for (std::size_t w = 0; w < cols(m); ++w) {
    std::uint64_t in = 0;
    for (std::size_t v = 0; v < rows(m); ++v) in += m[v][w];
    if (in == 0) throw ValidationError(what + ": vertex " + std::to_string(w) + " has no incoming edge");
  }
}

// E^T d + pad, checked.
std::vector<std::size_t> push_sizes(const Matrix& e, const std::vector<std::size_t>& d,
                                    const std::vector<std::uint64_t>& pad) {
  std::vector<std::size_t> out(cols(e), 0);
  for (std::size_t w = 0; w < out.size(); ++w) {
    std::uint64_t s = pad.empty() ? 0 : pad[w];
    for (std::size_t v = 0; v < d.size(); ++v) s = checked_add(s, checked_mul(e[v][w], d[v]));
    out[w] = s;
  }
  return out;
}

void check_order(const GapOrder& order, const Matrix& e, const std::vector<std::uint64_t>& zero_total,
                 const std::string& what) {
  if (order.size() != cols(e)) throw ValidationError(what + ": one occurrence list per target");
  for (std::size_t w = 0; w < order.size(); ++w) {
    std::vector<std::uint64_t> seen(rows(e), 0);
    std::uint64_t zeros = 0;
    for (const auto& occ : order[w]) {
      if (occ.source) {
        if (*occ.source >= rows(e)) throw ValidationError(what + ": occurrence source out of range");
        ++seen[*occ.source];
      } else {
        if (occ.zero_size == 0) throw ValidationError(what + ": empty zero block");
        zeros += occ.zero_size;
      }
    }
    for (std::size_t v = 0; v < rows(e); ++v)
      if (seen[v] != e[v][w])
        throw ValidationError(what + ": occurrences disagree with multiplicities");
    if (zeros != zero_total[w])
      throw ValidationError(what + ": zero blocks do not fill the target summand");
  }
}

}  // namespace

Matrix identity_matrix(std::size_t n) {
  Matrix m(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (cols(a) != rows(b)) throw ValidationError("matrix dimension mismatch");
  Matrix c(rows(a), std::vector<std::uint64_t>(cols(b), 0));
  for (std::size_t i = 0; i < rows(a); ++i)
    for (std::size_t k = 0; k < rows(b); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols(b); ++j)
        c[i][j] = checked_add(c[i][j], checked_mul(a[i][k], b[k][j]));
    }
  return c;
}

BratteliDiagram BratteliDiagram::make(bool unital, std::vector<std::vector<std::size_t>> level_sizes,
                                      std::vector<Matrix> edges, std::optional<Tail> tail,
                                      std::vector<GapOrder> order) {
  BratteliDiagram d;
  d.unital_ = unital;
  d.levels_ = std::move(level_sizes);
  d.edges_ = std::move(edges);
  d.order_ = std::move(order);
  if (tail) {
    bool zero = true;
    for (const auto& pad : tail->padding)
      for (auto x : pad) zero = zero && x == 0;
    if (zero) tail->padding.clear();
  }
  d.tail_ = std::move(tail);
  d.validate();
  return d;
}

void BratteliDiagram::validate() const {
  if (levels_.empty()) throw ValidationError("diagram needs at least one level");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    if (levels_[k].empty()) throw ValidationError("level " + std::to_string(k + 1) + " has no vertices");
    for (auto s : levels_[k])
      if (s == 0) throw ValidationError("level " + std::to_string(k + 1) + ": sizes must be positive");
  }
  if (edges_.size() + 1 != levels_.size())
    throw ValidationError("need one edge matrix per consecutive level pair");

  std::size_t p = std::numeric_limits<std::size_t>::max();
  if (tail_) {
    p = tail_->from_level;
    if (p == 0 || p > levels_.size())
      throw ValidationError("tail must start at a materialized level");
    if (tail_->length() == 0) throw ValidationError("tail period is empty");
  }

  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const std::string what = "gap " + std::to_string(k + 1);
    const auto& e = edges_[k];
    check_rectangular(e, levels_[k].size(), levels_[k + 1].size(), what);
    check_no_orphans(e, what);
    auto pushed = push_sizes(e, levels_[k], {});
    for (std::size_t w = 0; w < pushed.size(); ++w) {
      if (levels_[k + 1][w] < pushed[w])
        throw ValidationError(what + ": summand sizes are not compatible with the multiplicities");
      if (unital_ && levels_[k + 1][w] != pushed[w])
        throw ValidationError(what + ": unital diagram needs equality of sizes");
    }
  }

  if (tail_ && tail_->mode == TailMode::Graph) {
    const auto& t = *tail_;
    const std::size_t q = t.period.size();
    for (std::size_t r = 0; r < q; ++r) {
      const std::string what = "tail period " + std::to_string(r);
      const auto& next = t.period[(r + 1) % q];
      std::size_t in = r == 0 ? levels_[p - 1].size() : rows(t.period[r]);
      check_rectangular(t.period[r], in, rows(next), what);
      check_no_orphans(t.period[r], what);
    }
    if (!t.padding.empty()) {
      if (unital_) throw ValidationError("unital diagram cannot pad its tail");
      if (t.padding.size() != q) throw ValidationError("tail padding needs one vector per period");
      for (std::size_t r = 0; r < q; ++r)
        if (t.padding[r].size() != cols(t.period[r]))
          throw ValidationError("tail padding length mismatch");
    }
    // materialized levels inside the tail must follow the recurrence
    for (std::size_t k = p; k < levels_.size(); ++k) {
      if (edges_[k - 1] != t.period[(k - p) % q])
        throw ValidationError("materialized gap " + std::to_string(k) + " disagrees with the tail");
      auto expect = push_sizes(edges_[k - 1], levels_[k - 1], gap_padding(k));
      if (expect != levels_[k])
        throw ValidationError("materialized level " + std::to_string(k + 1) + " disagrees with the tail");
    }
  }

  if (tail_ && tail_->mode == TailMode::Tree) {
    const auto& t = *tail_;
    if (p != 1 || levels_.size() != 1)
      throw ValidationError("tree tails start at level 1 with no materialized prefix");
    if (!t.order.empty()) throw ValidationError("tree tails cannot be ordered");
    const std::size_t q = t.tree_period.size();
    for (std::size_t r = 0; r < q; ++r) {
      const auto& g = t.tree_period[r];
      const std::string what = "tree period " + std::to_string(r);
      if (r == 0 && g.sources != levels_[0].size()) throw ValidationError(what + ": source count mismatch");
      if (g.targets != t.tree_period[(r + 1) % q].sources)
        throw ValidationError(what + ": target count mismatch");
      for (const auto& e : g.edges) {
        if (e.from >= g.sources || e.to >= g.targets) throw ValidationError(what + ": edge out of range");
        if (unital_ && e.pad != 0) throw ValidationError(what + ": unital diagram cannot pad");
      }
      for (const auto& o : g.orphans) {
        if (o.vertex >= g.targets) throw ValidationError(what + ": orphan out of range");
        if (o.base < 1 || o.step < 0) throw ValidationError(what + ": orphan sizes must be positive");
        if (unital_) throw ValidationError(what + ": unital diagram cannot have orphans");
      }
    }
  }

  // orders
  const bool any_order = !order_.empty() || (tail_ && !tail_->order.empty());
  if (any_order) {
    if (order_.size() != edges_.size()) throw ValidationError("ordered diagram needs an order for every gap");
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      auto pushed = push_sizes(edges_[k], levels_[k], {});
      std::vector<std::uint64_t> zeros(pushed.size());
      for (std::size_t w = 0; w < pushed.size(); ++w) zeros[w] = levels_[k + 1][w] - pushed[w];
      check_order(order_[k], edges_[k], zeros, "order of gap " + std::to_string(k + 1));
    }
    if (tail_) {
      const auto& t = *tail_;
      if (t.order.size() != t.period.size())
        throw ValidationError("ordered tail needs an order for every period matrix");
      for (std::size_t r = 0; r < t.period.size(); ++r) {
        std::vector<std::uint64_t> zeros =
            t.padding.empty() ? std::vector<std::uint64_t>(cols(t.period[r]), 0) : t.padding[r];
        check_order(t.order[r], t.period[r], zeros, "tail order " + std::to_string(r));
      }
    }
  }
}

bool BratteliDiagram::ordered() const noexcept {
  return !order_.empty() || (tail_ && !tail_->order.empty());
}

std::size_t BratteliDiagram::last_level() const noexcept {
  return tail_ ? std::numeric_limits<std::size_t>::max() : levels_.size();
}

std::size_t BratteliDiagram::vertex_count(std::size_t level) const {
  if (level == 0) throw RangeError("levels start at 1");
  if (level <= levels_.size()) return levels_[level - 1].size();
  if (!tail_) throw RangeError("level " + std::to_string(level) + " beyond a truncated diagram");
  if (is_tree()) return tree_gap(level - 1).targets;
  return cols(gap(level - 1));
}

std::vector<std::size_t> BratteliDiagram::sizes(std::size_t level) const {
  if (level == 0) throw RangeError("levels start at 1");
  if (level <= levels_.size()) return levels_[level - 1];
  if (!tail_) throw RangeError("level " + std::to_string(level) + " beyond a truncated diagram");
  if (is_tree()) throw RangeError("tree tails have no per-type sizes past level 1");
  std::vector<std::size_t> d = levels_.back();
  for (std::size_t k = levels_.size(); k < level; ++k) d = push_sizes(gap(k), d, gap_padding(k));
  return d;
}

Matrix BratteliDiagram::gap(std::size_t level) const {
  if (level == 0) throw RangeError("levels start at 1");
  if (level <= edges_.size()) return edges_[level - 1];
  if (!tail_) throw RangeError("gap " + std::to_string(level) + " beyond a truncated diagram");
  const std::size_t r = (level - tail_->from_level) % tail_->length();
  if (tail_->mode == TailMode::Graph) return tail_->period[r];
  const auto& g = tail_->tree_period[r];
  Matrix m(g.sources, std::vector<std::uint64_t>(g.targets, 0));
  for (const auto& e : g.edges) ++m[e.from][e.to];
  return m;
}

const TreeGap& BratteliDiagram::tree_gap(std::size_t level) const {
  if (!is_tree()) throw PreconditionError("not a tree-mode diagram");
  if (level == 0) throw RangeError("levels start at 1");
  return tail_->tree_period[(level - 1) % tail_->tree_period.size()];
}

std::vector<std::uint64_t> BratteliDiagram::gap_padding(std::size_t level) const {
  if (is_tree()) throw PreconditionError("tree tails pad per edge");
  if (level == 0) throw RangeError("levels start at 1");
  if (tail_ && level >= tail_->from_level) {
    const std::size_t r = (level - tail_->from_level) % tail_->period.size();
    if (tail_->padding.empty()) return std::vector<std::uint64_t>(cols(tail_->period[r]), 0);
    return tail_->padding[r];
  }
  if (level >= levels_.size()) throw RangeError("gap beyond a truncated diagram");
  auto pushed = push_sizes(edges_[level - 1], levels_[level - 1], {});
  std::vector<std::uint64_t> pad(pushed.size());
  for (std::size_t w = 0; w < pad.size(); ++w) pad[w] = levels_[level][w] - pushed[w];
  return pad;
}

GapOrder BratteliDiagram::gap_order(std::size_t level) const {
  if (is_tree()) throw PreconditionError("tree tails carry no block order");
  if (level == 0) throw RangeError("levels start at 1");
  if (ordered()) {
    if (level <= order_.size()) return order_[level - 1];
    if (!tail_) throw RangeError("gap beyond a truncated diagram");
    return tail_->order[(level - tail_->from_level) % tail_->order.size()];
  }
  const Matrix e = gap(level);
  const auto pad = gap_padding(level);
  GapOrder out(cols(e));
  for (std::size_t w = 0; w < cols(e); ++w) {
    for (std::size_t v = 0; v < rows(e); ++v)
      for (std::uint64_t c = 0; c < e[v][w]; ++c) out[w].push_back({v, 0});
    if (pad[w] > 0) out[w].push_back({std::nullopt, pad[w]});
  }
  return out;
}

std::size_t BratteliDiagram::level_key(std::size_t level) const {
  if (!tail_ || level < tail_->from_level) return level;
  return tail_->from_level + (level - tail_->from_level) % tail_->length();
}

// ---- constructors -------------------------------------------------------------

BratteliDiagram uhf_diagram(std::size_t initial, std::size_t multiplicity) {
  if (multiplicity == 0) throw ValidationError("multiplicity must be positive");
  Tail t;
  t.from_level = 1;
  t.period = {{{multiplicity}}};
  return BratteliDiagram::make(true, {{initial}}, {}, t);
}

BratteliDiagram fermion_diagram() { return uhf_diagram(2, 2); }

BratteliDiagram pascal_diagram(std::size_t depth) {
  if (depth == 0) throw ValidationError("depth must be positive");
  std::vector<std::vector<std::size_t>> levels{{1}};
  std::vector<Matrix> edges;
  for (std::size_t k = 1; k < depth; ++k) {
    const auto& prev = levels.back();
    Matrix e(k, std::vector<std::uint64_t>(k + 1, 0));
    std::vector<std::size_t> next(k + 1, 0);
    for (std::size_t v = 0; v < k; ++v) {
      e[v][v] = e[v][v + 1] = 1;
      next[v] += prev[v];
      next[v + 1] += prev[v];
    }
    edges.push_back(std::move(e));
    levels.push_back(std::move(next));
  }
  return BratteliDiagram::make(true, std::move(levels), std::move(edges));
}

BratteliDiagram compact_chain_diagram() {
  Tail t;
  t.from_level = 1;
  t.period = {{{1}}};
  t.padding = {{1}};
  return BratteliDiagram::make(false, {{1}}, {}, t);
}

BratteliDiagram stationary_diagram(const Matrix& period, std::vector<std::size_t> sizes, bool unital) {
  Tail t;
  t.from_level = 1;
  t.period = {period};
  return BratteliDiagram::make(unital, {std::move(sizes)}, {}, t);
}

BratteliDiagram disjoint_chains_diagram(std::size_t depth) {
  if (depth == 0) throw ValidationError("depth must be positive");
  std::vector<std::vector<std::size_t>> levels(depth, {1, 1});
  std::vector<Matrix> edges(depth - 1, identity_matrix(2));
  return BratteliDiagram::make(true, std::move(levels), std::move(edges));
}

// ---- composition and telescoping -----------------------------------------------

Matrix compose_multiplicities(const BratteliDiagram& d, std::size_t from_level, std::size_t to_level) {
  if (from_level == 0) throw RangeError("levels start at 1");
  if (from_level > to_level) throw ValidationError("from_level must not exceed to_level");
  if (to_level > d.last_level())
    throw RangeError("level " + std::to_string(to_level) + " beyond a truncated diagram");
  Matrix m = identity_matrix(d.vertex_count(from_level));
  for (std::size_t k = from_level; k < to_level; ++k) m = multiply(m, d.gap(k));
  return m;
}

namespace {

// Occurrence order of a -> c from orders of a -> b and b -> c.
GapOrder compose_orders(const GapOrder& first, const GapOrder& second) {
  GapOrder out(second.size());
  for (std::size_t w = 0; w < second.size(); ++w)
    for (const auto& occ : second[w]) {
      if (!occ.source) {
        out[w].push_back(occ);
        continue;
      }
      for (const auto& inner : first[*occ.source]) out[w].push_back(inner);
    }
  return out;
}

GapOrder composed_order(const BratteliDiagram& d, std::size_t from, std::size_t to) {
  GapOrder acc;
  for (std::size_t k = from; k < to; ++k) {
    GapOrder g = d.gap_order(k);
    acc = k == from ? g : compose_orders(acc, g);
  }
  return acc;
}

// Composite of tree gaps [start, start+count); orphans rebased onto the new period index.
TreeGap compose_tree(const BratteliDiagram& d, std::size_t start, std::size_t count) {
  const std::size_t q = d.tail()->tree_period.size();
  const std::int64_t m = static_cast<std::int64_t>(count / q);
  const std::size_t n0 = d.vertex_count(start);
  TreeGap acc;
  acc.sources = acc.targets = n0;
  for (std::size_t v = 0; v < n0; ++v) acc.edges.push_back({v, v, 0});
  for (std::size_t t = 0; t < count; ++t) {
    const TreeGap& g = d.tree_gap(start + t);
    const std::int64_t phase_period = static_cast<std::int64_t>(t / q);
    TreeGap next;
    next.sources = acc.sources;
    next.targets = g.targets;
    for (const auto& a : acc.edges)
      for (const auto& b : g.edges)
        if (a.to == b.from) next.edges.push_back({a.from, b.to, a.pad + b.pad});
    for (const auto& o : acc.orphans)
      for (const auto& b : g.edges)
        if (o.vertex == b.from)
          next.orphans.push_back({b.to, o.base + static_cast<std::int64_t>(b.pad), o.step});
    for (const auto& o : g.orphans)
      next.orphans.push_back({o.vertex, o.base + o.step * phase_period, o.step * m});
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

BratteliDiagram telescope(const BratteliDiagram& d, const std::vector<std::size_t>& levels,
                          std::optional<std::size_t> tail_stride) {
  if (levels.empty()) throw ValidationError("telescope needs at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == 0) throw RangeError("levels start at 1");
    if (i > 0 && levels[i] <= levels[i - 1]) throw ValidationError("levels must be strictly increasing");
    if (levels[i] > d.last_level())
      throw RangeError("level " + std::to_string(levels[i]) + " beyond a truncated diagram");
  }
  if (tail_stride) {
    if (!d.has_tail()) throw PreconditionError("tail stride needs a tail-bearing diagram");
    const std::size_t q = d.tail()->length();
    if (*tail_stride == 0 || *tail_stride % q != 0)
      throw ValidationError("tail stride must be a positive multiple of the tail period");
    if (levels.back() < d.tail()->from_level) throw ValidationError("last listed level must lie in the tail");
  }

  if (d.is_tree()) {
    if (levels != std::vector<std::size_t>{1})
      throw PreconditionError("tree tails telescope from level 1 only");
    if (!tail_stride) return BratteliDiagram::make(d.unital(), {d.level_sizes()[0]}, {});
    Tail t;
    t.from_level = 1;
    t.mode = TailMode::Tree;
    t.tree_period = {compose_tree(d, 1, *tail_stride)};
    return BratteliDiagram::make(d.unital(), {d.level_sizes()[0]}, {}, t);
  }

  std::vector<std::vector<std::size_t>> sizes;
  std::vector<Matrix> edges;
  std::vector<GapOrder> order;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    sizes.push_back(d.sizes(levels[i]));
    if (i == 0) continue;
    edges.push_back(compose_multiplicities(d, levels[i - 1], levels[i]));
    if (d.ordered()) order.push_back(composed_order(d, levels[i - 1], levels[i]));
  }
  std::optional<Tail> tail;
  if (tail_stride) {
    const std::size_t last = levels.back();
    Tail t;
    t.from_level = levels.size();
    Matrix m = compose_multiplicities(d, last, last + *tail_stride);
    const auto before = d.sizes(last);
    const auto after = d.sizes(last + *tail_stride);
    std::vector<std::uint64_t> pad(after.size());
    for (std::size_t w = 0; w < after.size(); ++w) {
      std::uint64_t pushed = 0;
      for (std::size_t v = 0; v < before.size(); ++v) pushed += m[v][w] * before[v];
      pad[w] = after[w] - pushed;
    }
    t.period = {std::move(m)};
    t.padding = {std::move(pad)};
    if (d.ordered()) t.order = {composed_order(d, last, last + *tail_stride)};
    tail = std::move(t);
  }
  return BratteliDiagram::make(d.unital(), std::move(sizes), std::move(edges), std::move(tail),
                               std::move(order));
}

}  // namespace bratteli

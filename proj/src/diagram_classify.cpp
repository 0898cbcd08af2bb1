// Fermion property, reachability predicates and the Type I taxonomy.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "bratteli/diagram.hpp"
#include "bratteli/error.hpp"

namespace bratteli {

namespace {

using Set = std::vector<bool>;

Matrix saturating_product(const Matrix& a, const Matrix& b, std::uint64_t cap) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b.front().size();
  Matrix c(n, std::vector<std::uint64_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (b[l][j] == 0) continue;
        const std::uint64_t x = std::min(a[i][l], cap) * std::min(b[l][j], cap);
        c[i][j] = std::min(cap, c[i][j] + x);
      }
    }
  return c;
}

Matrix saturating_compose(const BratteliDiagram& d, std::size_t from, std::size_t to, std::uint64_t cap) {
  Matrix m = identity_matrix(d.vertex_count(from));
  for (std::size_t k = from; k < to; ++k) m = saturating_product(m, d.gap(k), cap);
  return m;
}

// Tarjan on an adjacency list; returns component id per node.
std::vector<std::size_t> strong_components(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none), stack;
  std::vector<bool> on(n, false);
  std::size_t counter = 0, comps = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (auto w : adj[v]) {
      if (index[w] == none) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp[w] = comps;
      } while (w != v);
      ++comps;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == none) visit(v);
  return comp;
}

Set step_set(const Matrix& e, const Set& from) {
  Set out(e.empty() ? 0 : e.front().size(), false);
  for (std::size_t v = 0; v < from.size(); ++v)
    if (from[v])
      for (std::size_t w = 0; w < out.size(); ++w)
        if (e[v][w] > 0) out[w] = true;
  return out;
}

bool all_of(const Set& s) { return std::all_of(s.begin(), s.end(), [](bool b) { return b; }); }
bool none_of(const Set& s) { return std::none_of(s.begin(), s.end(), [](bool b) { return b; }); }

// Levels whose vertices represent every vertex of the diagram up to periodicity.
std::size_t representative_levels(const BratteliDiagram& d) {
  if (!d.has_tail()) return d.materialized_levels();
  return d.tail()->from_level + d.tail()->length() - 1;
}

// ---- tree-mode count simulation ---------------------------------------------------

// Real vertices of each type at a level, saturated at 2.
using Counts = std::vector<std::uint8_t>;

Counts tree_step(const TreeGap& g, const Counts& c) {
  Counts out(g.targets, 0);
  for (const auto& e : g.edges) out[e.to] = static_cast<std::uint8_t>(std::min(2, out[e.to] + c[e.from]));
  for (const auto& o : g.orphans) out[o.vertex] = static_cast<std::uint8_t>(std::min(2, out[o.vertex] + 1));
  return out;
}

// Visits (level, counts) until the (phase, counts) state repeats.
template <class F>
void tree_walk(const BratteliDiagram& d, F&& visit) {
  const std::size_t q = d.tail()->tree_period.size();
  Counts c(d.vertex_count(1), 1);
  std::set<std::pair<std::size_t, Counts>> seen;
  for (std::size_t level = 1;; ++level) {
    const std::size_t phase = (level - 1) % q;
    if (!seen.insert({phase, c}).second) return;
    if (!visit(level, c)) return;
    c = tree_step(d.tree_gap(level), c);
  }
}

}  // namespace

std::optional<WitnessNode> FermionWitness::node(std::size_t i) const {
  if (i < chain.size()) return chain[i];
  if (!cycle_levels || chain.empty()) return std::nullopt;
  return WitnessNode{chain.front().level + i * *cycle_levels, chain.front().vertex};
}

// ---- Fermion property ------------------------------------------------------------------

FermionResult has_fermion_property(const BratteliDiagram& d, std::size_t horizon) {
  if (d.is_tree()) return Absent{"TreeTail", true};

  if (d.has_tail()) {
    const std::size_t p = d.tail()->from_level;
    const std::size_t q = d.tail()->length();
    const Matrix m = saturating_compose(d, p, p + q, 2);
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (m[a][b] > 0) adj[a].push_back(b);
    const auto comp = strong_components(adj);
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t members = 0, edges = 0;
      bool heavy = false;
      for (std::size_t a = 0; a < n; ++a) {
        if (comp[a] != comp[v]) continue;
        ++members;
        for (std::size_t b = 0; b < n; ++b)
          if (comp[b] == comp[v] && m[a][b] > 0) {
            ++edges;
            heavy = heavy || m[a][b] >= 2;
          }
      }
      if (edges == 0 || !(heavy || edges > members)) continue;
      // smallest power with a doubled return
      Matrix power = m;
      const std::size_t limit = 4 * n * n + 4;
      for (std::size_t k = 1; k <= limit; ++k) {
        if (power[v][v] >= 2) {
          FermionWitness w;
          const std::size_t cycle = k * q;
          w.cycle_levels = cycle;
          w.exact = true;
          for (std::size_t i = 0; i < 3; ++i) w.chain.push_back({p + i * cycle, v});
          return w;
        }
        power = saturating_product(power, m, 2);
      }
      throw InvariantError("recurrent branching vertex without a doubled return");
    }
    return Absent{"NoRecurrentBranching", true};
  }

  // Truncated: longest chain with doubled composed multiplicity between neighbours.
  const std::size_t top = std::min(d.materialized_levels(), std::max<std::size_t>(horizon, 1));
  std::vector<std::vector<std::size_t>> best(top + 1), prev_level(top + 1), prev_vertex(top + 1);
  for (std::size_t l = 1; l <= top; ++l) {
    const std::size_t n = d.vertex_count(l);
    best[l].assign(n, 1);
    prev_level[l].assign(n, 0);
    prev_vertex[l].assign(n, 0);
    for (std::size_t e = 1; e < l; ++e) {
      const Matrix m = saturating_compose(d, e, l, 2);
      for (std::size_t u = 0; u < m.size(); ++u)
        for (std::size_t v = 0; v < n; ++v)
          if (m[u][v] >= 2 && best[e][u] + 1 > best[l][v]) {
            best[l][v] = best[e][u] + 1;
            prev_level[l][v] = e;
            prev_vertex[l][v] = u;
          }
    }
  }
  std::size_t bl = 1, bv = 0;
  for (std::size_t l = 1; l <= top; ++l)
    for (std::size_t v = 0; v < best[l].size(); ++v)
      if (best[l][v] > best[bl][bv]) {
        bl = l;
        bv = v;
      }
  if (best[bl][bv] < 2) return Absent{"Truncated", false};
  FermionWitness w;
  for (std::size_t l = bl, v = bv; l != 0;) {
    w.chain.push_back({l, v});
    const std::size_t pl = prev_level[l][v], pv = prev_vertex[l][v];
    l = pl;
    v = pv;
  }
  std::reverse(w.chain.begin(), w.chain.end());
  return w;
}

// ---- reachability predicates --------------------------------------------------------------

Verdict is_simple(const BratteliDiagram& d) {
  if (d.is_tree()) {
    bool chain = true;
    std::size_t width = 0;
    tree_walk(d, [&](std::size_t, const Counts& c) {
      std::size_t total = 0;
      for (auto x : c) total += x;
      width = std::max(width, total);
      chain = chain && total == 1;
      return chain;
    });
    return {chain, true,
            chain ? "every level has a single vertex"
                  : "some level has " + std::to_string(width) + "+ vertices with disjoint descendants"};
  }
  const bool exact = d.has_tail();
  const std::size_t reps = representative_levels(d);
  const std::size_t last = d.last_level();
  for (std::size_t l = 1; l <= reps; ++l) {
    if (!exact && l == last) break;
    for (std::size_t v = 0; v < d.vertex_count(l); ++v) {
      Set r(d.vertex_count(l), false);
      r[v] = true;
      std::set<std::pair<std::size_t, Set>> seen;
      bool full = false;
      for (std::size_t k = l; k < last; ++k) {
        r = step_set(d.gap(k), r);
        if (all_of(r)) {
          full = true;
          break;
        }
        if (none_of(r) || !seen.insert({d.level_key(k + 1), r}).second) break;
      }
      if (!full)
        return {false, exact,
                "vertex " + std::to_string(v) + " at level " + std::to_string(l) +
                    " never reaches a whole level"};
    }
  }
  return {true, exact,
          exact ? "every vertex reaches a whole lower level"
                : "every vertex reaches a whole lower level within the truncation"};
}

Verdict has_trivial_centre(const BratteliDiagram& d) {
  if (d.is_tree()) {
    bool single = true;
    tree_walk(d, [&](std::size_t, const Counts& c) {
      std::size_t total = 0;
      for (auto x : c) total += x;
      single = single && total <= 1;
      return single;
    });
    return {single, true,
            single ? "at most one vertex per level" : "two vertices with disjoint descendant trees"};
  }
  const bool exact = d.has_tail();
  const std::size_t reps = representative_levels(d);
  const std::size_t last = d.last_level();
  for (std::size_t l = 1; l <= reps; ++l) {
    const std::size_t n = d.vertex_count(l);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        Set ra(n, false), rb(n, false);
        ra[a] = rb[b] = true;
        std::set<std::tuple<std::size_t, Set, Set>> seen;
        bool meet = false;
        for (std::size_t k = l; k < last; ++k) {
          ra = step_set(d.gap(k), ra);
          rb = step_set(d.gap(k), rb);
          for (std::size_t w = 0; w < ra.size(); ++w) meet = meet || (ra[w] && rb[w]);
          if (meet || none_of(ra) || none_of(rb)) break;
          if (!seen.insert({d.level_key(k + 1), ra, rb}).second) break;
        }
        if (!meet)
          return {false, exact,
                  "vertices " + std::to_string(a) + " and " + std::to_string(b) + " at level " +
                      std::to_string(l) + " have no common descendant"};
      }
  }
  return {true, exact, "every pair of same-level vertices has a common descendant"};
}

std::optional<UniquePath> find_unique_descending_path(const BratteliDiagram& d) {
  if (d.is_tree()) {
    const std::size_t q = d.tail()->tree_period.size();
    std::vector<std::size_t> present_levels;
    std::vector<Counts> present;
    tree_walk(d, [&](std::size_t level, const Counts& c) {
      present_levels.push_back(level);
      present.push_back(c);
      return level < q + 1;
    });
    for (std::size_t i = 0; i < present.size(); ++i) {
      const std::size_t level = present_levels[i];
      for (std::size_t v = 0; v < present[i].size(); ++v) {
        if (present[i][v] == 0) continue;
        UniquePath up;
        up.start = {level, v};
        up.exact = true;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        std::size_t cur = v;
        bool ok = true;
        for (std::size_t l = level;; ++l) {
          up.path.push_back({l, cur});
          if (!seen.insert({(l - 1) % q, cur}).second) {
            up.path.pop_back();
            const auto first = std::find_if(up.path.begin(), up.path.end(), [&](const WitnessNode& n) {
              return (n.level - 1) % q == (l - 1) % q && n.vertex == cur;
            });
            up.cycle_levels = l - first->level;
            break;
          }
          std::size_t children = 0, next = 0;
          for (const auto& e : d.tree_gap(l).edges)
            if (e.from == cur) {
              ++children;
              next = e.to;
            }
          if (children != 1) {
            ok = false;
            break;
          }
          cur = next;
        }
        if (ok) return up;
      }
    }
    return std::nullopt;
  }

  const bool exact = d.has_tail();
  const std::size_t reps = representative_levels(d);
  const std::size_t last = d.last_level();
  for (std::size_t l = 1; l <= reps; ++l) {
    if (!exact && l == last) break;
    for (std::size_t v = 0; v < d.vertex_count(l); ++v) {
      UniquePath up;
      up.start = {l, v};
      up.exact = exact;
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
      std::size_t cur = v;
      bool ok = true;
      for (std::size_t k = l;; ++k) {
        if (exact) {
          auto [it, fresh] = seen.insert({{d.level_key(k), cur}, k});
          if (!fresh) {
            up.cycle_levels = k - it->second;
            break;
          }
        }
        up.path.push_back({k, cur});
        if (k == last) break;
        const Matrix e = d.gap(k);
        std::uint64_t out = 0;
        std::size_t next = 0;
        for (std::size_t w = 0; w < e[cur].size(); ++w)
          if (e[cur][w] > 0) {
            out += e[cur][w];
            next = w;
          }
        if (out != 1) {
          ok = false;
          break;
        }
        cur = next;
      }
      if (ok) return up;
    }
  }
  return std::nullopt;
}

// ---- classification ------------------------------------------------------------------------

namespace {

const char* const kInterpretiveNote =
    "tags (v)-(viii) use a formalized reading of the verbal descriptions: "
    "W = sizes bounded on branching classes, Pb/Pn = no growth inside branching/non-branching recurrent classes";

std::string choose_tag(const TypePredicates& t) {
  if (!t.uncountable_paths) {
    if (t.bounded) return "i";
    return t.per_path_bounded ? "ii" : "iii";
  }
  if (t.bounded) return "iv";
  if (!t.branching_paths_bounded) return "ix";
  if (t.branching_bounded) return t.countable_paths_bounded ? "v" : "vii";
  return t.countable_paths_bounded ? "vi" : "viii";
}

// Product graph of the tail: node (phase r, vertex v) -> index.
struct PeriodGraph {
  std::vector<std::size_t> offset;  // per phase
  std::vector<std::vector<std::size_t>> adj;
  std::vector<std::size_t> comp;
  std::vector<bool> recurrent;  // node in a component with an internal edge
};

PeriodGraph build_period_graph(const std::vector<Matrix>& period) {
  PeriodGraph g;
  const std::size_t q = period.size();
  std::size_t total = 0;
  for (const auto& m : period) {
    g.offset.push_back(total);
    total += m.size();
  }
  g.adj.assign(total, {});
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t v = 0; v < period[r].size(); ++v)
      for (std::size_t w = 0; w < period[r][v].size(); ++w)
        for (std::uint64_t c = 0; c < period[r][v][w]; ++c)
          g.adj[g.offset[r] + v].push_back(g.offset[(r + 1) % q] + w);
  g.comp = strong_components(g.adj);
  g.recurrent.assign(total, false);
  for (std::size_t a = 0; a < total; ++a)
    for (auto b : g.adj[a])
      if (g.comp[a] == g.comp[b]) g.recurrent[a] = g.recurrent[b] = true;
  return g;
}

struct SizeState {
  std::size_t phase = 0;
  std::vector<std::uint64_t> sizes;
  bool operator==(const SizeState&) const = default;
};

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

Classification classify_graph(const BratteliDiagram& d, std::uint64_t sentinel) {
  const auto& tail = *d.tail();
  const std::size_t p = tail.from_level;
  const std::size_t q = tail.period.size();
  Classification c;
  c.type_one = true;

  auto step = [&](const SizeState& s) {
    const Matrix& e = tail.period[s.phase];
    SizeState out{(s.phase + 1) % q, std::vector<std::uint64_t>(e.front().size(), 0)};
    for (std::size_t w = 0; w < out.sizes.size(); ++w) {
      std::uint64_t x = tail.padding.empty() ? 0 : tail.padding[s.phase][w];
      for (std::size_t v = 0; v < s.sizes.size(); ++v) {
        if (e[v][w] == 0) continue;
        if (s.sizes[v] == kInf) {
          x = kInf;
          break;
        }
        x += e[v][w] * s.sizes[v];
        if (x > sentinel) {
          x = kInf;
          break;
        }
      }
      out.sizes[w] = x > sentinel ? kInf : x;
    }
    return out;
  };

  SizeState start{0, {}};
  for (auto s : d.sizes(p)) start.sizes.push_back(s > sentinel ? kInf : s);

  // Brent: find cycle length lambda and start mu.
  std::size_t power = 1, lambda = 1;
  SizeState tortoise = start, hare = step(start);
  while (!(tortoise == hare)) {
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    hare = step(hare);
    ++lambda;
  }
  tortoise = hare = start;
  for (std::size_t i = 0; i < lambda; ++i) hare = step(hare);
  std::size_t mu = 0;
  while (!(tortoise == hare)) {
    tortoise = step(tortoise);
    hare = step(hare);
    ++mu;
  }

  bool bounded = true;
  {
    SizeState s = start;
    for (std::size_t i = 0; i < mu + lambda; ++i) {
      for (auto x : s.sizes) bounded = bounded && x != kInf;
      s = step(s);
    }
  }

  const PeriodGraph g = build_period_graph(tail.period);
  bool per_path = true;
  {
    SizeState s = tortoise;  // first state on the cycle
    for (std::size_t i = 0; i < lambda; ++i) {
      for (std::size_t v = 0; v < s.sizes.size(); ++v)
        if (g.recurrent[g.offset[s.phase] + v] && s.sizes[v] == kInf) per_path = false;
      s = step(s);
    }
  }

  // Internal branching would already give a doubled return, so U is false here;
  // compute it anyway so the report is self-contained.
  bool branching = false;
  for (std::size_t a = 0; a < g.adj.size(); ++a) {
    std::size_t internal = 0;
    for (auto b : g.adj[a]) internal += g.comp[a] == g.comp[b];
    branching = branching || internal >= 2;
  }

  c.predicates.bounded = bounded;
  c.predicates.per_path_bounded = per_path;
  c.predicates.uncountable_paths = branching;
  c.tag = choose_tag(c.predicates);
  c.explanation = std::string(bounded ? "sizes bounded" : "sizes unbounded") + "; " +
                  (per_path ? "bounded on every recurrent class" : "unbounded on a recurrent class") +
                  "; " + (branching ? "uncountably many paths" : "countably many paths") +
                  " (sentinel " + std::to_string(sentinel) + ")";
  return c;
}

Classification classify_tree(const BratteliDiagram& d) {
  const auto& tail = *d.tail();
  const std::size_t q = tail.tree_period.size();
  std::vector<std::size_t> offset;
  std::size_t total = 0;
  for (const auto& gp : tail.tree_period) {
    offset.push_back(total);
    total += gp.sources;
  }
  struct Arc {
    std::size_t to;
    bool growth;
  };
  std::vector<std::vector<Arc>> arcs(total);
  std::vector<std::vector<std::size_t>> adj(total);
  std::vector<bool> reachable(total, false), unbounded(total, false);
  std::vector<std::size_t> frontier;
  for (std::size_t v = 0; v < tail.tree_period[0].sources; ++v) frontier.push_back(offset[0] + v);
  for (std::size_t r = 0; r < q; ++r) {
    const auto& gp = tail.tree_period[r];
    const std::size_t nr = (r + 1) % q;
    for (const auto& e : gp.edges) {
      arcs[offset[r] + e.from].push_back({offset[nr] + e.to, e.pad > 0});
      adj[offset[r] + e.from].push_back(offset[nr] + e.to);
    }
    for (const auto& o : gp.orphans) {
      frontier.push_back(offset[nr] + o.vertex);
      if (o.step > 0) unbounded[offset[nr] + o.vertex] = true;
    }
  }
  const auto comp = strong_components(adj);
  const std::size_t ncomp = total == 0 ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;

  // reachability from roots and orphans
  for (auto s : frontier) reachable[s] = true;
  for (std::size_t i = 0; i < frontier.size(); ++i)
    for (const auto& a : arcs[frontier[i]])
      if (!reachable[a.to]) {
        reachable[a.to] = true;
        frontier.push_back(a.to);
      }

  std::vector<bool> comp_branching(ncomp, false), comp_growth(ncomp, false), comp_recurrent(ncomp, false);
  for (std::size_t a = 0; a < total; ++a) {
    if (!reachable[a]) continue;
    std::size_t internal = 0;
    for (const auto& arc : arcs[a])
      if (comp[arc.to] == comp[a]) {
        ++internal;
        comp_recurrent[comp[a]] = true;
        if (arc.growth) comp_growth[comp[a]] = true;
      }
    if (internal >= 2) comp_branching[comp[a]] = true;
  }

  std::vector<std::size_t> grow;
  for (std::size_t a = 0; a < total; ++a) {
    if (!reachable[a]) continue;
    if (comp_growth[comp[a]]) unbounded[a] = true;
    if (unbounded[a]) grow.push_back(a);
  }
  for (std::size_t i = 0; i < grow.size(); ++i)
    for (const auto& arc : arcs[grow[i]])
      if (!unbounded[arc.to]) {
        unbounded[arc.to] = true;
        grow.push_back(arc.to);
      }

  TypePredicates t;
  t.bounded = true;
  t.per_path_bounded = true;
  for (std::size_t a = 0; a < total; ++a) {
    if (!reachable[a]) continue;
    const std::size_t k = comp[a];
    if (unbounded[a]) t.bounded = false;
    if (comp_recurrent[k] && comp_growth[k]) t.per_path_bounded = false;
    if (comp_branching[k]) {
      t.uncountable_paths = true;
      if (unbounded[a]) t.branching_bounded = false;
      if (comp_growth[k]) t.branching_paths_bounded = false;
    } else if (comp_recurrent[k] && comp_growth[k]) {
      t.countable_paths_bounded = false;
    }
  }

  Classification c;
  c.type_one = true;
  c.predicates = t;
  c.tag = choose_tag(t);
  c.explanation = std::string(t.bounded ? "sizes bounded" : "sizes unbounded") + "; " +
                  (t.uncountable_paths ? "uncountably many paths" : "countably many paths") + "; " +
                  (t.branching_paths_bounded ? "no growth on branching classes" : "growth on a branching class");
  return c;
}

}  // namespace

Classification classify(const BratteliDiagram& d, std::uint64_t sentinel) {
  if (!d.has_tail()) throw UnsupportedClassification("classification needs a periodic tail");
  if (sentinel == 0) throw ValidationError("sentinel must be positive");
  auto fermion = has_fermion_property(d);
  if (auto* w = std::get_if<FermionWitness>(&fermion)) {
    Classification c;
    c.type_one = false;
    c.witness = *w;
    c.tag = "NonTypeI";
    c.explanation = "recurrent vertex with a doubled return every " + std::to_string(*w->cycle_levels) +
                    " levels";
    return c;
  }
  Classification c = d.is_tree() ? classify_tree(d) : classify_graph(d, sentinel);
  c.interpretive = c.tag == "v" || c.tag == "vi" || c.tag == "vii" || c.tag == "viii";
  if (c.interpretive) c.explanation += "; " + std::string(kInterpretiveNote);
  return c;
}

}  // namespace bratteli

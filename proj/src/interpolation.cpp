#include "bratteli/interpolation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "bratteli/error.hpp"

namespace bratteli {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::SelfAdjoint: return "selfadjoint";
    case Variant::Ordered: return "ordered";
    case Variant::Refinement: return "refinement";
  }
  return "selfadjoint";
}

Variant parse_variant(const std::string& text) {
  if (text == "selfadjoint") return Variant::SelfAdjoint;
  if (text == "ordered") return Variant::Ordered;
  if (text == "refinement") return Variant::Refinement;
  throw ValidationError("unknown variant '" + text + "'");
}

bool VerificationReport::passed() const {
  return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed; });
}

const CheckRecord* VerificationReport::first_failure() const {
  for (const auto& r : records)
    if (!r.passed) return &r;
  return nullptr;
}

namespace {

std::vector<std::size_t> iota_list(std::size_t n, std::size_t start = 0) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), start);
  return v;
}

struct PhiCopy {
  std::size_t source = 0;  // summand of A_k
  std::size_t target = 0;  // summand of A_{k+1}
  std::vector<std::size_t> positions;
};

// Proper edge colouring of a bipartite multigraph with max-degree colours.
// Edges join source summands (left) to target summands (right).
std::vector<std::size_t> bipartite_edge_colouring(const std::vector<PhiCopy>& edges, std::size_t left,
                                                  std::size_t right, std::size_t& colours) {
  std::vector<std::size_t> degree(left + right, 0);
  for (const auto& e : edges) {
    ++degree[e.source];
    ++degree[left + e.target];
  }
  colours = degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
  constexpr std::size_t none = SIZE_MAX;
  std::vector<std::vector<std::size_t>> at(left + right, std::vector<std::size_t>(colours, none));
  std::vector<std::size_t> colour(edges.size(), none);
  auto endpoint = [&](std::size_t e, std::size_t node) {
    const std::size_t u = edges[e].source, v = left + edges[e].target;
    return node == u ? v : u;
  };
  auto free_at = [&](std::size_t node) {
    for (std::size_t c = 0; c < colours; ++c)
      if (at[node][c] == none) return c;
    throw InvariantError("edge colouring ran out of colours");
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t u = edges[e].source, v = left + edges[e].target;
    const std::size_t a = free_at(u);
    if (at[v][a] != none) {
      const std::size_t b = free_at(v);
      // flip the a/b alternating path leaving v along colour a
      std::vector<std::size_t> path;
      std::size_t node = v, c = a;
      while (at[node][c] != none) {
        const std::size_t f = at[node][c];
        path.push_back(f);
        node = endpoint(f, node);
        c = c == a ? b : a;
      }
      for (auto f : path) {
        at[edges[f].source][colour[f]] = none;
        at[left + edges[f].target][colour[f]] = none;
      }
      for (auto f : path) {
        colour[f] = colour[f] == a ? b : a;
        at[edges[f].source][colour[f]] = f;
        at[left + edges[f].target][colour[f]] = f;
      }
    }
    colour[e] = a;
    at[u][a] = e;
    at[v][a] = e;
  }
  return colour;
}

// Saturating composed multiplicity along the diagram, enough to compare with small bounds.
std::uint64_t composed_multiplicity(const BratteliDiagram& d, WitnessNode a, WitnessNode b) {
  constexpr std::uint64_t cap = 1ull << 40;
  std::vector<std::uint64_t> row(d.vertex_count(a.level), 0);
  row[a.vertex] = 1;
  for (std::size_t k = a.level; k < b.level; ++k) {
    const Matrix e = d.gap(k);
    std::vector<std::uint64_t> next(e.empty() ? 0 : e.front().size(), 0);
    for (std::size_t v = 0; v < row.size(); ++v)
      if (row[v])
        for (std::size_t w = 0; w < next.size(); ++w)
          if (e[v][w]) next[w] = std::min(cap, next[w] + std::min(cap, row[v] * e[v][w]));
    row = std::move(next);
  }
  return row[b.vertex];
}

}  // namespace

InterpolationCertificate lemma11_construct(const DirectSystem& source, const DirectSystem& target,
                                           std::size_t depth, Variant variant, std::size_t horizon) {
  if (depth == 0) throw ValidationError("depth must be positive");
  const bool ordered = variant != Variant::SelfAdjoint;

  // source prefix, unitized
  DirectSystem src = source;
  src.extend_to(depth);
  {
    std::vector<Algebra> algebras(src.algebras().begin(), src.algebras().begin() + depth);
    std::vector<MatrixUnitHom> embeddings(src.embeddings().begin(), src.embeddings().begin() + (depth - 1));
    src = DirectSystem::make(std::move(algebras), std::move(embeddings), false);
  }
  Unitization uz = unitize(src);
  const DirectSystem& A = uz.system;
  for (const auto& phi : A.embeddings()) {
    for (const auto& list : phi.copies())
      if (list.empty()) throw PreconditionError("source embeddings must be injective");
    if (ordered && !phi.increasing()) throw PreconditionError("ordered variant needs order-preserving source embeddings");
  }

  DirectSystem B = target;
  const BratteliDiagram bd = B.diagram();
  const FermionResult fermion = has_fermion_property(bd, horizon);
  const auto* witness = std::get_if<FermionWitness>(&fermion);
  if (!witness)
    throw FermionUnavailable("target has no Fermion witness (" + std::get<Absent>(fermion).reason + ")",
                             bd.has_tail() ? horizon : bd.materialized_levels());

  auto node_at = [&](std::size_t i) -> WitnessNode {
    auto n = witness->node(i);
    if (!n || n->level > horizon)
      throw FermionUnavailable("witness exhausted before a large enough multiplicity",
                               n ? horizon : witness->chain.back().level);
    return *n;
  };

  InterpolationCertificate cert;
  cert.variant = variant;
  cert.ordered = ordered;
  cert.unitized = uz.changed;
  cert.depth = depth;
  cert.source_algebras = A.algebras();
  cert.source_embeddings = A.embeddings();

  // level 1: a -> [a (+) 0] (+) {0}
  std::size_t node_index = 0;
  {
    const std::size_t need = A.algebra(1).total_size();
    WitnessNode n = node_at(0);
    while (bd.sizes(n.level)[n.vertex] < need) n = node_at(++node_index);
    B.extend_to(n.level);
    const Algebra& b1 = B.algebra(n.level);
    if (ordered && !B.composed(1, n.level).increasing())
      throw PreconditionError("ordered variant needs order-preserving target embeddings");
    std::vector<Elementary> parts;
    std::size_t offset = 0;
    for (std::size_t s = 0; s < A.algebra(1).summands(); ++s) {
      const std::size_t ns = A.algebra(1).size(s);
      parts.push_back({s, iota_list(ns), n.vertex, iota_list(ns, offset)});
      offset += ns;
    }
    cert.target_levels.push_back(n.level);
    cert.distinguished.push_back(n.vertex);
    cert.target_algebras.push_back(b1);
    cert.gamma.push_back(CompressionMap::make(A.algebra(1), b1, std::move(parts), ordered));
  }

  for (std::size_t k = 1; k < depth; ++k) {
    const Algebra& ak = A.algebra(k);
    const Algebra& ak1 = A.algebra(k + 1);
    const MatrixUnitHom& phi = A.embedding(k);
    const CompressionMap& gk = cert.gamma[k - 1];
    const std::size_t vk = cert.distinguished[k - 1];

    // phi copies, grouped by target summand, in block order
    std::vector<PhiCopy> copies;
    for (std::size_t s = 0; s < ak.summands(); ++s)
      for (const auto& c : phi.copies()[s]) copies.push_back({s, c.target, c.indices});
    std::vector<std::size_t> slot(copies.size());
    std::size_t needed = 0;
    if (variant == Variant::SelfAdjoint) {
      slot = bipartite_edge_colouring(copies, ak.summands(), ak1.summands(), needed);
    } else {
      std::vector<std::size_t> order = iota_list(copies.size());
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::pair(copies[x].target, copies[x].positions.front()) <
               std::pair(copies[y].target, copies[y].positions.front());
      });
      std::set<std::pair<std::size_t, std::size_t>> used;  // (m, s)
      std::size_t current = SIZE_MAX, prev = 0;
      for (auto x : order) {
        std::size_t m = 0;
        if (copies[x].target == current) m = prev + 1;
        current = copies[x].target;
        while (used.count({m, copies[x].source})) ++m;
        used.insert({m, copies[x].source});
        slot[x] = m;
        prev = m;
        needed = std::max(needed, m + 1);
      }
    }

    // minimal next witness node with enough multiplicity
    const WitnessNode here = node_at(node_index);
    WitnessNode next;
    for (;;) {
      next = node_at(++node_index);
      if (composed_multiplicity(bd, here, next) >= needed) break;
    }
    B.extend_to(next.level);
    const MatrixUnitHom theta = B.composed(here.level, next.level);
    const Algebra& bk1 = B.algebra(next.level);
    if (ordered && !theta.increasing())
      throw PreconditionError("ordered variant needs order-preserving target embeddings");

    // theta's copies of the distinguished summand inside the next one
    std::vector<std::size_t> distinguished_copies;
    for (std::size_t c = 0; c < theta.copies()[vk].size(); ++c)
      if (theta.copies()[vk][c].target == next.vertex) distinguished_copies.push_back(c);
    if (ordered)
      std::stable_sort(distinguished_copies.begin(), distinguished_copies.end(), [&](std::size_t x, std::size_t y) {
        return theta.copies()[vk][x].indices.front() < theta.copies()[vk][y].indices.front();
      });
    if (distinguished_copies.size() < needed) throw InvariantError("witness multiplicity below requirement");

    // Q[s][m][i]: local index in the next distinguished summand of a_s's entry i in copy m
    auto slot_indices = [&](std::size_t s, std::size_t m) {
      const Elementary& gp = gk.parts()[s];
      const auto& cm = theta.copies()[vk][distinguished_copies[m]].indices;
      std::vector<std::size_t> q(gp.src.size());
      for (std::size_t x = 0; x < gp.src.size(); ++x) q[gp.src[x]] = cm[gp.dst[x]];
      return q;
    };

    std::vector<Elementary> parts;
    std::set<std::pair<std::size_t, std::size_t>> matched;  // (s, theta copy)
    for (std::size_t j = 0; j < ak1.summands(); ++j) {
      std::vector<std::size_t> L(ak1.size(j), SIZE_MAX);
      for (std::size_t x = 0; x < copies.size(); ++x) {
        if (copies[x].target != j) continue;
        const auto q = slot_indices(copies[x].source, slot[x]);
        for (std::size_t i = 0; i < q.size(); ++i) L[copies[x].positions[i]] = q[i];
        matched.insert({copies[x].source, distinguished_copies[slot[x]]});
      }
      if (std::count(L.begin(), L.end(), SIZE_MAX)) throw InvariantError("source embedding is not unital");
      parts.push_back({j, iota_list(ak1.size(j)), next.vertex, std::move(L)});
    }

    // subordination: gamma'_{k+1} lives inside theta_k(range gamma'_k)
    {
      std::set<std::size_t> range;
      for (auto c : distinguished_copies)
        for (std::size_t s = 0; s < ak.summands(); ++s)
          for (auto l : gk.parts()[s].dst) range.insert(theta.copies()[vk][c].indices[l]);
      for (const auto& p : parts)
        for (auto l : p.dst)
          if (!range.count(l)) throw InvariantError("gamma' escapes the image of the previous range");
    }

    // padding: residual parts of theta o gamma_k, read from the canonical copy of each a_s
    std::vector<std::size_t> canonical(ak.summands(), SIZE_MAX);
    for (std::size_t x = 0; x < copies.size(); ++x)
      if (canonical[copies[x].source] == SIZE_MAX) canonical[copies[x].source] = x;
    for (std::size_t g = 0; g < gk.parts().size(); ++g) {
      const Elementary& part = gk.parts()[g];
      const auto& tc = theta.copies()[part.dst_summand];
      for (std::size_t c = 0; c < tc.size(); ++c) {
        if (g < ak.summands() && part.dst_summand == vk && matched.count({g, c})) continue;
        const PhiCopy& can = copies[canonical[part.src_summand]];
        Elementary e{can.target, {}, tc[c].target, {}};
        for (std::size_t x = 0; x < part.src.size(); ++x) {
          e.src.push_back(can.positions[part.src[x]]);
          e.dst.push_back(tc[c].indices[part.dst[x]]);
        }
        parts.push_back(std::move(e));
      }
    }

    CompressionMap gamma_next;
    try {
      gamma_next = CompressionMap::make(ak1, bk1, std::move(parts), ordered);
    } catch (const ValidationError& e) {
      throw InvariantError(std::string("padding could not be placed disjointly: ") + e.what());
    }
    cert.theta.push_back(theta);
    cert.target_levels.push_back(next.level);
    cert.distinguished.push_back(next.vertex);
    cert.target_algebras.push_back(bk1);
    cert.gamma.push_back(std::move(gamma_next));
  }

  for (std::size_t k = 0; k < depth; ++k) {
    auto iso = is_isometric(cert.gamma[k]);
    auto* c = std::get_if<IsometryCertificate>(&iso);
    if (!c) throw InvariantError("constructed gamma is not isometric");
    if (c->chosen != iota_list(cert.gamma[k].domain().summands()))
      throw InvariantError("isometry certificate does not pick gamma'");
    cert.delta.push_back(left_inverse(cert.gamma[k], *c));
    cert.isometry.push_back(std::move(*c));
  }
  for (std::size_t l = cert.target_levels.front(); l < cert.target_levels.back(); ++l)
    cert.target_embeddings.push_back(B.embedding(l));

  cert.report = verify_certificate(cert);
  return cert;
}

// ---- fault injection ------------------------------------------------------------

std::optional<FaultDescription> inject_fault(InterpolationCertificate& cert, std::mt19937_64& rng) {
  if (cert.gamma.empty()) return std::nullopt;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    FaultDescription f;
    f.map = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? "gamma" : "delta";
    f.level = std::uniform_int_distribution<std::size_t>(0, cert.gamma.size() - 1)(rng);
    CompressionMap& map = f.map == "gamma" ? cert.gamma[f.level] : cert.delta[f.level];
    auto parts = map.parts();
    f.part = std::uniform_int_distribution<std::size_t>(0, parts.size() - 1)(rng);
    Elementary& p = parts[f.part];
    // gamma: move a codomain index; delta: move a domain index
    const bool dst_side = f.map == "gamma";
    auto& list = dst_side ? p.dst : p.src;
    const Algebra& alg = dst_side ? map.codomain() : map.domain();
    const std::size_t summand = dst_side ? p.dst_summand : p.src_summand;
    const std::size_t size = alg.size(summand);
    if (size < 2) continue;
    f.position = std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng);
    f.old_index = list[f.position];
    // candidates that keep the map well formed
    std::vector<bool> taken(size, false);
    for (auto i : list) taken[i] = true;
    if (dst_side)
      for (const auto& q : parts)
        if (q.dst_summand == summand)
          for (auto i : q.dst) taken[i] = true;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < size; ++i)
      if (!taken[i]) free.push_back(i);
    if (!free.empty()) {
      f.new_index = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
      list[f.position] = f.new_index;
    } else if (list.size() >= 2) {
      // nothing free: exchange with another position of the same list
      std::size_t other = std::uniform_int_distribution<std::size_t>(0, list.size() - 2)(rng);
      if (other >= f.position) ++other;
      f.new_index = list[other];
      std::swap(list[f.position], list[other]);
    } else {
      continue;
    }
    try {
      map = CompressionMap::make(map.domain(), map.codomain(), std::move(parts), map.ordered());
    } catch (const ValidationError&) {
      continue;
    }
    return f;
  }
  return std::nullopt;
}

}  // namespace bratteli

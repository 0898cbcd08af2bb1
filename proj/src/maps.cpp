#include "bratteli/maps.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <tuple>

#include "bratteli/error.hpp"

namespace bratteli {

namespace {

void check_distinct(const std::vector<std::size_t>& v, std::size_t bound, const std::string& what) {
  std::vector<bool> seen(bound, false);
  for (auto i : v) {
    if (i >= bound) throw ValidationError(what + ": index out of range");
    if (seen[i]) throw ValidationError(what + ": repeated index");
    seen[i] = true;
  }
}

bool strictly_increasing(const std::vector<std::size_t>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

template <class T>
std::vector<T> sorted(std::vector<T> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if constexpr (std::is_same_v<T, Copy>)
      return std::tie(a.target, a.indices) < std::tie(b.target, b.indices);
    else
      return std::tie(a.src_summand, a.src, a.dst_summand, a.dst) <
             std::tie(b.src_summand, b.src, b.dst_summand, b.dst);
  });
  return v;
}

void require_domain(const Algebra& expected, const Element& x) {
  if (!(x.algebra() == expected)) throw ValidationError("element is not in the map's domain");
}

}  // namespace

// ---- MatrixUnitHom -----------------------------------------------------------------

MatrixUnitHom MatrixUnitHom::make(Algebra domain, Algebra codomain, std::vector<std::vector<Copy>> copies) {
  if (copies.size() != domain.summands()) throw ValidationError("one copy list per domain summand");
  std::vector<std::vector<bool>> used(codomain.summands());
  for (std::size_t t = 0; t < codomain.summands(); ++t) used[t].assign(codomain.size(t), false);
  for (std::size_t s = 0; s < copies.size(); ++s)
    for (const auto& c : copies[s]) {
      if (c.target >= codomain.summands()) throw ValidationError("copy target out of range");
      if (c.indices.size() != domain.size(s)) throw ValidationError("copy length differs from summand size");
      check_distinct(c.indices, codomain.size(c.target), "copy");
      for (auto i : c.indices) {
        if (used[c.target][i]) throw ValidationError("copies overlap inside a codomain summand");
        used[c.target][i] = true;
      }
    }
  MatrixUnitHom h;
  h.domain_ = std::move(domain);
  h.codomain_ = std::move(codomain);
  h.copies_ = std::move(copies);
  return h;
}

MatrixUnitHom MatrixUnitHom::identity(const Algebra& algebra) {
  std::vector<std::vector<Copy>> copies(algebra.summands());
  for (std::size_t s = 0; s < algebra.summands(); ++s) {
    Copy c{s, std::vector<std::size_t>(algebra.size(s))};
    std::iota(c.indices.begin(), c.indices.end(), 0);
    copies[s].push_back(std::move(c));
  }
  return make(algebra, algebra, std::move(copies));
}

UnitSum MatrixUnitHom::image(IndexPair unit) const {
  if (!domain_.contains(unit)) throw ValidationError("not a matrix unit of the domain");
  const std::size_t s = domain_.summand_of(unit.row);
  const std::size_t i = unit.row - domain_.offset(s), j = unit.col - domain_.offset(s);
  UnitSum out;
  out.reserve(copies_[s].size());
  for (const auto& c : copies_[s]) {
    const std::size_t off = codomain_.offset(c.target);
    out.push_back({{off + c.indices[i], off + c.indices[j]}, 1});
  }
  normalize(out);
  return out;
}

Element MatrixUnitHom::apply(const Element& x) const {
  require_domain(domain_, x);
  Element out(codomain_);
  for (const auto& [p, v] : x.entries())
    for (const auto& t : image(p)) out.add_to(t.at, v * static_cast<long>(t.coeff));
  return out;
}

Matrix MatrixUnitHom::multiplicities() const {
  Matrix k(domain_.summands(), std::vector<std::uint64_t>(codomain_.summands(), 0));
  for (std::size_t s = 0; s < copies_.size(); ++s)
    for (const auto& c : copies_[s]) ++k[s][c.target];
  return k;
}

bool MatrixUnitHom::unital() const {
  std::vector<std::size_t> covered(codomain_.summands(), 0);
  for (const auto& list : copies_)
    for (const auto& c : list) covered[c.target] += c.indices.size();
  for (std::size_t t = 0; t < covered.size(); ++t)
    if (covered[t] != codomain_.size(t)) return false;
  return true;
}

bool MatrixUnitHom::increasing() const {
  for (const auto& list : copies_)
    for (const auto& c : list)
      if (!strictly_increasing(c.indices)) return false;
  return true;
}

bool MatrixUnitHom::same_map(const MatrixUnitHom& o) const {
  if (!(domain_ == o.domain_ && codomain_ == o.codomain_)) return false;
  for (std::size_t s = 0; s < copies_.size(); ++s)
    if (sorted(copies_[s]) != sorted(o.copies_[s])) return false;
  return true;
}

// ---- CompressionMap -----------------------------------------------------------------

CompressionMap CompressionMap::make(Algebra domain, Algebra codomain, std::vector<Elementary> parts,
                                    bool ordered) {
  std::vector<std::vector<bool>> used(codomain.summands());
  for (std::size_t t = 0; t < codomain.summands(); ++t) used[t].assign(codomain.size(t), false);
  for (const auto& p : parts) {
    if (p.src_summand >= domain.summands() || p.dst_summand >= codomain.summands())
      throw ValidationError("elementary summand index out of range");
    if (p.src.empty() || p.src.size() != p.dst.size())
      throw ValidationError("elementary index lists must be nonempty and of equal length");
    check_distinct(p.src, domain.size(p.src_summand), "elementary domain list");
    check_distinct(p.dst, codomain.size(p.dst_summand), "elementary codomain list");
    if (ordered && !(strictly_increasing(p.src) && strictly_increasing(p.dst)))
      throw ValidationError("ordered map needs increasing index lists");
    for (auto l : p.dst) {
      if (used[p.dst_summand][l]) throw ValidationError("elementary summands overlap in the codomain");
      used[p.dst_summand][l] = true;
    }
  }
  CompressionMap m;
  m.domain_ = std::move(domain);
  m.codomain_ = std::move(codomain);
  m.parts_ = std::move(parts);
  m.ordered_ = ordered;
  m.index();
  return m;
}

void CompressionMap::index() {
  lookup_.assign(domain_.total_size(), {});
  for (std::uint32_t k = 0; k < parts_.size(); ++k) {
    const auto& p = parts_[k];
    const std::size_t off = domain_.offset(p.src_summand);
    for (std::uint32_t x = 0; x < p.src.size(); ++x) lookup_[off + p.src[x]].push_back({k, x});
  }
}

CompressionMap CompressionMap::from_hom(const MatrixUnitHom& hom) {
  std::vector<Elementary> parts;
  for (std::size_t s = 0; s < hom.copies().size(); ++s) {
    std::vector<std::size_t> all(hom.domain().size(s));
    std::iota(all.begin(), all.end(), 0);
    for (const auto& c : hom.copies()[s]) parts.push_back({s, all, c.target, c.indices});
  }
  return make(hom.domain(), hom.codomain(), std::move(parts), hom.increasing());
}

CompressionMap CompressionMap::identity(const Algebra& algebra) {
  return from_hom(MatrixUnitHom::identity(algebra));
}

UnitSum CompressionMap::image(IndexPair unit) const {
  if (!domain_.contains(unit)) throw ValidationError("not a matrix unit of the domain");
  const auto& a = lookup_[unit.row];
  const auto& b = lookup_[unit.col];
  UnitSum out;
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      const auto& p = parts_[ia->first];
      const std::size_t off = codomain_.offset(p.dst_summand);
      out.push_back({{off + p.dst[ia->second], off + p.dst[ib->second]}, 1});
      ++ia;
      ++ib;
    }
  }
  normalize(out);
  return out;
}

Element CompressionMap::apply(const Element& x) const {
  require_domain(domain_, x);
  Element out(codomain_);
  for (const auto& [p, v] : x.entries())
    for (const auto& t : image(p)) out.add_to(t.at, v * static_cast<long>(t.coeff));
  return out;
}

bool CompressionMap::same_map(const CompressionMap& o) const {
  return domain_ == o.domain_ && codomain_ == o.codomain_ && sorted(parts_) == sorted(o.parts_);
}

// ---- composition ------------------------------------------------------------------------

MatrixUnitHom compose(const MatrixUnitHom& f, const MatrixUnitHom& g) {
  if (!(g.codomain() == f.domain())) throw ValidationError("cannot compose: algebra mismatch");
  std::vector<std::vector<Copy>> copies(g.domain().summands());
  for (std::size_t s = 0; s < copies.size(); ++s)
    for (const auto& c : g.copies()[s])
      for (const auto& d : f.copies()[c.target]) {
        Copy e{d.target, {}};
        for (auto i : c.indices) e.indices.push_back(d.indices[i]);
        copies[s].push_back(std::move(e));
      }
  return MatrixUnitHom::make(g.domain(), f.codomain(), std::move(copies));
}

CompressionMap compose(const CompressionMap& f, const CompressionMap& g) {
  if (!(g.codomain() == f.domain())) throw ValidationError("cannot compose: algebra mismatch");
  std::vector<Elementary> parts;
  for (const auto& p : g.parts())
    for (const auto& q : f.parts()) {
      if (p.dst_summand != q.src_summand) continue;
      // position of each middle index inside q.src
      std::vector<std::size_t> where(f.domain().size(q.src_summand), SIZE_MAX);
      for (std::size_t x = 0; x < q.src.size(); ++x) where[q.src[x]] = x;
      Elementary e{p.src_summand, {}, q.dst_summand, {}};
      for (std::size_t y = 0; y < p.dst.size(); ++y) {
        const std::size_t x = where[p.dst[y]];
        if (x == SIZE_MAX) continue;
        e.src.push_back(p.src[y]);
        e.dst.push_back(q.dst[x]);
      }
      if (!e.src.empty()) parts.push_back(std::move(e));
    }
  return CompressionMap::make(g.domain(), f.codomain(), std::move(parts), f.ordered() && g.ordered());
}

CompressionMap compose(const MatrixUnitHom& f, const CompressionMap& g) {
  return compose(CompressionMap::from_hom(f), g);
}

CompressionMap compose(const CompressionMap& f, const MatrixUnitHom& g) {
  return compose(f, CompressionMap::from_hom(g));
}

CompressionMap direct_sum(const CompressionMap& f, const CompressionMap& g) {
  if (!(f.domain() == g.domain() && f.codomain() == g.codomain()))
    throw ValidationError("direct sum needs equal domains and codomains");
  auto parts = f.parts();
  parts.insert(parts.end(), g.parts().begin(), g.parts().end());
  return CompressionMap::make(f.domain(), f.codomain(), std::move(parts), f.ordered() && g.ordered());
}

// ---- constructors ---------------------------------------------------------------------------

MatrixUnitHom refinement_embedding(std::size_t n, std::size_t t) {
  if (n == 0 || t == 0) throw ValidationError("sizes must be positive");
  std::vector<Copy> copies;
  for (std::size_t m = 0; m < t; ++m) {
    Copy c{0, {}};
    for (std::size_t i = 0; i < n; ++i) c.indices.push_back(i * t + m);
    copies.push_back(std::move(c));
  }
  return MatrixUnitHom::make(Algebra::make({n}), Algebra::make({n * t}), {std::move(copies)});
}

MatrixUnitHom standard_embedding(std::size_t n, std::size_t t) {
  if (n == 0 || t == 0) throw ValidationError("sizes must be positive");
  std::vector<Copy> copies;
  for (std::size_t m = 0; m < t; ++m) {
    Copy c{0, {}};
    for (std::size_t i = 0; i < n; ++i) c.indices.push_back(m * n + i);
    copies.push_back(std::move(c));
  }
  return MatrixUnitHom::make(Algebra::make({n}), Algebra::make({n * t}), {std::move(copies)});
}

MatrixUnitHom twist_embedding(std::size_t n, std::size_t t, const std::vector<std::size_t>& u) {
  if (n == 0 || t == 0) throw ValidationError("sizes must be positive");
  if (u.size() != t) throw ValidationError("twist permutation must act on t points");
  check_distinct(u, t, "twist permutation");
  std::vector<Copy> copies;
  for (std::size_t m = 0; m < t; ++m) {
    Copy c{0, {}};
    for (std::size_t i = 0; i + 1 < n; ++i) c.indices.push_back(i * t + m);
    c.indices.push_back((n - 1) * t + u[m]);
    copies.push_back(std::move(c));
  }
  return MatrixUnitHom::make(Algebra::make({n}), Algebra::make({n * t}), {std::move(copies)});
}

MatrixUnitHom ordered_diagram_embedding(const Algebra& domain, const Algebra& codomain, const GapOrder& order) {
  if (order.size() != codomain.summands()) throw ValidationError("one occurrence list per target summand");
  std::vector<std::vector<Copy>> copies(domain.summands());
  for (std::size_t w = 0; w < order.size(); ++w) {
    std::size_t pos = 0;
    for (const auto& occ : order[w]) {
      const std::size_t len = occ.source ? domain.size(*occ.source) : occ.zero_size;
      if (occ.source && *occ.source >= domain.summands())
        throw ValidationError("occurrence source out of range");
      if (pos + len > codomain.size(w)) throw ValidationError("occurrences overflow the target summand");
      if (occ.source) {
        Copy c{w, std::vector<std::size_t>(len)};
        std::iota(c.indices.begin(), c.indices.end(), pos);
        copies[*occ.source].push_back(std::move(c));
      }
      pos += len;
    }
  }
  return MatrixUnitHom::make(domain, codomain, std::move(copies));
}

// ---- isometries ---------------------------------------------------------------------------------

IsometryResult is_isometric(const CompressionMap& map) {
  const Algebra& dom = map.domain();
  IsometryCertificate cert;
  std::vector<std::vector<Copy>> copies(dom.summands());
  for (std::size_t s = 0; s < dom.summands(); ++s) {
    const std::size_t n = dom.size(s);
    std::size_t chosen = SIZE_MAX;
    for (std::size_t k = 0; k < map.parts().size() && chosen == SIZE_MAX; ++k) {
      const auto& p = map.parts()[k];
      if (p.src_summand == s && p.src.size() == n) chosen = k;
    }
    if (chosen == SIZE_MAX) {
      // an uncovered unit maps to zero; otherwise the all-ones block shrinks in norm
      std::vector<std::vector<bool>> covered(n, std::vector<bool>(n, false));
      for (const auto& p : map.parts())
        if (p.src_summand == s)
          for (auto a : p.src)
            for (auto b : p.src) covered[a][b] = true;
      NotIsometric bad{s, Element(dom), ""};
      for (std::size_t i = 0; i < n && bad.explanation.empty(); ++i)
        for (std::size_t j = 0; j < n && bad.explanation.empty(); ++j)
          if (!covered[i][j]) {
            bad.witness = matrix_unit(dom, s, i, j);
            bad.explanation = "matrix unit (" + std::to_string(i) + "," + std::to_string(j) +
                              ") of summand " + std::to_string(s) + " maps to zero";
          }
      if (bad.explanation.empty()) {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) bad.witness.set({dom.global(s, i), dom.global(s, j)}, 1);
        bad.explanation = "no elementary summand covers summand " + std::to_string(s) +
                          "; its all-ones matrix loses norm";
      }
      return bad;
    }
    cert.chosen.push_back(chosen);
    const auto& p = map.parts()[chosen];
    Copy c{p.dst_summand, std::vector<std::size_t>(n)};
    for (std::size_t x = 0; x < n; ++x) c.indices[p.src[x]] = p.dst[x];
    copies[s].push_back(std::move(c));
  }
  cert.gamma_prime = MatrixUnitHom::make(dom, map.codomain(), std::move(copies));
  return cert;
}

CompressionMap left_inverse(const CompressionMap& map, const IsometryCertificate& cert) {
  const Algebra& dom = map.domain();
  if (cert.chosen.size() != dom.summands()) throw ValidationError("certificate has the wrong length");
  std::vector<Elementary> parts;
  for (std::size_t s = 0; s < dom.summands(); ++s) {
    if (cert.chosen[s] >= map.parts().size()) throw ValidationError("certificate names a missing part");
    const auto& p = map.parts()[cert.chosen[s]];
    if (p.src_summand != s || p.src.size() != dom.size(s))
      throw ValidationError("certificate part does not cover its summand");
    parts.push_back({p.dst_summand, p.dst, s, p.src});
  }
  return CompressionMap::make(map.codomain(), dom, std::move(parts), map.ordered());
}

Standardization standardize(const MatrixUnitHom& hom) {
  const Algebra& dom = hom.domain();
  const Algebra& cod = hom.codomain();
  Standardization out;
  out.multiplicities = hom.multiplicities();
  out.permutation.assign(cod.total_size(), SIZE_MAX);
  out.offsets.assign(cod.summands(), std::vector<std::size_t>(dom.summands(), 0));
  out.zero_block.assign(cod.summands(), 0);
  std::vector<std::size_t> fill(cod.summands(), 0);
  std::vector<std::vector<Copy>> copies(dom.summands());
  for (std::size_t s = 0; s < dom.summands(); ++s) {
    for (std::size_t t = 0; t < cod.summands(); ++t) out.offsets[t][s] = fill[t];
    for (const auto& c : hom.copies()[s]) {
      Copy e{c.target, {}};
      for (auto i : c.indices) {
        out.permutation[cod.global(c.target, i)] = cod.global(c.target, fill[c.target]);
        e.indices.push_back(fill[c.target]++);
      }
      copies[s].push_back(std::move(e));
    }
  }
  for (std::size_t t = 0; t < cod.summands(); ++t) {
    out.zero_block[t] = cod.size(t) - fill[t];
    for (std::size_t i = 0; i < cod.size(t); ++i) {
      const std::size_t g = cod.global(t, i);
      if (out.permutation[g] == SIZE_MAX) out.permutation[g] = cod.global(t, fill[t]++);
    }
  }
  out.standardized = MatrixUnitHom::make(dom, cod, std::move(copies));
  return out;
}

CompressionMap restrict_to_triangular(const CompressionMap& map) {
  if (!map.ordered()) throw PreconditionError("triangular restriction needs an ordered map");
  for (const auto& u : triangular_basis(map.domain()))
    for (const auto& t : map.image(u))
      if (t.at.row > t.at.col) throw InvariantError("ordered map sends an upper unit below the diagonal");
  return map;
}

CompressionMap tensor_with_identity(const CompressionMap& map, std::size_t d) {
  if (d == 0) throw ValidationError("tensor factor must be positive");
  std::vector<Elementary> parts;
  for (const auto& p : map.parts()) {
    Elementary e{p.src_summand, {}, p.dst_summand, {}};
    for (std::size_t x = 0; x < p.src.size(); ++x)
      for (std::size_t a = 0; a < d; ++a) {
        e.src.push_back(p.src[x] * d + a);
        e.dst.push_back(p.dst[x] * d + a);
      }
    parts.push_back(std::move(e));
  }
  return CompressionMap::make(tensor_with_matrix(map.domain(), d), tensor_with_matrix(map.codomain(), d),
                              std::move(parts), map.ordered());
}

MatrixUnitHom tensor_with_identity(const MatrixUnitHom& hom, std::size_t d) {
  if (d == 0) throw ValidationError("tensor factor must be positive");
  std::vector<std::vector<Copy>> copies(hom.copies().size());
  for (std::size_t s = 0; s < copies.size(); ++s)
    for (const auto& c : hom.copies()[s]) {
      Copy e{c.target, {}};
      for (auto i : c.indices)
        for (std::size_t a = 0; a < d; ++a) e.indices.push_back(i * d + a);
      copies[s].push_back(std::move(e));
    }
  return MatrixUnitHom::make(tensor_with_matrix(hom.domain(), d), tensor_with_matrix(hom.codomain(), d),
                             std::move(copies));
}

Element kron(const Element& x, const Element& y) {
  if (y.algebra().summands() != 1) throw ValidationError("second factor must be a full matrix algebra");
  const std::size_t d = y.algebra().size(0);
  const Algebra& a = x.algebra();
  Element out(tensor_with_matrix(a, d));
  for (const auto& [p, v] : x.entries()) {
    const std::size_t s = a.summand_of(p.row);
    const std::size_t off = a.offset(s);
    const std::size_t new_off = out.algebra().offset(s);
    for (const auto& [q, w] : y.entries())
      out.set({new_off + (p.row - off) * d + q.row, new_off + (p.col - off) * d + q.col}, v * w);
  }
  return out;
}

}  // namespace bratteli

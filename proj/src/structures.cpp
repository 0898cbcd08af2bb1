#include "bratteli/structures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include "bratteli/error.hpp"
#include "bratteli/norm.hpp"

namespace bratteli {

std::string to_string(CornerVariant v) {
  return v == CornerVariant::Refinement ? "refinement" : "standard";
}

CornerVariant parse_corner_variant(const std::string& text) {
  if (text == "refinement") return CornerVariant::Refinement;
  if (text == "standard") return CornerVariant::Standard;
  throw ValidationError("unknown corner variant '" + text + "'");
}

namespace {

// Diagonal support of the image of e_qq at `from` inside level `to`.
std::vector<std::size_t> diagonal_image(const DirectSystem& sys, std::size_t from, std::size_t q,
                                        std::size_t to) {
  std::vector<std::size_t> out;
  for (const auto& t : sys.composed(from, to).image({q, q})) {
    if (t.at.row != t.at.col || t.coeff != 1) throw InvariantError("projection image is not diagonal");
    out.push_back(t.at.row);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  return both.empty();
}

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-8, 8), den(1, 8);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

}  // namespace

CornerStructure c0_structure(CornerVariant variant, std::size_t levels, std::size_t level_budget) {
  if (levels == 0) throw ValidationError("need at least one level");
  const bool refinement = variant == CornerVariant::Refinement;
  DirectSystem sys = uhf_system(2, 2, refinement);

  CornerStructure out;
  out.family.variant = variant;
  if (refinement) {
    for (std::size_t j = 1; j <= levels; ++j) {
      out.family.levels.push_back(j);
      out.family.indices.push_back((std::size_t{1} << j) - 2);
    }
  } else {
    // smallest-first: at each level the least diagonal unit avoiding the
    // earlier projections and the last diagonal entry
    std::size_t level = 1;
    while (out.family.levels.size() < levels) {
      if (level > level_budget)
        throw ConstructionNotFound("standard corner search exhausted " + std::to_string(level_budget) +
                                   " levels with " + std::to_string(out.family.levels.size()) +
                                   " projections");
      sys.extend_to(level);
      const std::size_t n = sys.algebra(level).total_size();
      std::vector<bool> taken(n, false);
      for (std::size_t i = 0; i < out.family.levels.size(); ++i)
        for (auto g : diagonal_image(sys, out.family.levels[i], out.family.indices[i], level)) taken[g] = true;
      std::optional<std::size_t> found;
      for (std::size_t q = 0; q + 1 < n && !found; ++q)
        if (!taken[q]) found = q;
      if (found) {
        out.family.levels.push_back(level);
        out.family.indices.push_back(*found);
        out.family.search_log.push_back("level " + std::to_string(level) + ": q = " + std::to_string(*found));
      } else {
        out.family.search_log.push_back("level " + std::to_string(level) + ": no free diagonal unit");
      }
      ++level;
    }
  }

  const std::size_t K = out.family.levels.back();
  out.top_level = K;
  sys.extend_to(K);
  const Algebra& top = sys.algebra(K);
  const std::size_t last = top.total_size() - 1;

  for (std::size_t j = 0; j < out.family.levels.size(); ++j)
    out.supports.push_back(diagonal_image(sys, out.family.levels[j], out.family.indices[j], K));

  out.orthogonal = true;
  for (std::size_t i = 0; i < out.supports.size(); ++i)
    for (std::size_t j = i + 1; j < out.supports.size(); ++j)
      if (!disjoint(out.supports[i], out.supports[j])) out.orthogonal = false;
  if (!out.orthogonal) throw InvariantError("corner projections overlap at level " + std::to_string(K));

  out.inside_f0 = std::none_of(out.supports.begin(), out.supports.end(), [&](const auto& s) {
    return std::find(s.begin(), s.end(), last) != s.end();
  });

  out.embeddings_keep_f0 = true;
  for (std::size_t k = 1; k < K; ++k) {
    const auto& e = sys.embedding(k);
    const std::size_t n = e.domain().total_size(), m = e.codomain().total_size();
    for (const auto& u : e.domain().basis()) {
      if (u.row == n - 1 && u.col == n - 1) continue;
      for (const auto& t : e.image(u))
        if (t.at.row == m - 1 && t.at.col == m - 1) out.embeddings_keep_f0 = false;
    }
  }

  std::vector<Elementary> parts;
  for (const auto& s : out.supports) parts.push_back({0, s, 0, s});
  out.expectation = CompressionMap::make(top, top, std::move(parts), true);
  out.idempotent = compose(out.expectation, out.expectation).same_map(out.expectation);
  return out;
}

NormSampleReport c0_norm_samples(const CornerStructure& s, std::size_t samples, std::uint64_t seed,
                                 double tolerance) {
  NormSampleReport r;
  r.samples = samples;
  r.worst_excess = -INFINITY;
  std::mt19937_64 rng(seed);
  const Algebra& a = s.expectation.domain();
  for (std::size_t i = 0; i < samples; ++i) {
    Element x(a);
    for (const auto& u : a.basis()) x.set(u, random_rational(rng));
    const double excess = operator_norm(s.expectation.apply(x)) - operator_norm(x);
    r.worst_excess = std::max(r.worst_excess, excess);
    if (excess > tolerance) r.passed = false;
  }
  if (samples == 0) r.worst_excess = 0;
  return r;
}

LexicographicProduct lexicographic_product(std::size_t s, std::size_t r) {
  if (s == 0 || r == 0) throw ValidationError("sizes must be positive");
  LexicographicProduct out{s, r, {}, 0, false};
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i; j < s; ++j)
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = (i == j ? a : 0); b < r; ++b) out.basis.push_back({i * r + a, j * r + b});
  std::sort(out.basis.begin(), out.basis.end());
  out.dimension = out.basis.size();
  out.equals_lex_triangular = out.basis == triangular_basis(Algebra::make({s * r}));
  return out;
}

// ---- twist split ---------------------------------------------------------------

bool TwistReport::passed() const {
  for (const auto& l : levels)
    if (!(l.split_bijective && l.agrees_with_refinement && l.square_commutes)) return false;
  return norms_ok && identity_is_refinement;
}

namespace {

struct Split {
  UnitSum minus, column;
};

Split split(const UnitSum& x, std::size_t n) {
  Split s;
  for (const auto& t : x) (t.at.col + 1 == n ? s.column : s.minus).push_back(t);
  return s;
}

UnitSum image_of(const MatrixUnitHom& h, const UnitSum& x) {
  UnitSum out;
  for (const auto& t : x)
    for (auto u : h.image(t.at)) {
      u.coeff *= t.coeff;
      out.push_back(u);
    }
  normalize(out);
  return out;
}

bool upper_only(const UnitSum& x) {
  return std::all_of(x.begin(), x.end(), [](const Term& t) { return t.at.row <= t.at.col; });
}

}  // namespace

TwistReport twist_decomposition(const DirectSystem& system, std::size_t depth, std::size_t samples,
                                std::uint64_t seed, double tolerance) {
  const Generator& g = system.generator();
  if (g.kind != GeneratorKind::Twist) throw PreconditionError("system is not generated by twist embeddings");
  if (depth == 0) throw ValidationError("depth must be positive");
  DirectSystem sys = system;
  sys.extend_to(depth);

  TwistReport rep;
  for (std::size_t k = 1; k <= depth; ++k) {
    const Algebra& a = sys.algebra(k);
    const std::size_t n = a.total_size();
    TwistLevelReport lr;
    lr.level = k;
    lr.size = n;
    const Element last_unit = matrix_unit(a, 0, n - 1, n - 1);
    const Element complement = add(Element::identity(a), scale(last_unit, -1));
    std::set<std::pair<int, IndexPair>> hit;  // (side, unit)
    bool ok = true;
    const auto tri = triangular_basis(a);
    for (const auto& u : tri) {
      const Element e = matrix_unit(a, 0, u.row, u.col);
      const Element lo = e * complement, hi = e * last_unit;
      if (lo + hi != e || (lo.is_zero() == hi.is_zero())) ok = false;
      if (!lo.is_zero()) {
        lr.minus_dimension++;
        hit.insert({0, lo.entries().begin()->first});
      } else {
        lr.column_dimension++;
        hit.insert({1, hi.entries().begin()->first});
      }
    }
    lr.split_bijective = ok && hit.size() == tri.size() && lr.minus_dimension == n * (n - 1) / 2 &&
                         lr.column_dimension == n;

    if (k < depth) {
      const auto& tau = sys.embedding(k);
      const std::size_t t = sys.algebra(k + 1).total_size() / n;
      const MatrixUnitHom rho = refinement_embedding(n, t);
      const std::size_t m = n * t;
      lr.agrees_with_refinement = true;
      lr.square_commutes = true;
      for (const auto& u : tri) {
        const UnitSum x{{u, 1}};
        const Split below = split(x, n);
        const UnitSum tx = image_of(tau, x);
        if (!upper_only(tx)) lr.square_commutes = false;
        if (!below.minus.empty() && tx != image_of(rho, below.minus)) lr.agrees_with_refinement = false;
        // beta(x_-, x_c) = (rho(x_-) + tau(x_c)(1-e), tau(x_c)e)
        const Split tc = split(image_of(tau, below.column), m);
        UnitSum beta_minus = image_of(rho, below.minus);
        beta_minus.insert(beta_minus.end(), tc.minus.begin(), tc.minus.end());
        normalize(beta_minus);
        const Split above = split(tx, m);
        UnitSum am = above.minus, ac = above.column, bc = tc.column;
        normalize(am);
        normalize(ac);
        normalize(bc);
        if (am != beta_minus || ac != bc) lr.square_commutes = false;
      }
    } else {
      lr.agrees_with_refinement = lr.square_commutes = true;  // no outgoing embedding checked
    }
    rep.levels.push_back(lr);
  }

  // two-sided bounds at the top level
  std::mt19937_64 rng(seed);
  const Algebra& top = sys.algebra(depth);
  const std::size_t n = top.total_size();
  rep.samples = samples;
  rep.worst_lower = rep.worst_upper = samples ? -INFINITY : 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Element a(top), lo(top), hi(top);
    for (const auto& u : triangular_basis(top)) {
      const Rational v = random_rational(rng);
      a.set(u, v);
      (u.col + 1 == n ? hi : lo).set(u, v);
    }
    const double na = operator_norm(a), mx = std::max(operator_norm(lo), operator_norm(hi));
    rep.worst_lower = std::max(rep.worst_lower, mx - na);
    rep.worst_upper = std::max(rep.worst_upper, na - 2 * mx);
    if (mx > na + tolerance || na > 2 * mx + tolerance) rep.norms_ok = false;
  }

  bool identity = true;
  for (const auto& p : g.permutations)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != i) identity = false;
  if (identity) {
    rep.identity_is_refinement = true;
    for (std::size_t k = 1; k < depth; ++k) {
      const auto& tau = sys.embedding(k);
      const std::size_t d = tau.domain().total_size(), t = tau.codomain().total_size() / d;
      if (!tau.same_map(refinement_embedding(d, t))) rep.identity_is_refinement = false;
    }
  } else {
    rep.identity_is_refinement = true;  // nothing to compare
  }
  return rep;
}

// ---- injections M_2 -> T_m ---------------------------------------------------------------

namespace {

using Rook = std::vector<std::pair<std::size_t, std::size_t>>;  // (row, col), col >= row

void rooks(std::size_t m, std::size_t row, std::vector<bool>& used, Rook& cur, std::vector<Rook>& out) {
  if (row == m) {
    if (!cur.empty()) out.push_back(cur);
    return;
  }
  rooks(m, row + 1, used, cur, out);
  for (std::size_t c = row; c < m; ++c) {
    if (used[c]) continue;
    used[c] = true;
    cur.push_back({row, c});
    rooks(m, row + 1, used, cur, out);
    cur.pop_back();
    used[c] = false;
  }
}

class InjectionSearch {
 public:
  explicit InjectionSearch(std::size_t m) : m_(m) {
    std::vector<bool> used(m, false);
    Rook cur;
    rooks(m, 0, used, cur, cands_);
    for (int i = -1; i <= 2; ++i)
      for (int j = -1; j <= 2; ++j)
        for (int k = -1; k <= 2; ++k)
          for (int l = -1; l <= 2; ++l)
            if (i || j || k || l) grid_.push_back({double(i), double(j), double(k), double(l)});
    grid_.push_back({0.5, -1, 2, 0.5});
    grid_.push_back({1, 0.5, -0.5, 1});
  }

  std::optional<std::array<std::size_t, 4>> run(std::uint64_t& tried) {
    std::array<std::size_t, 4> pick{};
    if (descend(0, pick, tried)) return pick;
    return std::nullopt;
  }

  const Rook& candidate(std::size_t i) const { return cands_[i]; }

 private:
  static double source_norm(const std::array<double, 4>& c) {
    return largest_singular_value(c, 2, 2);
  }

  double image_norm(const std::array<std::size_t, 4>& pick, std::size_t count,
                    const std::array<double, 4>& c) const {
    std::vector<double> a(m_ * m_, 0.0);
    for (std::size_t u = 0; u < count; ++u)
      if (c[u] != 0)
        for (auto [r, col] : cands_[pick[u]]) a[r * m_ + col] += c[u];
    return largest_singular_value(a, m_, m_);
  }

  // all grid points supported on the first `count` units
  bool consistent(const std::array<std::size_t, 4>& pick, std::size_t count) const {
    for (const auto& c : grid_) {
      bool inside = c[count - 1] != 0;
      for (std::size_t u = count; u < 4; ++u)
        if (c[u] != 0) inside = false;
      if (!inside) continue;
      if (std::abs(image_norm(pick, count, c) - source_norm(c)) > 1e-9) return false;
    }
    return true;
  }

  bool descend(std::size_t depth, std::array<std::size_t, 4>& pick, std::uint64_t& tried) {
    if (depth == 4) return true;
    for (std::size_t i = 0; i < cands_.size(); ++i) {
      pick[depth] = i;
      if (depth == 3) ++tried;
      if (consistent(pick, depth + 1) && descend(depth + 1, pick, tried)) return true;
    }
    return false;
  }

  std::size_t m_;
  std::vector<Rook> cands_;
  std::vector<std::array<double, 4>> grid_;
};

}  // namespace

std::vector<InjectionVerdict> remark24_search(std::size_t m_max) {
  if (m_max == 0 || m_max > 6) throw ValidationError("m_max must lie in 1..6");
  std::vector<InjectionVerdict> out;
  for (std::size_t m = 1; m <= m_max; ++m) {
    InjectionVerdict v;
    v.m = m;
    if (m * (m + 1) / 2 < 4) {
      v.reason = "dim T_" + std::to_string(m) + " = " + std::to_string(m * (m + 1) / 2) + " < 4";
      out.push_back(v);
      continue;
    }
    InjectionSearch search(m);
    auto found = search.run(v.candidates);
    if (found) {
      v.feasible = true;
      for (auto i : *found) {
        UnitSum s;
        for (auto [r, c] : search.candidate(i)) s.push_back({{r, c}, 1});
        v.witness.push_back(std::move(s));
      }
      v.reason = "isometric on every grid element";
    } else {
      v.reason = "no assignment of partial permutations passes the grid";
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace bratteli

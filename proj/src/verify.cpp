// Independent re-check of an interpolation certificate on the matrix-unit basis.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <variant>

#include "bratteli/error.hpp"
#include "bratteli/interpolation.hpp"

namespace bratteli {

namespace {

// Matrix units of an algebra by position, without materializing the basis.
class UnitIndex {
 public:
  explicit UnitIndex(const Algebra& a) : algebra_(a) {
    std::size_t total = 0;
    for (auto n : a.sizes()) {
      start_.push_back(total);
      total += n * n;
    }
    count_ = total;
  }
  std::size_t count() const { return count_; }
  IndexPair at(std::size_t idx) const {
    const std::size_t s = std::upper_bound(start_.begin(), start_.end(), idx) - start_.begin() - 1;
    const std::size_t n = algebra_.size(s), r = idx - start_[s];
    return {algebra_.offset(s) + r / n, algebra_.offset(s) + r % n};
  }

 private:
  const Algebra& algebra_;
  std::vector<std::size_t> start_;
  std::size_t count_ = 0;
};

template <class Map>
UnitSum apply_sum(const Map& m, const UnitSum& x) {
  UnitSum out;
  for (const auto& t : x)
    for (auto u : m.image(t.at)) {
      u.coeff *= t.coeff;
      out.push_back(u);
    }
  normalize(out);
  return out;
}

UnitSum unit(IndexPair p) { return {{p, 1}}; }

// Least index in [0, n) for which ok() fails, or SIZE_MAX.
template <class F>
std::size_t first_bad(std::size_t n, F&& ok, bool parallel) {
  std::size_t best = SIZE_MAX;
  const auto count = static_cast<std::int64_t>(n);
  if (parallel) {
#pragma omp parallel for reduction(min : best) schedule(dynamic, 512)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      if (idx >= best) continue;
      bool good = false;
      try {
        good = ok(idx);
      } catch (...) {
        good = false;
      }
      if (!good) best = idx;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      bool good = false;
      try {
        good = ok(i);
      } catch (...) {
        good = false;
      }
      if (!good) return i;
    }
  }
  return best;
}

std::string describe(IndexPair p) {
  return "e(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

CheckRecord unit_check(const std::string& name, std::size_t level, const Algebra& domain, bool parallel,
                       const std::function<bool(IndexPair)>& ok, const std::string& what) {
  UnitIndex units(domain);
  const std::size_t bad = first_bad(units.count(), [&](std::size_t i) { return ok(units.at(i)); }, parallel);
  CheckRecord r{name, level, bad == SIZE_MAX, std::nullopt, what};
  if (bad != SIZE_MAX) {
    r.counterexample = units.at(bad);
    r.detail = what + " fails at " + describe(*r.counterexample);
  }
  return r;
}

std::string wellformed_problem(const InterpolationCertificate& c) {
  const std::size_t K = c.depth;
  if (K == 0) return "depth is zero";
  if (c.source_algebras.size() != K || c.source_embeddings.size() + 1 != K) return "source prefix length";
  if (c.target_levels.size() != K || c.distinguished.size() != K || c.target_algebras.size() != K)
    return "target level data length";
  if (c.gamma.size() != K || c.delta.size() != K || c.isometry.size() != K) return "map count";
  if (c.theta.size() + 1 != K) return "theta count";
  for (std::size_t k = 0; k + 1 < K; ++k) {
    if (c.target_levels[k] >= c.target_levels[k + 1]) return "target levels not increasing";
    if (!(c.source_embeddings[k].domain() == c.source_algebras[k] &&
          c.source_embeddings[k].codomain() == c.source_algebras[k + 1]))
      return "source embedding " + std::to_string(k + 1) + " mismatched";
    if (!(c.theta[k].domain() == c.target_algebras[k] && c.theta[k].codomain() == c.target_algebras[k + 1]))
      return "theta " + std::to_string(k + 1) + " mismatched";
  }
  if (c.target_embeddings.size() != c.target_levels.back() - c.target_levels.front())
    return "target embedding count";
  for (std::size_t i = 0; i + 1 < c.target_embeddings.size(); ++i)
    if (!(c.target_embeddings[i].codomain() == c.target_embeddings[i + 1].domain()))
      return "target embeddings do not chain";
  for (std::size_t k = 0; k < K; ++k) {
    if (!(c.gamma[k].domain() == c.source_algebras[k] && c.gamma[k].codomain() == c.target_algebras[k]))
      return "gamma " + std::to_string(k + 1) + " mismatched";
    if (!(c.delta[k].domain() == c.target_algebras[k] && c.delta[k].codomain() == c.source_algebras[k]))
      return "delta " + std::to_string(k + 1) + " mismatched";
    if (c.distinguished[k] >= c.target_algebras[k].summands()) return "distinguished summand out of range";
    if (c.ordered && !(c.gamma[k].ordered() && c.delta[k].ordered()))
      return "ordered certificate with unordered map at level " + std::to_string(k + 1);
    const std::size_t off = c.target_levels[k] - c.target_levels.front();
    if (off < c.target_embeddings.size() && !(c.target_embeddings[off].domain() == c.target_algebras[k]))
      return "target embedding does not start at level " + std::to_string(c.target_levels[k]);
  }
  return {};
}

CheckRecord isometry_check(const InterpolationCertificate& c, std::size_t k) {
  const CompressionMap& g = c.gamma[k];
  const IsometryCertificate& iso = c.isometry[k];
  const Algebra& a = g.domain();
  CheckRecord r{"isometry", k + 1, true, std::nullopt, "chosen summands form gamma'"};
  auto fail = [&](std::size_t s, const std::string& why) {
    r.passed = false;
    auto structural = is_isometric(g);
    if (auto* bad = std::get_if<NotIsometric>(&structural); bad && !bad->witness.is_zero())
      r.counterexample = bad->witness.entries().begin()->first;
    else
      r.counterexample = IndexPair{a.offset(s), a.offset(s)};
    r.detail = why;
  };
  if (iso.chosen.size() != a.summands()) {
    fail(0, "certificate length differs from the number of summands");
    return r;
  }
  std::vector<std::vector<Copy>> copies(a.summands());
  for (std::size_t s = 0; s < a.summands(); ++s) {
    const std::size_t p = iso.chosen[s];
    if (p >= g.parts().size() || g.parts()[p].src_summand != s || g.parts()[p].src.size() != a.size(s)) {
      fail(s, "summand " + std::to_string(s) + " has no full elementary summand");
      return r;
    }
    const auto& part = g.parts()[p];
    Copy cp{part.dst_summand, std::vector<std::size_t>(a.size(s))};
    for (std::size_t x = 0; x < part.src.size(); ++x) cp.indices[part.src[x]] = part.dst[x];
    copies[s].push_back(std::move(cp));
  }
  try {
    auto induced = MatrixUnitHom::make(a, g.codomain(), std::move(copies));
    if (!induced.same_map(iso.gamma_prime)) {
      // locate a unit where the recorded gamma' differs
      for (const auto& u : a.basis())
        if (induced.image(u) != iso.gamma_prime.image(u)) {
          r.passed = false;
          r.counterexample = u;
          r.detail = "recorded gamma' differs from the chosen summands at " + describe(u);
          return r;
        }
    }
  } catch (const Error& e) {
    fail(0, e.what());
  }
  return r;
}

CheckRecord theta_check(const InterpolationCertificate& c, std::size_t k) {
  const std::size_t off = c.target_levels[k] - c.target_levels.front();
  const std::size_t len = c.target_levels[k + 1] - c.target_levels[k];
  MatrixUnitHom composite = MatrixUnitHom::identity(c.target_algebras[k]);
  CheckRecord r{"theta_composition", k + 1, true, std::nullopt, "theta equals the composed target embeddings"};
  try {
    for (std::size_t i = 0; i < len; ++i) composite = compose(c.target_embeddings[off + i], composite);
  } catch (const Error& e) {
    r.passed = false;
    r.detail = e.what();
    return r;
  }
  if (composite.same_map(c.theta[k])) return r;
  for (const auto& u : c.target_algebras[k].basis())
    if (composite.codomain() != c.theta[k].codomain() || composite.image(u) != c.theta[k].image(u)) {
      r.passed = false;
      r.counterexample = u;
      r.detail = "theta differs from the composite at " + describe(u);
      return r;
    }
  return r;
}

CheckRecord subordination_check(const InterpolationCertificate& c, std::size_t k) {
  CheckRecord r{"subordination", k + 1, true, std::nullopt,
                "gamma'_{k+1} indices lie in theta_k(range gamma'_k)"};
  const auto& theta = c.theta[k];
  const Algebra& bk1 = c.target_algebras[k + 1];
  std::set<std::size_t> range;
  for (auto p : c.isometry[k].chosen) {
    if (p >= c.gamma[k].parts().size()) continue;
    const auto& part = c.gamma[k].parts()[p];
    for (const auto& copy : theta.copies()[part.dst_summand])
      for (auto l : part.dst) range.insert(bk1.global(copy.target, copy.indices[l]));
  }
  for (auto p : c.isometry[k + 1].chosen) {
    if (p >= c.gamma[k + 1].parts().size()) continue;
    const auto& part = c.gamma[k + 1].parts()[p];
    for (auto l : part.dst) {
      const std::size_t g = bk1.global(part.dst_summand, l);
      if (!range.count(g)) {
        r.passed = false;
        r.counterexample = IndexPair{g, g};
        r.detail = "index " + std::to_string(g) + " of gamma' escapes the previous range";
        return r;
      }
    }
  }
  return r;
}

VerificationReport run(const InterpolationCertificate& c, bool parallel) {
  VerificationReport report;
  const std::string problem = wellformed_problem(c);
  report.records.push_back({"wellformed", 0, problem.empty(), std::nullopt, problem.empty() ? "ok" : problem});
  if (!problem.empty()) return report;

  const std::size_t K = c.depth;
  for (std::size_t k = 0; k < K; ++k) {
    report.records.push_back(isometry_check(c, k));
    const auto& g = c.gamma[k];
    const auto& d = c.delta[k];
    report.records.push_back(unit_check(
        "left_inverse", k + 1, c.source_algebras[k], parallel,
        [&](IndexPair u) { return apply_sum(d, g.image(u)) == unit(u); }, "delta o gamma = id"));
    if (c.ordered) {
      auto upper_ok = [](const UnitSum& s) {
        return std::all_of(s.begin(), s.end(), [](const Term& t) { return t.at.row <= t.at.col; });
      };
      report.records.push_back(unit_check(
          "triangular", k + 1, c.source_algebras[k], parallel,
          [&](IndexPair u) { return u.row > u.col || upper_ok(g.image(u)); }, "gamma keeps upper units upper"));
      report.records.push_back(unit_check(
          "triangular", k + 1, c.target_algebras[k], parallel,
          [&](IndexPair u) { return u.row > u.col || upper_ok(d.image(u)); }, "delta keeps upper units upper"));
    }
  }
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& phi = c.source_embeddings[k];
    const auto& theta = c.theta[k];
    report.records.push_back(theta_check(c, k));
    report.records.push_back(unit_check(
        "square_gamma", k + 1, c.source_algebras[k], parallel,
        [&](IndexPair u) {
          return apply_sum(c.gamma[k + 1], phi.image(u)) == apply_sum(theta, c.gamma[k].image(u));
        },
        "gamma_{k+1} o phi_k = theta_k o gamma_k"));
    report.records.push_back(unit_check(
        "square_delta", k + 1, c.target_algebras[k], parallel,
        [&](IndexPair u) {
          return apply_sum(phi, c.delta[k].image(u)) == apply_sum(c.delta[k + 1], theta.image(u));
        },
        "phi_k o delta_k = delta_{k+1} o theta_k"));
    report.records.push_back(subordination_check(c, k));
  }
  return report;
}

}  // namespace

VerificationReport verify_certificate(const InterpolationCertificate& cert) { return run(cert, true); }

VerificationReport verify_certificate_serial(const InterpolationCertificate& cert) {
  return run(cert, false);
}

}  // namespace bratteli

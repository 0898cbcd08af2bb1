#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "bratteli/error.hpp"
#include "bratteli/norm.hpp"
#include "bratteli/structures.hpp"
#include "oracles.hpp"

using namespace bratteli;

TEST_CASE("refinement corners sit at 2^j - 2") {
  const auto s = c0_structure(CornerVariant::Refinement, 2);
  CHECK(s.family.levels == std::vector<std::size_t>{1, 2});
  CHECK(s.family.indices == std::vector<std::size_t>{0, 2});
  CHECK(s.passed());
  const auto s6 = c0_structure(CornerVariant::Refinement, 6);
  CHECK(s6.passed());
  for (std::size_t j = 0; j < 6; ++j) CHECK(s6.family.indices[j] == (std::size_t(1) << (j + 1)) - 2);
  CHECK(s6.supports.size() == 6);
}

TEST_CASE("standard corners come from the search") {
  const auto s = c0_structure(CornerVariant::Standard, 4);
  CHECK(s.passed());
  CHECK(s.family.indices == std::vector<std::size_t>{0, 1, 3, 7});
  CHECK_FALSE(s.family.search_log.empty());
  CHECK(parse_corner_variant(to_string(CornerVariant::Standard)) == CornerVariant::Standard);
  CHECK_THROWS_AS(parse_corner_variant("diagonal"), ValidationError);
}

TEST_CASE("the conditional expectation against a dense oracle") {
  const auto s = c0_structure(CornerVariant::Refinement, 4);
  const Algebra& top = s.expectation.domain();
  REQUIRE(top.total_size() == 16);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Element a = oracle::random_element(top, rng);
    const Element e = s.expectation.apply(a);
    CHECK(s.expectation.apply(e) == e);
    // sum_j P_j a P_j with the supports as diagonal projections
    Element expect(top);
    for (const auto& sup : s.supports) {
      Element p(top);
      for (auto g : sup) p.set({g, g}, 1);
      expect = expect + p * a * p;
    }
    CHECK(e == expect);
    CHECK(operator_norm(e) <= operator_norm(a) + 1e-9);
  }
  // the last diagonal entry is never used
  for (const auto& sup : s.supports)
    for (auto g : sup) CHECK(g != 15);
  const auto r = c0_norm_samples(s, 200, 1);
  CHECK(r.passed);
  CHECK(r.samples == 200);
}

TEST_CASE("lexicographic products are the big triangular algebra") {
  CHECK(lexicographic_product(2, 2).dimension == 10);
  CHECK(lexicographic_product(1, 3).dimension == 6);
  CHECK(lexicographic_product(3, 1).dimension == 6);
  for (std::size_t s = 1; s <= 6; ++s)
    for (std::size_t r = 1; r <= 6; ++r) {
      const auto p = lexicographic_product(s, r);
      std::set<IndexPair> oracle_set;
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i; j < s; ++j)
          for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b)
              if (i < j || a <= b) oracle_set.insert({i * r + a, j * r + b});
      CHECK(std::set<IndexPair>(p.basis.begin(), p.basis.end()) == oracle_set);
      CHECK(p.dimension == s * r * (s * r + 1) / 2);
      CHECK(p.equals_lex_triangular);
    }
  CHECK_THROWS_AS(lexicographic_product(0, 2), ValidationError);
}

TEST_CASE("twist split on T_2") {
  const auto r = twist_decomposition(twist_system(2, 2, {1, 0}), 3, 100, 5);
  CHECK(r.passed());
  REQUIRE(r.levels.size() >= 2);
  CHECK(r.levels[0].size == 2);
  CHECK(r.levels[0].minus_dimension == 1);
  CHECK(r.levels[0].column_dimension == 2);
  for (const auto& l : r.levels) {
    CHECK(l.split_bijective);
    CHECK(l.minus_dimension + l.column_dimension == l.size * (l.size + 1) / 2);
  }
  CHECK(r.worst_lower <= 1e-9);
  CHECK(r.worst_upper <= 1e-9);

  const auto id = twist_decomposition(twist_system(2, 2, {0, 1}), 3, 20, 5);
  CHECK(id.identity_is_refinement);
  CHECK(id.passed());
  CHECK_THROWS_AS(twist_decomposition(uhf_system(2, 2), 3, 10, 1), PreconditionError);
}

TEST_CASE("injections of M_2 into T_m") {
  const auto v = remark24_search(4);
  REQUIRE(v.size() == 4);
  CHECK_FALSE(v[0].feasible);
  CHECK_FALSE(v[1].feasible);
  CHECK(v[3].feasible);
  CHECK_THROWS_AS(remark24_search(7), ValidationError);
  CHECK_THROWS_AS(remark24_search(0), ValidationError);

  // whatever witness is found must be isometric on random elements
  std::mt19937_64 rng(8);
  for (const auto& verdict : v) {
    if (!verdict.feasible) continue;
    REQUIRE(verdict.witness.size() == 4);
    const Algebra m2 = Algebra::make({2}), tm = Algebra::make({verdict.m});
    for (int trial = 0; trial < 50; ++trial) {
      const Element x = oracle::random_element(m2, rng);
      Element y(tm);
      const Rational c[4] = {x.get({0, 0}), x.get({0, 1}), x.get({1, 0}), x.get({1, 1})};
      for (int u = 0; u < 4; ++u)
        for (const auto& t : verdict.witness[u]) {
          CHECK(t.at.row <= t.at.col);
          y.add_to(t.at, c[u] * Rational(t.coeff));
        }
      CHECK(oracle::power_norm(oracle::dense(y)) ==
            doctest::Approx(oracle::power_norm(oracle::dense(x))).epsilon(1e-7));
    }
  }
}

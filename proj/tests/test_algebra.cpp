#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bratteli/algebra.hpp"
#include "bratteli/error.hpp"
#include "bratteli/norm.hpp"
#include "oracles.hpp"

using namespace bratteli;

TEST_CASE("algebra layout") {
  const Algebra a = Algebra::make({2, 3});
  CHECK(a.summands() == 2);
  CHECK(a.total_size() == 5);
  CHECK(a.dimension() == 13);
  CHECK(a.offset(1) == 2);
  CHECK(a.global(1, 2) == 4);
  CHECK(a.summand_of(3) == 1);
  CHECK(a.contains({2, 4}));
  CHECK_FALSE(a.contains({1, 2}));
  CHECK(a.basis().size() == 13);
  CHECK(triangular_basis(a).size() == 3 + 6);
  CHECK(triangular_basis(a, true).size() == 1 + 3);
  CHECK_THROWS_AS(Algebra::make({}), ValidationError);
  CHECK_THROWS_AS(Algebra::make({2, 0}), ValidationError);
  CHECK_THROWS_AS(a.global(0, 2), RangeError);
}

TEST_CASE("rationals print and parse as p/q") {
  CHECK(to_string(Rational(6, 4)) == "3/2");
  CHECK(to_string(Rational(-2)) == "-2/1");
  CHECK(parse_rational("3/2") == Rational(3, 2));
  CHECK(parse_rational("-4/6") == Rational(-2, 3));
  CHECK(parse_rational("7") == Rational(7));
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational("x"), ValidationError);
  CHECK_THROWS_AS(parse_rational(""), ValidationError);
}

TEST_CASE("normalize merges and drops zeros") {
  UnitSum s{{{1, 1}, 2}, {{0, 0}, 1}, {{1, 1}, -2}, {{0, 1}, 3}, {{0, 0}, 1}};
  normalize(s);
  REQUIRE(s.size() == 2);
  CHECK(s[0].at == IndexPair{0, 0});
  CHECK(s[0].coeff == 2);
  CHECK(s[1].at == IndexPair{0, 1});
}

TEST_CASE("element products match dense multiplication") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Algebra a = Algebra::make({std::size_t(1 + trial % 3), 2, std::size_t(1 + trial % 2)});
    const Element x = oracle::random_element(a, rng), y = oracle::random_element(a, rng);
    CHECK(oracle::dense(x * y) == oracle::dense_multiply(oracle::dense(x), oracle::dense(y)));
    // (xy)* = y* x*
    CHECK(adjoint(x * y) == adjoint(y) * adjoint(x));
    CHECK(x + Element::zero(a) == x);
    CHECK(x * Element::identity(a) == x);
  }
}

TEST_CASE("matrix units multiply like matrix units") {
  const Algebra a = Algebra::make({3});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          const Element p = matrix_unit(a, 0, i, j) * matrix_unit(a, 0, k, l);
          if (j == k)
            CHECK(p == matrix_unit(a, 0, i, l));
          else
            CHECK(p.is_zero());
        }
  CHECK_THROWS_AS(matrix_unit(a, 0, 3, 0), ValidationError);
}

TEST_CASE("entries outside the block diagonal are rejected") {
  Element x(Algebra::make({1, 1}));
  CHECK_THROWS_AS(x.set({0, 1}, 1), ValidationError);
}

TEST_CASE("upper triangular predicates") {
  const Algebra a = Algebra::make({2, 2});
  CHECK(is_upper(a, {2, 3}));
  CHECK_FALSE(is_upper(a, {3, 2}));
  CHECK_FALSE(is_strictly_upper(a, {1, 1}));
  Element x(a);
  x.set({0, 1}, 5);
  CHECK(is_upper_triangular(x));
  x.set({1, 0}, 1);
  CHECK_FALSE(is_upper_triangular(x));
}

TEST_CASE("tensor layout") {
  const Algebra a = tensor_with_matrix(Algebra::make({2, 3}), 2);
  CHECK(a.sizes() == std::vector<std::size_t>{4, 6});
  CHECK_THROWS_AS(tensor_with_matrix(Algebra::make({1}), 0), ValidationError);
  const Algebra m2 = Algebra::make({2});
  const Element k = kron(matrix_unit(m2, 0, 0, 1), matrix_unit(m2, 0, 1, 0));
  // (i, a) -> i*d + a
  CHECK(k == matrix_unit(Algebra::make({4}), 0, 1, 2));
}

TEST_CASE("operator norm agrees with power iteration") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Algebra a = Algebra::make({std::size_t(1 + trial % 4), 3});
    const Element x = oracle::random_element(a, rng);
    CHECK(operator_norm(x) == doctest::Approx(oracle::power_norm(oracle::dense(x))).epsilon(1e-7));
  }
}

TEST_CASE("known norms") {
  const Algebra a = Algebra::make({2});
  Element x(a);
  x.set({0, 0}, 1);
  x.set({0, 1}, 1);
  x.set({1, 0}, 1);
  x.set({1, 1}, 1);
  CHECK(operator_norm(x) == doctest::Approx(2.0));
  Element y(a);
  y.set({0, 0}, 3);
  y.set({1, 1}, -4);
  CHECK(operator_norm(y) == doctest::Approx(4.0));
  CHECK(operator_norm(Element::zero(a)) == 0.0);
  const std::vector<double> r = {3, 0, 4, 0};  // 2x2 rows (3,0), (4,0)
  CHECK(largest_singular_value(r, 2, 2) == doctest::Approx(5.0));
  const auto sv = singular_values(std::vector<double>{1, 0, 0, 0, 2, 0}, 2, 3);
  REQUIRE(sv.size() >= 2);
  CHECK(sv[0] == doctest::Approx(2.0));
  CHECK(sv[1] == doctest::Approx(1.0));
}

TEST_CASE("norm is invariant under unit permutations") {
  std::mt19937_64 rng(3);
  const Algebra a = Algebra::make({4});
  for (int trial = 0; trial < 10; ++trial) {
    const Element x = oracle::random_element(a, rng);
    Element px(a);
    const std::size_t p[4] = {2, 0, 3, 1};
    for (const auto& [at, v] : x.entries()) px.set({p[at.row], p[at.col]}, v);
    CHECK(operator_norm(px) == doctest::Approx(operator_norm(x)));
  }
}

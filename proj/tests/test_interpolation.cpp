#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "bratteli/error.hpp"
#include "bratteli/interpolation.hpp"
#include "bratteli/norm.hpp"
#include "oracles.hpp"

using namespace bratteli;

namespace {

DirectSystem beta_system() {
  Tail t;
  t.from_level = 1;
  t.period = {{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  GapOrder o(3);
  o[0] = {{1, 0}, {2, 0}};
  o[1] = {{0, 0}, {2, 0}};
  o[2] = {{0, 0}, {1, 0}};
  t.order = {o};
  return DirectSystem::from_diagram(BratteliDiagram::make(true, {{2, 3, 4}}, {}, t), 1);
}

DirectSystem two_summand_target() {
  // stationary [[2,1],[1,1]] has a Fermion witness at vertex 0
  return DirectSystem::from_diagram(stationary_diagram({{2, 1}, {1, 1}}, {1, 1}, true), 1);
}

// Element-level re-check of the squares on random elements.
void check_squares_on_samples(const InterpolationCertificate& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k + 1 < c.depth; ++k) {
    for (int trial = 0; trial < 3; ++trial) {
      const Element x = oracle::random_element(c.source_algebras[k], rng);
      CHECK(c.gamma[k + 1].apply(c.source_embeddings[k].apply(x)) == c.theta[k].apply(c.gamma[k].apply(x)));
      CHECK(c.delta[k].apply(c.gamma[k].apply(x)) == x);
    }
    if (c.target_algebras[k].total_size() <= 64) {
      const Element b = oracle::random_element(c.target_algebras[k], rng);
      CHECK(c.source_embeddings[k].apply(c.delta[k].apply(b)) == c.delta[k + 1].apply(c.theta[k].apply(b)));
    }
  }
}

}  // namespace

TEST_CASE("self-interpolation of the 2^inf system") {
  const auto c = lemma11_construct(uhf_system(2, 2), uhf_system(2, 2), 3, Variant::SelfAdjoint);
  CHECK(c.report.passed());
  CHECK(c.target_levels == std::vector<std::size_t>{1, 2, 3});
  // gamma_1 is a -> a + 0
  CHECK(c.gamma[0].image({0, 1}) == UnitSum{{{0, 1}, 1}});
  check_squares_on_samples(c, 1);
}

TEST_CASE("3^inf into 2^inf picks the minimal levels") {
  const auto c = lemma11_construct(uhf_system(3, 3), uhf_system(2, 2), 2, Variant::SelfAdjoint);
  CHECK(c.target_levels == std::vector<std::size_t>{2, 4});
  CHECK(c.report.passed());
  CHECK(c.isometry[0].gamma_prime.multiplicities() == Matrix{{1}});
  check_squares_on_samples(c, 2);
}

TEST_CASE("ordered standard T-system into the 2^inf standard system") {
  const auto c = lemma11_construct(uhf_system(2, 2), uhf_system(2, 2), 4, Variant::Ordered);
  CHECK(c.report.passed());
  CHECK(c.ordered);
  for (std::size_t k = 0; k < c.depth; ++k) {
    CHECK(c.gamma[k].ordered());
    CHECK(c.delta[k].ordered());
    CHECK_NOTHROW(restrict_to_triangular(c.gamma[k]));
    CHECK_NOTHROW(restrict_to_triangular(c.delta[k]));
  }
  bool has_triangular = false;
  for (const auto& r : c.report.records) has_triangular = has_triangular || r.check == "triangular";
  CHECK(has_triangular);
}

TEST_CASE("nonunital sources are unitized first") {
  const auto c = lemma11_construct(DirectSystem::from_diagram(compact_chain_diagram(), 4), uhf_system(2, 2), 3,
                                   Variant::SelfAdjoint);
  CHECK(c.unitized);
  CHECK(c.report.passed());
  CHECK(c.source_algebras[0].sizes() == std::vector<std::size_t>{1, 1});
  check_squares_on_samples(c, 3);
}

TEST_CASE("targets without a Fermion witness are refused") {
  try {
    lemma11_construct(uhf_system(2, 2), DirectSystem::from_diagram(compact_chain_diagram(), 3), 2,
                      Variant::SelfAdjoint, 12);
    FAIL("expected FermionUnavailable");
  } catch (const FermionUnavailable& e) {
    CHECK(e.deepest_level() > 0);
  }
  CHECK_THROWS_AS(lemma11_construct(uhf_system(2, 2), DirectSystem::from_diagram(pascal_diagram(3)), 2,
                                    Variant::SelfAdjoint),
                  FermionUnavailable);
}

TEST_CASE("depth one certificates have no squares") {
  const auto c = lemma11_construct(uhf_system(3, 3), uhf_system(2, 2), 1, Variant::SelfAdjoint);
  CHECK(c.report.passed());
  std::set<std::string> checks;
  for (const auto& r : c.report.records) checks.insert(r.check);
  CHECK(checks.count("isometry"));
  CHECK(checks.count("left_inverse"));
  CHECK_FALSE(checks.count("square_gamma"));
  CHECK_FALSE(checks.count("square_delta"));
}

TEST_CASE("every engine certificate verifies, serial and parallel agree") {
  struct Case {
    DirectSystem source, target;
    Variant v;
    std::size_t depth;
  };
  Generator ref;
  ref.kind = GeneratorKind::Refinement;
  ref.initial = 2;
  ref.multiplicities = {3, 4};
  std::vector<Case> cases = {
      {uhf_system(3, 3), uhf_system(2, 2), Variant::SelfAdjoint, 3},
      {alternation_system({2, 3}, true), uhf_system(2, 2), Variant::SelfAdjoint, 3},
      {twist_system(2, 2, {1, 0}), uhf_system(3, 2), Variant::SelfAdjoint, 3},
      {beta_system(), uhf_system(2, 2), Variant::Ordered, 3},
      {beta_system(), uhf_system(2, 2), Variant::SelfAdjoint, 3},
      {beta_system(), two_summand_target(), Variant::SelfAdjoint, 3},
      {uhf_system(2, 3), two_summand_target(), Variant::Ordered, 3},
      {DirectSystem::from_diagram(compact_chain_diagram(), 4), uhf_system(2, 2), Variant::Ordered, 3},
      {DirectSystem::from_generator(ref, 3), uhf_system(2, 2, true), Variant::Refinement, 3},
      {uhf_system(2, 2, true), uhf_system(2, 3, true), Variant::Refinement, 3},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CAPTURE(i);
    auto& cs = cases[i];
    const auto c = lemma11_construct(cs.source, cs.target, cs.depth, cs.v);
    CHECK(c.report.passed());
    const auto parallel = verify_certificate(c);
    const auto serial = verify_certificate_serial(c);
    CHECK(parallel.records == serial.records);
    CHECK(parallel.records == c.report.records);
    check_squares_on_samples(c, 100 + i);

    // subordination, checked here from the raw maps
    for (std::size_t k = 0; k + 1 < c.depth; ++k) {
      std::set<std::size_t> range;
      const auto& prev = c.gamma[k].parts()[c.isometry[k].chosen[0]];
      for (std::size_t s = 0; s < c.isometry[k].chosen.size(); ++s) {
        const auto& p = c.gamma[k].parts()[c.isometry[k].chosen[s]];
        for (auto l : p.dst) {
          const std::size_t g = c.target_algebras[k].global(p.dst_summand, l);
          for (const auto& t : c.theta[k].image({g, g})) range.insert(t.at.row);
        }
      }
      (void)prev;
      for (std::size_t s = 0; s < c.isometry[k + 1].chosen.size(); ++s) {
        const auto& p = c.gamma[k + 1].parts()[c.isometry[k + 1].chosen[s]];
        for (auto l : p.dst) CHECK(range.count(c.target_algebras[k + 1].global(p.dst_summand, l)));
      }
    }
    // gamma is isometric and delta contractive on a few samples
    std::mt19937_64 rng(7 + i);
    for (std::size_t k = 0; k < c.depth; ++k) {
      const Element x = oracle::random_element(c.source_algebras[k], rng);
      CHECK(operator_norm(c.gamma[k].apply(x)) == doctest::Approx(operator_norm(x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("construction is deterministic") {
  const auto a = lemma11_construct(beta_system(), uhf_system(2, 2), 3, Variant::Ordered);
  const auto b = lemma11_construct(beta_system(), uhf_system(2, 2), 3, Variant::Ordered);
  CHECK(a.target_levels == b.target_levels);
  for (std::size_t k = 0; k < a.depth; ++k) {
    CHECK(a.gamma[k].parts() == b.gamma[k].parts());
    CHECK(a.delta[k].parts() == b.delta[k].parts());
  }
}

TEST_CASE("refinement variant follows the interleaved pattern") {
  Generator g;
  g.kind = GeneratorKind::Refinement;
  g.initial = 2;
  g.multiplicities = {3, 4};
  const auto c = lemma11_construct(DirectSystem::from_generator(g, 3), uhf_system(2, 2, true), 3,
                                   Variant::Refinement);
  REQUIRE(c.report.passed());
  CHECK(c.target_levels == std::vector<std::size_t>{1, 3, 5});
  std::vector<std::size_t> prev;
  for (std::size_t k = 0; k < c.depth; ++k) {
    const auto& part = c.gamma[k].parts()[c.isometry[k].chosen[0]];
    std::vector<std::size_t> L(part.src.size());
    for (std::size_t x = 0; x < part.src.size(); ++x) L[part.src[x]] = part.dst[x];
    if (k == 0) {
      for (std::size_t i = 0; i < L.size(); ++i) CHECK(L[i] == i);
    } else {
      const std::size_t t = L.size() / prev.size();
      const std::size_t s = c.target_algebras[k].total_size() / c.target_algebras[k - 1].total_size();
      CHECK(s >= t);
      for (std::size_t i = 0; i < prev.size(); ++i)
        for (std::size_t m = 0; m < t; ++m) CHECK(L[i * t + m] == prev[i] * s + m);
    }
    prev = L;
  }
}

TEST_CASE("injected faults are caught with a named check") {
  const auto base = lemma11_construct(beta_system(), uhf_system(2, 2), 3, Variant::Ordered);
  std::mt19937_64 rng(99);
  int injected = 0;
  for (int i = 0; i < 40; ++i) {
    auto c = base;
    const auto f = inject_fault(c, rng);
    if (!f) continue;
    ++injected;
    const auto r = verify_certificate(c);
    CHECK_FALSE(r.passed());
    const auto* bad = r.first_failure();
    REQUIRE(bad);
    CHECK_FALSE(bad->check.empty());
    CHECK(verify_certificate_serial(c).records == r.records);
  }
  CHECK(injected > 30);
}

TEST_CASE("a moved codomain index names the square and the unit") {
  auto c = lemma11_construct(uhf_system(3, 3), uhf_system(2, 2), 2, Variant::SelfAdjoint);
  // move one destination index of the padding of gamma_2 to a free index
  auto parts = c.gamma[1].parts();
  const std::size_t m = c.gamma[1].codomain().total_size();
  std::vector<bool> used(m, false);
  for (const auto& p : parts)
    for (auto d : p.dst) used[d] = true;
  std::size_t free = 0;
  while (used[free]) ++free;
  std::size_t victim = parts.size() - 1;
  parts[victim].dst.back() = free;
  c.gamma[1] = CompressionMap::make(c.gamma[1].domain(), c.gamma[1].codomain(), parts);
  const auto r = verify_certificate(c);
  const auto* bad = r.first_failure();
  REQUIRE(bad);
  CHECK(bad->check == "square_gamma");
  CHECK(bad->level == 1);
  CHECK(bad->counterexample.has_value());
}

TEST_CASE("malformed certificates fail the wellformed check") {
  auto c = lemma11_construct(uhf_system(2, 2), uhf_system(2, 2), 2, Variant::SelfAdjoint);
  c.delta.pop_back();
  const auto r = verify_certificate(c);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].check == "wellformed");
  CHECK_FALSE(r.passed());
}

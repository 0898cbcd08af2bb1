#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bratteli/diagram.hpp"
#include "bratteli/error.hpp"
#include "oracles.hpp"

using namespace bratteli;

namespace {

BratteliDiagram tree(std::size_t types, std::vector<TreeEdge> edges, std::vector<Orphan> orphans = {},
                     bool unital = false) {
  Tail t;
  t.from_level = 1;
  t.mode = TailMode::Tree;
  t.tree_period = {{types, types, std::move(edges), std::move(orphans)}};
  return BratteliDiagram::make(unital, {std::vector<std::size_t>(types, 1)}, {}, t);
}

BratteliDiagram c0_diagram() { return tree(1, {{0, 0, 0}}, {{0, 1, 0}}); }
BratteliDiagram r_diagram() { return tree(1, {{0, 0, 0}}, {{0, 1, 1}}); }
BratteliDiagram cantor(std::uint64_t pad) {
  return tree(2, {{0, 0, pad}, {0, 1, pad}, {1, 0, pad}, {1, 1, pad}});
}

}  // namespace

TEST_CASE("validation rejects malformed diagrams") {
  CHECK_THROWS_AS(BratteliDiagram::make(true, {{1}, {2}}, {}), ValidationError);
  // unital needs equality of sizes
  CHECK_THROWS_AS(BratteliDiagram::make(true, {{1}, {3}}, {{{2}}}), ValidationError);
  CHECK_NOTHROW(BratteliDiagram::make(false, {{1}, {3}}, {{{2}}}));
  // nonunital still needs enough room
  CHECK_THROWS_AS(BratteliDiagram::make(false, {{2}, {3}}, {{{2}}}), ValidationError);
  // a target vertex without incoming edges
  CHECK_THROWS_AS(BratteliDiagram::make(true, {{1}, {1, 1}}, {{{1, 0}}}), ValidationError);
  // ragged
  CHECK_THROWS_AS(BratteliDiagram::make(true, {{1, 1}, {2}}, {{{1}, {1, 1}}}), ValidationError);
  // unital tails cannot pad, tree tails cannot carry orphans when unital
  Tail t;
  t.from_level = 1;
  t.period = {{{1}}};
  t.padding = {{1}};
  CHECK_THROWS_AS(BratteliDiagram::make(true, {{1}}, {}, t), ValidationError);
  CHECK_THROWS_AS(tree(1, {{0, 0, 0}}, {{0, 1, 0}}, true), ValidationError);
  CHECK_THROWS_AS(tree(1, {{0, 0, 1}}, {}, true), ValidationError);
}

TEST_CASE("sizes follow the tail recurrence") {
  const auto f = fermion_diagram();
  CHECK(f.sizes(1) == std::vector<std::size_t>{2});
  CHECK(f.sizes(5) == std::vector<std::size_t>{32});
  const auto k = compact_chain_diagram();
  CHECK(k.sizes(4) == std::vector<std::size_t>{4});
  const auto s = stationary_diagram({{1, 1}, {1, 0}}, {1, 1});
  CHECK(s.sizes(2) == std::vector<std::size_t>{2, 1});
  CHECK(s.sizes(3) == std::vector<std::size_t>{3, 2});
  CHECK(f.level_key(7) == 1);
  CHECK_THROWS_AS(pascal_diagram(3).sizes(4), RangeError);
}

TEST_CASE("composed multiplicities count paths") {
  const auto p = pascal_diagram(6);
  const auto m = compose_multiplicities(p, 1, 6);
  for (std::size_t w = 0; w < 6; ++w)
    CHECK(m[0][w] == oracle::count_paths([&](std::size_t l) { return p.gap(l); }, 1, 0, 6, w));
  CHECK(m[0] == std::vector<std::uint64_t>{1, 5, 10, 10, 5, 1});

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> entry(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix e(3, std::vector<std::uint64_t>(3));
    for (auto& row : e)
      for (auto& x : row) x = entry(rng);
    for (std::size_t w = 0; w < 3; ++w) e[w][w] = std::max<std::uint64_t>(e[w][w], 1);
    const auto d = stationary_diagram(e, {1, 1, 1});
    const auto c = compose_multiplicities(d, 2, 6);
    for (std::size_t v = 0; v < 3; ++v)
      for (std::size_t w = 0; w < 3; ++w)
        CHECK(c[v][w] == oracle::count_paths([&](std::size_t l) { return d.gap(l); }, 2, v, 6, w));
  }
}

TEST_CASE("canonical Fermion verdicts") {
  CHECK(std::holds_alternative<FermionWitness>(has_fermion_property(fermion_diagram())));
  CHECK(std::holds_alternative<FermionWitness>(has_fermion_property(pascal_diagram(8))));
  CHECK(std::holds_alternative<FermionWitness>(has_fermion_property(uhf_diagram(3, 3))));
  const auto chain = has_fermion_property(compact_chain_diagram());
  REQUIRE(std::holds_alternative<Absent>(chain));
  CHECK(std::get<Absent>(chain).exact);
  CHECK(std::holds_alternative<Absent>(has_fermion_property(stationary_diagram({{1, 0}, {1, 1}}, {1, 1}))));
  CHECK(std::get<Absent>(has_fermion_property(cantor(0))).reason == "TreeTail");
  const auto short_pascal = has_fermion_property(pascal_diagram(2));
  REQUIRE(std::holds_alternative<Absent>(short_pascal));
  CHECK_FALSE(std::get<Absent>(short_pascal).exact);
}

TEST_CASE("witness chains have multiplicity at least two between neighbours") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> entry(0, 2);
  int seen = 0;
  for (int trial = 0; trial < 200 && seen < 40; ++trial) {
    Matrix e(3, std::vector<std::uint64_t>(3));
    for (auto& row : e)
      for (auto& x : row) x = entry(rng);
    BratteliDiagram d;
    try {
      d = stationary_diagram(e, {1, 2, 3});
    } catch (const ValidationError&) {
      continue;
    }
    const auto f = has_fermion_property(d);
    CHECK(std::holds_alternative<FermionWitness>(f) == oracle::stationary_chain_exists(e, 8));
    if (const auto* w = std::get_if<FermionWitness>(&f)) {
      ++seen;
      for (std::size_t i = 0; i < 4; ++i) {
        const auto a = w->node(i), b = w->node(i + 1);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(a->level < b->level);
        CHECK(compose_multiplicities(d, a->level, b->level)[a->vertex][b->vertex] >= 2);
      }
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("simplicity, centre and unique paths") {
  const auto f = fermion_diagram();
  CHECK(is_simple(f).value);
  CHECK(is_simple(f).exact);
  CHECK(has_trivial_centre(f).value);
  CHECK_FALSE(find_unique_descending_path(f).has_value());

  const auto two = disjoint_chains_diagram(5);
  CHECK_FALSE(is_simple(two).value);
  CHECK_FALSE(has_trivial_centre(two).value);

  const auto k = compact_chain_diagram();
  CHECK(is_simple(k).value);
  const auto p = find_unique_descending_path(k);
  REQUIRE(p);
  CHECK(p->start == WitnessNode{1, 0});

  CHECK(has_trivial_centre(c0_diagram()).value == false);
  CHECK(is_simple(cantor(0)).value == false);
}

TEST_CASE("telescoping composes gaps") {
  const auto p = pascal_diagram(7);
  const auto t = telescope(p, {1, 3, 5, 7});
  CHECK(t.materialized_levels() == 4);
  CHECK(t.gap(2) == compose_multiplicities(p, 3, 5));
  CHECK(t.sizes(3) == p.sizes(5));

  const auto f = fermion_diagram();
  const auto ft = telescope(f, {1, 2}, 3);
  CHECK(ft.has_tail());
  CHECK(ft.sizes(3) == f.sizes(5));
  CHECK(compose_multiplicities(ft, 2, 3)[0][0] == 8);

  const auto kt = telescope(compact_chain_diagram(), {1, 3}, 2);
  CHECK(kt.sizes(2) == std::vector<std::size_t>{3});
  CHECK(kt.sizes(4) == std::vector<std::size_t>{7});
  CHECK_THROWS(telescope(cantor(0), {1, 2}));
}

TEST_CASE("classification corpus and telescope invariance") {
  struct Case {
    BratteliDiagram d;
    std::string tag;
  };
  const std::vector<Case> corpus = {{c0_diagram(), "i"},   {r_diagram(), "ii"}, {compact_chain_diagram(), "iii"},
                                    {cantor(0), "iv"},     {cantor(1), "ix"},   {fermion_diagram(), "NonTypeI"}};
  for (const auto& c : corpus) {
    const auto cl = classify(c.d);
    CHECK(cl.tag == c.tag);
    CHECK(cl.type_one == (c.tag != "NonTypeI"));
    for (std::size_t stride : {2, 3}) CHECK(classify(telescope(c.d, {1}, stride)).tag == c.tag);
  }
  CHECK_THROWS_AS(classify(pascal_diagram(4)), UnsupportedClassification);
  const auto c = classify(c0_diagram());
  CHECK(c.predicates.bounded);
  CHECK_FALSE(c.predicates.uncountable_paths);
  CHECK(classify(r_diagram()).predicates.per_path_bounded);
  CHECK_FALSE(classify(r_diagram()).predicates.bounded);
}

TEST_CASE("ordered gaps validate their block lists") {
  Tail t;
  t.from_level = 1;
  t.period = {{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  GapOrder o(3);
  o[0] = {{1, 0}, {2, 0}};
  o[1] = {{0, 0}, {2, 0}};
  o[2] = {{0, 0}, {1, 0}};
  t.order = {o};
  const auto d = BratteliDiagram::make(true, {{2, 3, 4}}, {}, t);
  CHECK(d.ordered());
  CHECK(d.sizes(2) == std::vector<std::size_t>{7, 6, 5});
  o[0] = {{1, 0}, {1, 0}};
  t.order = {o};
  CHECK_THROWS_AS(BratteliDiagram::make(true, {{2, 3, 4}}, {}, t), ValidationError);
}

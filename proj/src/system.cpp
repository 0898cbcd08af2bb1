#include "bratteli/system.hpp"

#include "bratteli/error.hpp"

namespace bratteli {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::None: return "none";
    case GeneratorKind::Refinement: return "refinement";
    case GeneratorKind::Standard: return "standard";
    case GeneratorKind::Alternation: return "alternation";
    case GeneratorKind::Twist: return "twist";
    case GeneratorKind::Diagram: return "ordered";
  }
  return "none";
}

GeneratorKind parse_generator_kind(const std::string& text) {
  if (text == "refinement") return GeneratorKind::Refinement;
  if (text == "standard") return GeneratorKind::Standard;
  if (text == "alternation") return GeneratorKind::Alternation;
  if (text == "twist") return GeneratorKind::Twist;
  if (text == "ordered" || text == "diagram") return GeneratorKind::Diagram;
  throw ValidationError("unknown generator kind '" + text + "'");
}

DirectSystem DirectSystem::make(std::vector<Algebra> algebras, std::vector<MatrixUnitHom> embeddings,
                                bool triangular) {
  if (algebras.empty()) throw ValidationError("system needs at least one level");
  if (embeddings.size() + 1 != algebras.size())
    throw ValidationError("need one embedding per consecutive pair of levels");
  for (std::size_t k = 0; k < embeddings.size(); ++k)
    if (!(embeddings[k].domain() == algebras[k] && embeddings[k].codomain() == algebras[k + 1]))
      throw ValidationError("embedding " + std::to_string(k + 1) + " does not match its levels");
  if (triangular)
    for (const auto& e : embeddings)
      if (!e.increasing()) throw ValidationError("triangular system needs order-preserving embeddings");
  DirectSystem s;
  s.algebras_ = std::move(algebras);
  s.embeddings_ = std::move(embeddings);
  s.triangular_ = triangular;
  return s;
}

DirectSystem DirectSystem::from_generator(const Generator& g, std::size_t levels) {
  if (g.kind == GeneratorKind::None || g.kind == GeneratorKind::Diagram)
    throw ValidationError("generator needs a single-summand kind");
  if (g.initial == 0) throw ValidationError("initial size must be positive");
  if (g.multiplicities.empty()) throw ValidationError("generator needs multiplicities");
  for (auto t : g.multiplicities)
    if (t == 0) throw ValidationError("multiplicities must be positive");
  if (g.kind == GeneratorKind::Twist && g.permutations.empty())
    throw ValidationError("twist generator needs permutations");
  DirectSystem s;
  s.generator_ = g;
  s.triangular_ = true;
  s.algebras_ = {Algebra::make({g.initial})};
  s.extend_to(std::max<std::size_t>(levels, 1));
  return s;
}

DirectSystem DirectSystem::from_diagram(const BratteliDiagram& d, std::size_t levels) {
  if (d.is_tree()) throw PreconditionError("tree-mode diagrams have no finite levels to realize");
  DirectSystem s;
  s.source_diagram_ = d;
  s.triangular_ = d.ordered();
  if (d.has_tail()) s.generator_.kind = GeneratorKind::Diagram;
  s.algebras_ = {Algebra::make(d.sizes(1))};
  const std::size_t want = levels == 0 ? d.materialized_levels() : levels;
  if (!d.has_tail() && want > d.materialized_levels()) throw RangeError("diagram has fewer levels");
  for (std::size_t k = 1; k < want; ++k) {
    s.embeddings_.push_back(s.next_embedding(k));
    s.algebras_.push_back(s.embeddings_.back().codomain());
  }
  return s;
}

MatrixUnitHom DirectSystem::next_embedding(std::size_t level) const {
  const Algebra& a = algebras_[level - 1];
  if (source_diagram_) {
    const auto& d = *source_diagram_;
    return ordered_diagram_embedding(a, Algebra::make(d.sizes(level + 1)), d.gap_order(level));
  }
  const auto& g = generator_;
  const std::size_t t = g.multiplicities[(level - 1) % g.multiplicities.size()];
  const std::size_t n = a.size(0);
  switch (g.kind) {
    case GeneratorKind::Refinement: return refinement_embedding(n, t);
    case GeneratorKind::Standard: return standard_embedding(n, t);
    case GeneratorKind::Alternation:
      return ((level - 1) % 2 == 0) == g.refinement_first ? refinement_embedding(n, t)
                                                         : standard_embedding(n, t);
    case GeneratorKind::Twist:
      return twist_embedding(n, t, g.permutations[(level - 1) % g.permutations.size()]);
    default: break;
  }
  throw RangeError("system cannot be extended");
}

void DirectSystem::extend_to(std::size_t level) {
  while (algebras_.size() < level) {
    if (!extensible()) throw RangeError("level " + std::to_string(level) + " beyond a finite system");
    embeddings_.push_back(next_embedding(algebras_.size()));
    algebras_.push_back(embeddings_.back().codomain());
  }
}

const Algebra& DirectSystem::algebra(std::size_t level) const {
  if (level == 0 || level > algebras_.size()) throw RangeError("level not materialized");
  return algebras_[level - 1];
}

const MatrixUnitHom& DirectSystem::embedding(std::size_t level) const {
  if (level == 0 || level > embeddings_.size()) throw RangeError("embedding not materialized");
  return embeddings_[level - 1];
}

MatrixUnitHom DirectSystem::composed(std::size_t from, std::size_t to) const {
  if (from > to) throw ValidationError("from must not exceed to");
  MatrixUnitHom h = MatrixUnitHom::identity(algebra(from));
  for (std::size_t k = from; k < to; ++k) h = compose(embedding(k), h);
  return h;
}

bool DirectSystem::unital() const {
  if (source_diagram_) return source_diagram_->unital();
  for (const auto& e : embeddings_)
    if (!e.unital()) return false;
  return true;
}

BratteliDiagram DirectSystem::diagram() const {
  if (source_diagram_) return *source_diagram_;
  if (extensible()) {
    Tail t;
    t.from_level = 1;
    for (auto m : generator_.multiplicities) t.period.push_back({{m}});
    return BratteliDiagram::make(true, {{generator_.initial}}, {}, t);
  }
  std::vector<std::vector<std::size_t>> sizes;
  std::vector<Matrix> edges;
  for (const auto& a : algebras_) sizes.push_back(a.sizes());
  for (const auto& e : embeddings_) edges.push_back(e.multiplicities());
  return BratteliDiagram::make(unital(), std::move(sizes), std::move(edges));
}

Unitization unitize(const DirectSystem& system) {
  Unitization u;
  if (system.unital()) {
    u.system = system;
    return u;
  }
  u.changed = true;
  std::vector<Algebra> algebras;
  for (const auto& a : system.algebras()) {
    auto sizes = a.sizes();
    u.adjoined.push_back(sizes.size());
    sizes.push_back(1);
    algebras.push_back(Algebra::make(std::move(sizes)));
  }
  std::vector<MatrixUnitHom> embeddings;
  for (std::size_t k = 0; k < system.embeddings().size(); ++k) {
    const auto& e = system.embeddings()[k];
    auto copies = e.copies();
    const Algebra& cod = e.codomain();
    std::vector<Copy> extra;
    std::vector<std::vector<bool>> used(cod.summands());
    for (std::size_t t = 0; t < cod.summands(); ++t) used[t].assign(cod.size(t), false);
    for (const auto& list : copies)
      for (const auto& c : list)
        for (auto i : c.indices) used[c.target][i] = true;
    for (std::size_t t = 0; t < cod.summands(); ++t)
      for (std::size_t i = 0; i < cod.size(t); ++i)
        if (!used[t][i]) extra.push_back({t, {i}});
    extra.push_back({cod.summands(), {0}});
    copies.push_back(std::move(extra));
    embeddings.push_back(MatrixUnitHom::make(algebras[k], algebras[k + 1], std::move(copies)));
  }
  u.system = DirectSystem::make(std::move(algebras), std::move(embeddings), false);
  return u;
}

DirectSystem uhf_system(std::size_t initial, std::size_t multiplicity, bool refinement) {
  Generator g;
  g.kind = refinement ? GeneratorKind::Refinement : GeneratorKind::Standard;
  g.initial = initial;
  g.multiplicities = {multiplicity};
  return DirectSystem::from_generator(g);
}

DirectSystem alternation_system(const std::vector<std::size_t>& multiplicities, bool refinement_first,
                                std::size_t initial) {
  Generator g;
  g.kind = GeneratorKind::Alternation;
  g.initial = initial;
  g.multiplicities = multiplicities;
  g.refinement_first = refinement_first;
  return DirectSystem::from_generator(g, multiplicities.size() + 1);
}

DirectSystem twist_system(std::size_t initial, std::size_t multiplicity,
                          const std::vector<std::size_t>& permutation) {
  Generator g;
  g.kind = GeneratorKind::Twist;
  g.initial = initial;
  g.multiplicities = {multiplicity};
  g.permutations = {permutation};
  return DirectSystem::from_generator(g);
}

}  // namespace bratteli

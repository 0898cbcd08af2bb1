#include "bratteli/io.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bratteli/error.hpp"

namespace bratteli::io {

namespace {

// A JSON value plus the key path that reached it.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const Json& raw() const { return j_; }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  Node at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) throw FormatError(path_ + "/" + key, "missing key");
    return Node(j_.at(key), path_ + "/" + key);
  }
  Node at(std::size_t i) const { return Node(array().at(i), path_ + "/" + std::to_string(i)); }
  std::size_t size() const { return array().size(); }

  std::uint64_t as_uint() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
      fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  std::size_t as_size() const { return static_cast<std::size_t>(as_uint()); }
  std::int64_t as_int() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }
  bool as_bool() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }
  std::string as_string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::vector<std::size_t> as_sizes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).as_size());
    return out;
  }
  std::vector<std::uint64_t> as_uints() const {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).as_uint());
    return out;
  }
  Matrix as_matrix() const {
    Matrix m;
    for (std::size_t i = 0; i < size(); ++i) m.push_back(at(i).as_uints());
    for (std::size_t i = 1; i < m.size(); ++i)
      if (m[i].size() != m[0].size()) at(i).fail("ragged matrix row");
    return m;
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(path_.empty() ? "/" : path_, what); }

 private:
  const Json& array() const {
    if (!j_.is_array()) fail("expected an array");
    return j_;
  }
  const Json& j_;
  std::string path_;
};

// Runs a constructor and reports its validation failure at `path`.
template <class F>
auto validated(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw FormatError(path.empty() ? "/" : path, e.what());
  }
}

Json occurrence_json(const Occurrence& o) {
  if (o.source) return *o.source;
  return Json{{"zero", o.zero_size}};
}

Json order_json(const GapOrder& order) {
  Json out = Json::array();
  for (const auto& target : order) {
    Json t = Json::array();
    for (const auto& o : target) t.push_back(occurrence_json(o));
    out.push_back(t);
  }
  return out;
}

GapOrder order_from(const Node& n) {
  GapOrder order;
  for (std::size_t t = 0; t < n.size(); ++t) {
    Node target = n.at(t);
    std::vector<Occurrence> list;
    for (std::size_t i = 0; i < target.size(); ++i) {
      Node o = target.at(i);
      if (o.raw().is_object())
        list.push_back({std::nullopt, o.at("zero").as_size()});
      else
        list.push_back({o.as_size(), 0});
    }
    order.push_back(std::move(list));
  }
  return order;
}

Json tail_json(const Tail& t) {
  Json j;
  j["from_level"] = t.from_level;
  if (t.mode == TailMode::Graph) {
    j["period"] = t.period;
    if (!t.padding.empty()) j["padding"] = t.padding;
  } else {
    j["mode"] = "tree";
    Json period = Json::array();
    for (const auto& g : t.tree_period) {
      Json gj{{"sources", g.sources}, {"targets", g.targets}};
      gj["edges"] = Json::array();
      for (const auto& e : g.edges) gj["edges"].push_back({{"from", e.from}, {"to", e.to}, {"pad", e.pad}});
      if (!g.orphans.empty()) {
        gj["orphans"] = Json::array();
        for (const auto& o : g.orphans)
          gj["orphans"].push_back({{"vertex", o.vertex}, {"base", o.base}, {"step", o.step}});
      }
      period.push_back(gj);
    }
    j["period"] = period;
  }
  if (!t.order.empty()) {
    j["order"] = Json::array();
    for (const auto& o : t.order) j["order"].push_back(order_json(o));
  }
  return j;
}

Tail tail_from(const Node& n) {
  Tail t;
  t.from_level = n.at("from_level").as_size();
  if (n.has("mode")) {
    const std::string mode = n.at("mode").as_string();
    if (mode == "tree")
      t.mode = TailMode::Tree;
    else if (mode != "graph")
      n.at("mode").fail("unknown tail mode '" + mode + "'");
  }
  Node period = n.at("period");
  for (std::size_t i = 0; i < period.size(); ++i) {
    Node g = period.at(i);
    if (t.mode == TailMode::Graph) {
      t.period.push_back(g.as_matrix());
      continue;
    }
    TreeGap tg;
    tg.sources = g.at("sources").as_size();
    tg.targets = g.at("targets").as_size();
    Node edges = g.at("edges");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      Node ej = edges.at(e);
      tg.edges.push_back({ej.at("from").as_size(), ej.at("to").as_size(),
                          ej.has("pad") ? ej.at("pad").as_uint() : 0});
    }
    if (g.has("orphans")) {
      Node orphans = g.at("orphans");
      for (std::size_t o = 0; o < orphans.size(); ++o) {
        Node oj = orphans.at(o);
        tg.orphans.push_back({oj.at("vertex").as_size(), oj.has("base") ? oj.at("base").as_int() : 1,
                              oj.has("step") ? oj.at("step").as_int() : 0});
      }
    }
    t.tree_period.push_back(std::move(tg));
  }
  if (n.has("padding")) {
    Node pad = n.at("padding");
    for (std::size_t i = 0; i < pad.size(); ++i) t.padding.push_back(pad.at(i).as_uints());
  }
  if (n.has("order")) {
    Node order = n.at("order");
    for (std::size_t i = 0; i < order.size(); ++i) t.order.push_back(order_from(order.at(i)));
  }
  return t;
}

}  // namespace

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("/", std::string("not JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("/", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

// ---- diagrams ----------------------------------------------------------------------

Json to_json(const BratteliDiagram& d) {
  Json j;
  j["unital"] = d.unital();
  j["levels"] = Json::array();
  for (const auto& s : d.level_sizes()) j["levels"].push_back({{"sizes", s}});
  j["edges"] = Json::array();
  for (const auto& e : d.prefix_edges()) j["edges"].push_back(e);
  if (!d.prefix_order().empty()) {
    j["order"] = Json::array();
    for (const auto& o : d.prefix_order()) j["order"].push_back(order_json(o));
  }
  if (d.tail()) j["tail"] = tail_json(*d.tail());
  return j;
}

BratteliDiagram diagram_from_json(const Json& j) {
  Node root(j, "");
  const bool unital = root.has("unital") ? root.at("unital").as_bool() : true;
  std::vector<std::vector<std::size_t>> sizes;
  Node levels = root.at("levels");
  for (std::size_t i = 0; i < levels.size(); ++i) sizes.push_back(levels.at(i).at("sizes").as_sizes());
  if (sizes.empty()) levels.fail("at least one level is required");
  std::vector<Matrix> edges;
  if (root.has("edges")) {
    Node e = root.at("edges");
    for (std::size_t i = 0; i < e.size(); ++i) edges.push_back(e.at(i).as_matrix());
  }
  std::optional<Tail> tail;
  if (root.has("tail")) tail = tail_from(root.at("tail"));
  std::vector<GapOrder> order;
  if (root.has("order")) {
    Node o = root.at("order");
    for (std::size_t i = 0; i < o.size(); ++i) order.push_back(order_from(o.at(i)));
  }
  // point at the most likely culprit
  try {
    return BratteliDiagram::make(unital, std::move(sizes), std::move(edges), std::move(tail),
                                 std::move(order));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    std::string path = "/";
    for (const char* key : {"edges", "tail", "order", "levels"})
      if (what.find(key) != std::string::npos && root.has(key)) {
        path = std::string("/") + key;
        break;
      }
    if (path == "/" && root.has("edges")) path = "/edges";
    throw FormatError(path, what);
  }
}

// ---- generators and systems -------------------------------------------------------------

Json to_json(const Generator& g) {
  Json j{{"kind", to_string(g.kind)}};
  if (g.kind == GeneratorKind::Diagram) return j;
  j["initial"] = g.initial;
  j["multiplicities"] = g.multiplicities;
  if (g.kind == GeneratorKind::Alternation) j["refinement_first"] = g.refinement_first;
  if (g.kind == GeneratorKind::Twist) j["permutations"] = g.permutations;
  return j;
}

Generator generator_from_json(const Json& j, const std::string& path) {
  Node n(j, path);
  Generator g;
  g.kind = validated(path + "/kind", [&] { return parse_generator_kind(n.at("kind").as_string()); });
  if (g.kind == GeneratorKind::Diagram) return g;
  if (n.has("initial")) g.initial = n.at("initial").as_size();
  g.multiplicities = n.at("multiplicities").as_sizes();
  if (n.has("refinement_first")) g.refinement_first = n.at("refinement_first").as_bool();
  if (n.has("permutations")) {
    Node p = n.at("permutations");
    for (std::size_t i = 0; i < p.size(); ++i) g.permutations.push_back(p.at(i).as_sizes());
  }
  return g;
}

DirectSystem system_from_document(const Json& j) {
  Node root(j, "");
  if (root.has("generator")) {
    Generator g = generator_from_json(j.at("generator"), "/generator");
    if (g.kind != GeneratorKind::Diagram) {
      const std::size_t levels = root.has("depth") ? root.at("depth").as_size() : 1;
      return validated("/generator", [&] { return DirectSystem::from_generator(g, levels); });
    }
  }
  BratteliDiagram d = diagram_from_json(j);
  return validated("/", [&] { return DirectSystem::from_diagram(d); });
}

Json to_json(const DirectSystem& s) {
  Json j;
  if (s.extensible() && s.generator().kind != GeneratorKind::Diagram) {
    j["generator"] = to_json(s.generator());
    j["depth"] = s.levels();
    return j;
  }
  j["algebras"] = Json::array();
  for (const auto& a : s.algebras()) j["algebras"].push_back(to_json(a));
  j["embeddings"] = Json::array();
  for (const auto& e : s.embeddings()) j["embeddings"].push_back(to_json(e));
  j["triangular"] = s.triangular();
  return j;
}

DirectSystem system_from_json(const Json& j) {
  Node root(j, "");
  if (root.has("generator")) return system_from_document(j);
  std::vector<Algebra> algebras;
  Node a = root.at("algebras");
  for (std::size_t i = 0; i < a.size(); ++i) algebras.push_back(algebra_from_json(a.at(i).raw(), a.at(i).path()));
  std::vector<MatrixUnitHom> embeddings;
  Node e = root.at("embeddings");
  for (std::size_t i = 0; i < e.size(); ++i) embeddings.push_back(hom_from_json(e.at(i).raw(), e.at(i).path()));
  const bool tri = root.has("triangular") && root.at("triangular").as_bool();
  return validated("/embeddings", [&] { return DirectSystem::make(algebras, embeddings, tri); });
}

// ---- algebras, maps, elements ----------------------------------------------------------

Json to_json(const Algebra& a) { return a.sizes(); }

Algebra algebra_from_json(const Json& j, const std::string& path) {
  Node n(j, path);
  auto sizes = n.as_sizes();
  return validated(path, [&] { return Algebra::make(sizes); });
}

Json to_json(const MatrixUnitHom& h) {
  Json j{{"domain", to_json(h.domain())}, {"codomain", to_json(h.codomain())}};
  j["copies"] = Json::array();
  for (const auto& list : h.copies()) {
    Json l = Json::array();
    for (const auto& c : list) l.push_back({{"target", c.target}, {"indices", c.indices}});
    j["copies"].push_back(l);
  }
  return j;
}

MatrixUnitHom hom_from_json(const Json& j, const std::string& path) {
  Node n(j, path);
  Algebra dom = algebra_from_json(n.at("domain").raw(), path + "/domain");
  Algebra cod = algebra_from_json(n.at("codomain").raw(), path + "/codomain");
  std::vector<std::vector<Copy>> copies;
  Node c = n.at("copies");
  for (std::size_t s = 0; s < c.size(); ++s) {
    Node list = c.at(s);
    std::vector<Copy> out;
    for (std::size_t i = 0; i < list.size(); ++i)
      out.push_back({list.at(i).at("target").as_size(), list.at(i).at("indices").as_sizes()});
    copies.push_back(std::move(out));
  }
  return validated(path + "/copies", [&] { return MatrixUnitHom::make(dom, cod, copies); });
}

Json to_json(const CompressionMap& m) {
  Json j{{"domain", to_json(m.domain())}, {"codomain", to_json(m.codomain())}, {"ordered", m.ordered()}};
  j["parts"] = Json::array();
  for (const auto& p : m.parts())
    j["parts"].push_back(
        {{"src_summand", p.src_summand}, {"src", p.src}, {"dst_summand", p.dst_summand}, {"dst", p.dst}});
  return j;
}

CompressionMap compression_from_json(const Json& j, const std::string& path) {
  Node n(j, path);
  Algebra dom = algebra_from_json(n.at("domain").raw(), path + "/domain");
  Algebra cod = algebra_from_json(n.at("codomain").raw(), path + "/codomain");
  const bool ordered = n.has("ordered") && n.at("ordered").as_bool();
  std::vector<Elementary> parts;
  Node p = n.at("parts");
  for (std::size_t i = 0; i < p.size(); ++i) {
    Node e = p.at(i);
    parts.push_back({e.at("src_summand").as_size(), e.at("src").as_sizes(), e.at("dst_summand").as_size(),
                     e.at("dst").as_sizes()});
  }
  return validated(path + "/parts", [&] { return CompressionMap::make(dom, cod, parts, ordered); });
}

Json to_json(const Element& x) {
  Json j{{"algebra", to_json(x.algebra())}};
  j["entries"] = Json::array();
  for (const auto& [p, v] : x.entries()) j["entries"].push_back(Json::array({p.row, p.col, to_string(v)}));
  return j;
}

Element element_from_json(const Json& j, const std::string& path) {
  Node n(j, path);
  Element x(algebra_from_json(n.at("algebra").raw(), path + "/algebra"));
  Node e = n.at("entries");
  for (std::size_t i = 0; i < e.size(); ++i) {
    Node t = e.at(i);
    if (t.size() != 3) t.fail("entry must be [row, col, \"p/q\"]");
    const IndexPair p{t.at(0).as_size(), t.at(1).as_size()};
    const Rational v = validated(t.path() + "/2", [&] { return parse_rational(t.at(2).as_string()); });
    validated(t.path(), [&] {
      x.set(p, v);
      return 0;
    });
  }
  return x;
}

// ---- reports ------------------------------------------------------------------------------

Json to_json(const CheckRecord& r) {
  Json j{{"check", r.check}, {"level", r.level}, {"passed", r.passed}};
  j["counterexample"] = r.counterexample ? Json::array({r.counterexample->row, r.counterexample->col}) : Json();
  j["detail"] = r.detail;
  return j;
}

CheckRecord record_from_json(const Json& j, const std::string& path) {
  Node n(j, path);
  CheckRecord r;
  r.check = n.at("check").as_string();
  r.level = n.at("level").as_size();
  r.passed = n.at("passed").as_bool();
  if (n.has("counterexample") && !n.at("counterexample").raw().is_null()) {
    Node c = n.at("counterexample");
    if (c.size() != 2) c.fail("counterexample must be [row, col]");
    r.counterexample = IndexPair{c.at(0).as_size(), c.at(1).as_size()};
  }
  if (n.has("detail")) r.detail = n.at("detail").as_string();
  return r;
}

Json to_json(const VerificationReport& r) {
  Json j = Json::array();
  for (const auto& rec : r.records) j.push_back(to_json(rec));
  return j;
}

void write_jsonl(std::ostream& out, const VerificationReport& r) {
  for (const auto& rec : r.records) out << to_json(rec).dump() << '\n';
}

// ---- certificates -------------------------------------------------------------------------

Json to_json(const InterpolationCertificate& c) {
  Json j;
  j["variant"] = to_string(c.variant);
  j["ordered"] = c.ordered;
  j["unitized"] = c.unitized;
  j["depth"] = c.depth;
  Json src;
  src["algebras"] = Json::array();
  for (const auto& a : c.source_algebras) src["algebras"].push_back(to_json(a));
  src["embeddings"] = Json::array();
  for (const auto& e : c.source_embeddings) src["embeddings"].push_back(to_json(e));
  j["source"] = src;
  Json tgt;
  tgt["levels"] = c.target_levels;
  tgt["distinguished"] = c.distinguished;
  tgt["algebras"] = Json::array();
  for (const auto& a : c.target_algebras) tgt["algebras"].push_back(to_json(a));
  tgt["embeddings"] = Json::array();
  for (const auto& e : c.target_embeddings) tgt["embeddings"].push_back(to_json(e));
  tgt["theta"] = Json::array();
  for (const auto& e : c.theta) tgt["theta"].push_back(to_json(e));
  j["target"] = tgt;
  j["gamma"] = Json::array();
  for (const auto& g : c.gamma) j["gamma"].push_back(to_json(g));
  j["delta"] = Json::array();
  for (const auto& d : c.delta) j["delta"].push_back(to_json(d));
  j["isometry"] = Json::array();
  for (const auto& i : c.isometry)
    j["isometry"].push_back({{"chosen", i.chosen}, {"gamma_prime", to_json(i.gamma_prime)}});
  j["report"] = to_json(c.report);
  return j;
}

InterpolationCertificate certificate_from_json(const Json& j) {
  Node root(j, "");
  InterpolationCertificate c;
  c.variant = validated("/variant", [&] { return parse_variant(root.at("variant").as_string()); });
  c.ordered = root.at("ordered").as_bool();
  c.unitized = root.has("unitized") && root.at("unitized").as_bool();
  c.depth = root.at("depth").as_size();

  auto algebras = [](const Node& n) {
    std::vector<Algebra> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(algebra_from_json(n.at(i).raw(), n.at(i).path()));
    return out;
  };
  auto homs = [](const Node& n) {
    std::vector<MatrixUnitHom> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(hom_from_json(n.at(i).raw(), n.at(i).path()));
    return out;
  };
  auto compressions = [](const Node& n) {
    std::vector<CompressionMap> out;
    for (std::size_t i = 0; i < n.size(); ++i)
      out.push_back(compression_from_json(n.at(i).raw(), n.at(i).path()));
    return out;
  };

  Node src = root.at("source");
  c.source_algebras = algebras(src.at("algebras"));
  c.source_embeddings = homs(src.at("embeddings"));
  Node tgt = root.at("target");
  c.target_levels = tgt.at("levels").as_sizes();
  c.distinguished = tgt.at("distinguished").as_sizes();
  c.target_algebras = algebras(tgt.at("algebras"));
  c.target_embeddings = homs(tgt.at("embeddings"));
  c.theta = homs(tgt.at("theta"));
  c.gamma = compressions(root.at("gamma"));
  c.delta = compressions(root.at("delta"));
  Node iso = root.at("isometry");
  for (std::size_t i = 0; i < iso.size(); ++i)
    c.isometry.push_back({iso.at(i).at("chosen").as_sizes(),
                          hom_from_json(iso.at(i).at("gamma_prime").raw(), iso.at(i).path() + "/gamma_prime")});
  if (root.has("report")) {
    Node rep = root.at("report");
    for (std::size_t i = 0; i < rep.size(); ++i) c.report.records.push_back(record_from_json(rep.at(i).raw(), rep.at(i).path()));
  }
  return c;
}

}  // namespace bratteli::io

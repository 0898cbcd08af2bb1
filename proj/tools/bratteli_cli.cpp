// bratteli: analyze diagrams, build and check interpolation certificates.
// Exit codes: 0 pass, 1 check failure, 2 format error, 3 precondition failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "bratteli/error.hpp"
#include "bratteli/interpolation.hpp"
#include "bratteli/io.hpp"
#include "bratteli/norm.hpp"
#include "bratteli/structures.hpp"

using namespace bratteli;
using io::Json;

namespace {

constexpr int kPass = 0, kFail = 1, kFormat = 2, kPrecondition = 3;

std::uint64_t sentinel_from_env() {
  const char* s = std::getenv("BRATTELI_SENTINEL");
  if (!s || !*s) return kDefaultSentinel;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || v == 0) throw FormatError("BRATTELI_SENTINEL", "expected a positive integer");
  return v;
}

Json node_json(const WitnessNode& n) { return Json::array({n.level, n.vertex}); }

Json verdict_json(const Verdict& v) {
  return {{"value", v.value}, {"exact", v.exact}, {"explanation", v.explanation}};
}

BratteliDiagram document_diagram(const Json& doc) {
  if (doc.contains("generator") && doc["generator"].value("kind", "") != "ordered")
    return io::system_from_document(doc).diagram();
  return io::diagram_from_json(doc);
}

int cmd_analyze(const std::string& path, std::size_t horizon) {
  const BratteliDiagram d = document_diagram(io::read_file(path));
  Json out;
  const auto f = has_fermion_property(d, horizon);
  if (const auto* w = std::get_if<FermionWitness>(&f)) {
    out["fermion"] = "witness";
    Json chain = Json::array();
    for (const auto& n : w->chain) chain.push_back(node_json(n));
    out["fermion_detail"] = {{"chain", chain}, {"exact", w->exact}};
    if (w->cycle_levels) out["fermion_detail"]["cycle_levels"] = *w->cycle_levels;
  } else {
    const auto& a = std::get<Absent>(f);
    out["fermion"] = "absent";
    out["fermion_detail"] = {{"reason", a.reason}, {"exact", a.exact}};
  }
  const Verdict simple = is_simple(d), centre = has_trivial_centre(d);
  out["simple"] = simple.value;
  out["trivial_centre"] = centre.value;
  out["verdicts"] = {{"simple", verdict_json(simple)}, {"trivial_centre", verdict_json(centre)}};
  if (auto p = find_unique_descending_path(d)) {
    out["unique_path"] = node_json(p->start);
    out["unique_path_exact"] = p->exact;
  } else {
    out["unique_path"] = nullptr;
  }
  try {
    const Classification c = classify(d, sentinel_from_env());
    out["classification"] = c.tag;
    const auto& p = c.predicates;
    out["classification_detail"] = {{"type_one", c.type_one},
                                    {"interpretive", c.interpretive},
                                    {"explanation", c.explanation},
                                    {"B", p.bounded},
                                    {"P", p.per_path_bounded},
                                    {"U", p.uncountable_paths}};
  } catch (const UnsupportedClassification& e) {
    out["classification"] = "unsupported";
    out["classification_detail"] = {{"explanation", e.what()}};
  }
  std::cout << out.dump(2) << '\n';
  return kPass;
}

int cmd_construct(const std::string& source, const std::string& target, std::size_t depth,
                  const std::string& variant, std::size_t horizon, const std::string& output) {
  const DirectSystem a = io::system_from_document(io::read_file(source));
  const DirectSystem b = io::system_from_document(io::read_file(target));
  Variant v;
  try {
    v = parse_variant(variant);
  } catch (const ValidationError& e) {
    throw FormatError("--variant", e.what());
  }
  const InterpolationCertificate cert = lemma11_construct(a, b, depth, v, horizon);
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw FormatError("-o", "cannot write '" + output + "'");
    out << io::to_json(cert).dump() << '\n';
  }
  for (std::size_t k = 0; k < cert.depth; ++k) {
    bool ok = true;
    for (const auto& r : cert.report.records)
      if (r.level == k + 1 && !r.passed) ok = false;
    std::cout << "level " << k + 1 << ": n=" << cert.target_levels[k] << " summand=" << cert.distinguished[k]
              << " checks=" << (ok ? "pass" : "FAIL") << '\n';
  }
  std::cout << "variant=" << to_string(cert.variant) << " ordered=" << (cert.ordered ? "true" : "false")
            << " unitized=" << (cert.unitized ? "true" : "false")
            << " result=" << (cert.report.passed() ? "pass" : "FAIL") << '\n';
  return cert.report.passed() ? kPass : kFail;
}

int cmd_verify(const std::string& path, bool serial) {
  const InterpolationCertificate cert = io::certificate_from_json(io::read_file(path));
  const VerificationReport r = serial ? verify_certificate_serial(cert) : verify_certificate(cert);
  io::write_jsonl(std::cout, r);
  Json summary{{"passed", r.passed()}, {"reproduces_embedded", r.records == cert.report.records}};
  if (const auto* f = r.first_failure()) summary["first_failure"] = io::to_json(*f);
  std::cout << summary.dump() << '\n';
  return r.passed() ? kPass : kFail;
}

Rational sample_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-8, 8), den(1, 8);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

// gamma must preserve norms; delta must not increase them.  delta only reads
// entries on its source index lists, so b is drawn on those.
int cmd_normcheck(const std::string& path, std::size_t samples, double tol, std::uint64_t seed) {
  const InterpolationCertificate cert = io::certificate_from_json(io::read_file(path));
  std::mt19937_64 rng(seed);
  Json levels = Json::array();
  bool ok = true;
  for (std::size_t k = 0; k < cert.gamma.size(); ++k) {
    const auto& g = cert.gamma[k];
    const auto& d = cert.delta[k];
    double gamma_dev = 0, delta_excess = -INFINITY;
    for (std::size_t i = 0; i < samples; ++i) {
      Element a(g.domain());
      for (const auto& u : g.domain().basis()) a.set(u, sample_rational(rng));
      gamma_dev = std::max(gamma_dev, std::abs(operator_norm(g.apply(a)) - operator_norm(a)));
      Element b(d.domain());
      for (const auto& p : d.parts()) {
        const std::size_t base = d.domain().offset(p.src_summand);
        for (auto r : p.src)
          for (auto c : p.src) b.set({base + r, base + c}, sample_rational(rng));
      }
      delta_excess = std::max(delta_excess, operator_norm(d.apply(b)) - operator_norm(b));
    }
    if (samples == 0) delta_excess = 0;
    const bool level_ok = gamma_dev <= tol && delta_excess <= tol;
    ok = ok && level_ok;
    levels.push_back({{"level", k + 1},
                      {"gamma_norm_deviation", gamma_dev},
                      {"delta_norm_excess", delta_excess},
                      {"passed", level_ok}});
  }
  Json out{{"samples", samples}, {"tolerance", tol}, {"seed", seed}, {"levels", levels}, {"passed", ok}};
  std::cout << out.dump(2) << '\n';
  return ok ? kPass : kFail;
}

int cmd_lexprod(std::size_t s, std::size_t r) {
  const auto p = lexicographic_product(s, r);
  Json out{{"s", s}, {"r", r}, {"dimension", p.dimension}, {"equals_lex_triangular", p.equals_lex_triangular}};
  std::cout << out.dump() << '\n';
  return p.equals_lex_triangular ? kPass : kFail;
}

int cmd_twist(std::size_t n, std::size_t t, const std::vector<std::size_t>& perm, std::size_t depth,
              std::size_t samples, double tol, std::uint64_t seed) {
  std::vector<std::size_t> u = perm;
  if (u.empty())
    for (std::size_t i = 0; i < t; ++i) u.push_back(i);
  const DirectSystem sys = twist_system(n, t, u);
  const TwistReport rep = twist_decomposition(sys, depth, samples, seed, tol);
  Json levels = Json::array();
  for (const auto& l : rep.levels)
    levels.push_back({{"level", l.level},
                      {"size", l.size},
                      {"minus_dimension", l.minus_dimension},
                      {"column_dimension", l.column_dimension},
                      {"split_bijective", l.split_bijective},
                      {"agrees_with_refinement", l.agrees_with_refinement},
                      {"square_commutes", l.square_commutes}});
  Json out{{"levels", levels},
           {"samples", rep.samples},
           {"worst_lower", rep.worst_lower},
           {"worst_upper", rep.worst_upper},
           {"norms_ok", rep.norms_ok},
           {"identity_is_refinement", rep.identity_is_refinement},
           {"passed", rep.passed()}};
  std::cout << out.dump(2) << '\n';
  return rep.passed() ? kPass : kFail;
}

int cmd_remark24(std::size_t m_max) {
  Json out = Json::array();
  for (const auto& v : remark24_search(m_max)) {
    Json w = Json::array();
    for (const auto& s : v.witness) {
      Json units = Json::array();
      for (const auto& t : s) units.push_back(Json::array({t.at.row, t.at.col}));
      w.push_back(units);
    }
    out.push_back({{"m", v.m}, {"feasible", v.feasible}, {"candidates", v.candidates}, {"witness", w},
                   {"reason", v.reason}});
  }
  std::cout << out.dump(2) << '\n';
  return kPass;
}

int cmd_c0(const std::string& variant, std::size_t levels, std::size_t samples, std::uint64_t seed) {
  CornerVariant v;
  try {
    v = parse_corner_variant(variant);
  } catch (const ValidationError& e) {
    throw FormatError("--variant", e.what());
  }
  const CornerStructure s = c0_structure(v, levels);
  const NormSampleReport n = c0_norm_samples(s, samples, seed);
  Json out{{"variant", variant},
           {"levels", s.family.levels},
           {"indices", s.family.indices},
           {"search", s.family.search_log},
           {"idempotent", s.idempotent},
           {"orthogonal", s.orthogonal},
           {"inside_f0", s.inside_f0},
           {"embeddings_keep_f0", s.embeddings_keep_f0},
           {"norm_worst_excess", n.worst_excess},
           {"passed", s.passed() && n.passed}};
  std::cout << out.dump(2) << '\n';
  return s.passed() && n.passed ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bratteli diagrams and interpolation certificates"};
  app.require_subcommand(1);
  std::uint64_t seed = 42;

  std::string path;
  std::size_t horizon = 16;
  auto* analyze = app.add_subcommand("analyze", "Fermion property, simplicity, centre, classification");
  analyze->add_option("path", path, "diagram document")->required();
  analyze->add_option("--horizon", horizon, "levels searched for truncated diagrams");

  std::string source, target, variant = "selfadjoint", output;
  std::size_t depth = 2, cons_horizon = 64;
  auto* construct = app.add_subcommand("construct", "build an interpolation certificate");
  construct->add_option("--source", source)->required();
  construct->add_option("--target", target)->required();
  construct->add_option("--depth", depth);
  construct->add_option("--variant", variant, "selfadjoint, ordered or refinement");
  construct->add_option("--horizon", cons_horizon, "deepest target level searched");
  construct->add_option("-o,--output", output);

  bool serial = false;
  auto* verify = app.add_subcommand("verify", "re-check a certificate");
  verify->add_option("cert", path)->required();
  verify->add_flag("--serial", serial, "single-threaded reference checks");

  std::size_t samples = 1000;
  double tol = 1e-9;
  auto* normcheck = app.add_subcommand("normcheck", "sampled norm checks of gamma and delta");
  normcheck->add_option("cert", path)->required();
  normcheck->add_option("--samples", samples);
  normcheck->add_option("--tol", tol);
  normcheck->add_option("--seed", seed);

  std::size_t s = 2, r = 2;
  auto* lexprod = app.add_subcommand("lexprod", "lexicographic product basis");
  lexprod->add_option("--s", s);
  lexprod->add_option("--r", r);

  std::size_t n = 2, t = 2, twist_depth = 3;
  std::vector<std::size_t> perm;
  auto* twist = app.add_subcommand("twist", "twist split checks");
  twist->add_option("--n", n, "initial size");
  twist->add_option("--t", t, "multiplicity");
  twist->add_option("--perm", perm, "permutation of 0..t-1")->delimiter(',');
  twist->add_option("--depth", twist_depth);
  twist->add_option("--samples", samples);
  twist->add_option("--tol", tol);
  twist->add_option("--seed", seed);

  std::size_t m_max = 4;
  auto* remark = app.add_subcommand("remark24", "search maps M_2 -> T_m sending units to unit sums");
  remark->add_option("--m-max", m_max);

  std::string corner = "refinement";
  std::size_t corner_levels = 6;
  auto* c0 = app.add_subcommand("c0", "corner projection family and its expectation");
  c0->add_option("--variant", corner);
  c0->add_option("--levels", corner_levels);
  c0->add_option("--samples", samples);
  c0->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFormat;
  }

  try {
    if (*analyze) return cmd_analyze(path, horizon);
    if (*construct) return cmd_construct(source, target, depth, variant, cons_horizon, output);
    if (*verify) return cmd_verify(path, serial);
    if (*normcheck) return cmd_normcheck(path, samples, tol, seed);
    if (*lexprod) return cmd_lexprod(s, r);
    if (*twist) return cmd_twist(n, t, perm, twist_depth, samples, tol, seed);
    if (*remark) return cmd_remark24(m_max);
    if (*c0) return cmd_c0(corner, corner_levels, samples, seed);
  } catch (const FormatError& e) {
    std::cerr << "format error at " << e.what() << '\n';
    return kFormat;
  } catch (const FermionUnavailable& e) {
    std::cerr << "no Fermion witness: " << e.what() << " (deepest level searched: " << e.deepest_level()
              << ")\n";
    return kPrecondition;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kFormat;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kFail;
}

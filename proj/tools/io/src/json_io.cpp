#include "treeshift_io/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace treeshift::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

std::string at(const std::string& where, std::size_t k) { return where + "[" + std::to_string(k) + "]"; }
std::string at(const std::string& where, const char* key) { return where + "." + key; }

// Non-finite values have no JSON number form.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(x > 0 ? "inf" : (x < 0 ? "-inf" : "nan")); }

Json vertex_or_null(Vertex v, const DirectedTree* tree) {
  if (tree && v != kNoVertex && v < tree->size()) return vertex_to_json(tree->id(v));
  return nullptr;
}

std::vector<VertexId> vertex_list(const Json& j, const std::string& where) {
  std::vector<VertexId> out;
  for (std::size_t k = 0; k < array(j, where).size(); ++k) out.push_back(vertex_from_json(j[k], at(where, k)));
  return out;
}

}  // namespace

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

VertexId vertex_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return VertexId(j.get<std::int64_t>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer())
    return VertexId(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
  if (j.is_string()) return VertexId::parse(j.get<std::string>());
  fail(where, "expected a vertex (integer, [i, j] pair or string)");
}

Json vertex_to_json(const VertexId& id) {
  if (id.is_integer()) return id.integer();
  if (id.is_pair()) return Json::array({id.pair().first, id.pair().second});
  return id.name();
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_object()) {
    const Json* im = optional_field(j, "im");
    return {number(field(j, "re", where), at(where, "re")), im ? number(*im, at(where, "im")) : 0.0};
  }
  fail(where, "expected a number or {\"re\", \"im\"}");
}

Json complex_to_json(Complex z) { return Json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

DirectedTree tree_from_json(const Json& j) {
  const std::string where = "tree";
  if (!j.is_object()) fail(where, "expected an object");
  if (const Json* fam = optional_field(j, "family")) {
    if (!fam->is_string()) fail(at(where, "family"), "expected a string");
    FamilyParams p;
    p.family = family_from_string(fam->get<std::string>());
    const Json empty = Json::object();
    const Json* params = optional_field(j, "params");
    const Json& pr = params ? *params : empty;
    const std::string pw = at(where, "params");
    p.depth = integer(field(pr, "depth", pw), at(pw, "depth"));
    if (const Json* e = optional_field(pr, "eta")) p.eta = integer(*e, at(pw, "eta"));
    if (const Json* k = optional_field(pr, "kappa")) {
      if (k->is_string() && (k->get<std::string>() == "inf" || k->get<std::string>() == "infinity"))
        p.kappa.reset();
      else
        p.kappa = integer(*k, at(pw, "kappa"));
    } else if (p.family == Family::t_eta_kappa) {
      fail(pw, "missing \"kappa\"");
    }
    if (const Json* b = optional_field(pr, "back")) p.back = integer(*b, at(pw, "back"));
    return DirectedTree::make_family(p);
  }
  std::vector<VertexId> vertices = vertex_list(field(j, "vertices", where), at(where, "vertices"));
  std::vector<Edge> edges;
  const Json& e = array(field(j, "edges", where), at(where, "edges"));
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!e[k].is_array() || e[k].size() != 2) fail(at(at(where, "edges"), k), "expected [parent, child]");
    edges.emplace_back(vertex_from_json(e[k][0], at(at(where, "edges"), k)),
                       vertex_from_json(e[k][1], at(at(where, "edges"), k)));
  }
  std::vector<VertexId> truncated;
  if (const Json* t = optional_field(j, "truncated")) truncated = vertex_list(*t, at(where, "truncated"));
  return DirectedTree::from_edges(std::move(vertices), edges, truncated);
}

Json tree_to_json(const DirectedTree& tree) {
  Json vertices = Json::array();
  Json edges = Json::array();
  Json truncated = Json::array();
  for (Vertex v = 0; v < tree.size(); ++v) {
    vertices.push_back(vertex_to_json(tree.id(v)));
    if (tree.parent(v) != kNoVertex)
      edges.push_back(Json::array({vertex_to_json(tree.id(tree.parent(v))), vertex_to_json(tree.id(v))}));
    if (tree.is_truncated(v)) truncated.push_back(vertex_to_json(tree.id(v)));
  }
  return Json{{"vertices", vertices}, {"edges", edges}, {"truncated", truncated}};
}

WeightedShift weights_from_json(DirectedTree tree, const Json& j, bool require_all) {
  const std::string where = "weights";
  const Json& list = array(field(j, "weights", where), at(where, "weights"));
  std::map<VertexId, Complex> w;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string item = at(at(where, "weights"), k);
    VertexId v = vertex_from_json(field(list[k], "v", item), at(item, "v"));
    if (!w.emplace(v, complex_from_json(list[k], item)).second) fail(item, "duplicate vertex " + v.to_string());
  }
  return WeightedShift::from_map(std::move(tree), w, require_all);
}

Json weights_to_json(const WeightedShift& shift) {
  Json list = Json::array();
  for (Vertex v = 0; v < shift.tree().size(); ++v) {
    if (shift.tree().parent(v) == kNoVertex) continue;
    Json e = complex_to_json(shift.weight(v));
    e["v"] = vertex_to_json(shift.tree().id(v));
    list.push_back(e);
  }
  return Json{{"weights", list}};
}

std::vector<Complex> weight_list_from_json(const Json& j, int* first_vertex) {
  const std::string where = "weights";
  const Json& list = j.is_array() ? j : array(field(j, "weights", where), at(where, "weights"));
  bool keyed = !list.empty() && list[0].is_object() && list[0].contains("v");
  std::vector<Complex> out;
  if (!keyed) {
    for (std::size_t k = 0; k < list.size(); ++k) out.push_back(complex_from_json(list[k], at(where, k)));
    return out;
  }
  std::map<int, Complex> byv;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string item = at(where, k);
    int v = integer(field(list[k], "v", item), at(item, "v"));
    if (!byv.emplace(v, complex_from_json(list[k], item)).second) fail(item, "duplicate vertex");
  }
  int prev = byv.begin()->first - 1;
  for (const auto& [v, z] : byv) {
    if (v != prev + 1) fail(where, "vertex " + std::to_string(prev + 1) + " is missing");
    out.push_back(z);
    prev = v;
  }
  if (first_vertex) *first_vertex = byv.begin()->first;
  return out;
}

AtomicMeasure measure_from_json(const Json& j, const std::string& where) {
  const Json& list = array(field(j, "atoms", where), at(where, "atoms"));
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string item = at(at(where, "atoms"), k);
    atoms.push_back({number(field(list[k], "x", item), at(item, "x")), number(field(list[k], "w", item), at(item, "w"))});
  }
  return AtomicMeasure(std::move(atoms));
}

Json measure_to_json(const AtomicMeasure& mu) {
  Json atoms = Json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back(Json{{"x", num(a.position)}, {"w", num(a.mass)}});
  return Json{{"atoms", atoms}};
}

MomentSequence moments_from_json(const Json& j) {
  const Json& list = j.is_array() ? j : array(field(j, "t", "moments"), "moments.t");
  MomentSequence s;
  for (std::size_t k = 0; k < list.size(); ++k) s.values.push_back(number(list[k], at("moments.t", k)));
  return s;
}

MeasureSystem system_from_json(const DirectedTree& tree, const Json& j) {
  const std::string where = "system";
  const Json& measures = field(j, "measures", where);
  if (!measures.is_object()) fail(at(where, "measures"), "expected an object keyed by vertex");
  MeasureSystem s;
  s.mu.resize(tree.size());
  s.eps.assign(tree.size(), 0.0);
  std::vector<bool> seen(tree.size(), false);
  for (const auto& [key, doc] : measures.items()) {
    VertexId id = VertexId::parse(key);
    if (!tree.contains(id)) fail(at(where, "measures"), "unknown vertex " + key);
    Vertex v = tree.index(id);
    s.mu[v] = measure_from_json(doc, where + ".measures." + key);
    s.eps[v] = s.mu[v].mass_at_zero();
    seen[v] = true;
  }
  for (Vertex v = 0; v < tree.size(); ++v)
    if (!seen[v]) fail(at(where, "measures"), "no measure for vertex " + tree.id(v).to_string());
  if (const Json* eps = optional_field(j, "eps")) {
    if (!eps->is_object()) fail(at(where, "eps"), "expected an object keyed by vertex");
    for (const auto& [key, value] : eps->items()) {
      VertexId id = VertexId::parse(key);
      if (!tree.contains(id)) fail(at(where, "eps"), "unknown vertex " + key);
      s.eps[tree.index(id)] = number(value, where + ".eps." + key);
    }
  }
  return s;
}

Json system_to_json(const DirectedTree& tree, const MeasureSystem& system) {
  Json measures = Json::object();
  Json eps = Json::object();
  for (Vertex v = 0; v < tree.size(); ++v) {
    measures[tree.id(v).to_string()] = measure_to_json(system.mu[v]);
    eps[tree.id(v).to_string()] = num(system.eps[v]);
  }
  return Json{{"measures", measures}, {"eps", eps}, {"conditional", system.conditional}, {"provenance", system.provenance}};
}

BranchData branch_from_json(const Json& j) {
  const std::string where = "branch";
  BranchData d;
  d.eta = integer(field(j, "eta", where), at(where, "eta"));
  const Json& k = field(j, "kappa", where);
  if (k.is_string()) {
    if (k.get<std::string>() != "inf") fail(at(where, "kappa"), "expected an integer or \"inf\"");
  } else {
    d.kappa = integer(k, at(where, "kappa"));
  }
  if (const Json* m = optional_field(j, "branch_measures"))
    for (std::size_t i = 0; i < array(*m, at(where, "branch_measures")).size(); ++i)
      d.branch_measures.push_back(measure_from_json((*m)[i], at(at(where, "branch_measures"), i)));
  const Json& e = array(field(j, "entry_weights", where), at(where, "entry_weights"));
  for (std::size_t i = 0; i < e.size(); ++i) d.entry_weights.push_back(complex_from_json(e[i], at(at(where, "entry_weights"), i)));
  if (const Json* b = optional_field(j, "branch_weights")) {
    for (std::size_t i = 0; i < array(*b, at(where, "branch_weights")).size(); ++i) {
      const std::string bi = at(at(where, "branch_weights"), i);
      std::vector<Complex> row;
      for (std::size_t n = 0; n < array((*b)[i], bi).size(); ++n) row.push_back(complex_from_json((*b)[i][n], at(bi, n)));
      d.branch_weights.push_back(std::move(row));
    }
  }
  if (const Json* t = optional_field(j, "trunk_weights"))
    for (std::size_t i = 0; i < array(*t, at(where, "trunk_weights")).size(); ++i)
      d.trunk_weights.push_back(complex_from_json((*t)[i], at(at(where, "trunk_weights"), i)));
  if (const Json* nu = optional_field(j, "nu")) d.nu = measure_from_json(*nu, at(where, "nu"));
  return d;
}

Json finding_to_json(const Finding& f, const DirectedTree* tree) {
  Json vertex = vertex_or_null(f.vertex, tree);
  if (vertex.is_null() && f.id) vertex = vertex_to_json(*f.id);
  Json out{{"vertex", vertex}, {"tag", f.tag}, {"discrepancy", num(f.discrepancy)}, {"detail", f.detail}};
  if (f.position) out["position"] = num(*f.position);
  return out;
}

namespace {

Json block_to_json(const HankelBlock& b) {
  return Json{{"size", b.size},
              {"min_eigenvalue", num(b.min_eigenvalue)},
              {"spectral_norm", num(b.spectral_norm)},
              {"passes", b.passes}};
}

Json findings_to_json(const std::vector<Finding>& fs, const DirectedTree* tree) {
  Json out = Json::array();
  for (const Finding& f : fs) out.push_back(finding_to_json(f, tree));
  return out;
}

}  // namespace

Json verdict_to_json(const StieltjesVerdict& v) {
  Json out{{"status", to_string(v.status)},
           {"order", v.order},
           {"tolerance", num(v.tolerance)},
           {"hankel", block_to_json(v.hankel)},
           {"shifted_hankel", block_to_json(v.shifted)},
           {"witness", nullptr}};
  if (v.witness) {
    Json coeffs = Json::array();
    for (double c : v.witness->coefficients) coeffs.push_back(num(c));
    out["witness"] = Json{{"block", v.witness->block},
                          {"coefficients", coeffs},
                          {"quadratic_form", num(v.witness->quadratic_form)}};
  }
  return out;
}

Json validation_to_json(const ValidationReport& r) {
  Json list = Json::array();
  for (const Violation& v : r.violations) {
    Json vs = Json::array();
    for (const VertexId& id : v.vertices) vs.push_back(vertex_to_json(id));
    list.push_back(Json{{"kind", to_string(v.kind)}, {"detail", v.detail}, {"vertices", vs}});
  }
  return Json{{"valid", r.valid()}, {"violations", list}};
}

Json consistency_to_json(const ConsistencyReport& r, const DirectedTree& tree) {
  return Json{{"vertex", vertex_or_null(r.vertex, &tree)},
              {"consistent", r.consistent},
              {"discrepancy", num(r.discrepancy)},
              {"position", num(r.position)},
              {"eps", num(r.eps_stored)},
              {"child_sum", num(r.child_sum.value())},
              {"findings", findings_to_json(r.findings, &tree)}};
}

Json certificate_to_json(const Certificate& c, const DirectedTree& tree) {
  Json vertices = Json::array();
  for (const VertexCheck& v : c.vertices)
    vertices.push_back(Json{{"vertex", vertex_or_null(v.vertex, &tree)},
                            {"truncated", v.truncated},
                            {"consistency_discrepancy", num(v.consistency_discrepancy)},
                            {"moment_error", num(v.moment_error)},
                            {"eps", num(v.eps)},
                            {"passes", v.passes}});
  return Json{{"status", to_string(c.status)},
              {"horizon", c.horizon},
              {"tolerance", num(c.tolerance)},
              {"vertices", vertices},
              {"witnesses", findings_to_json(c.witnesses, &tree)},
              {"notes", c.notes}};
}

Json model_certificate_to_json(const ModelCertificate& c) {
  const DirectedTree* tree = c.shift ? &c.shift->tree() : nullptr;
  Json quantities = Json::object();
  for (const auto& [k, v] : c.quantities) quantities[k] = num(v);
  Json verdicts = Json::array();
  for (const StieltjesVerdict& v : c.verdicts) verdicts.push_back(verdict_to_json(v));
  Json out{{"family", c.family},
           {"status", to_string(c.status)},
           {"witnesses", findings_to_json(c.witnesses, tree)},
           {"notes", c.notes},
           {"quantities", quantities},
           {"stieltjes", verdicts},
           {"cross_check", nullptr}};
  if (c.cross_check && tree) out["cross_check"] = certificate_to_json(*c.cross_check, *tree);
  if (c.system && tree) out["system"] = system_to_json(*tree, *c.system);
  return out;
}

Json truncation_to_json(const TruncationEntry& e, const TruncationReport& r) {
  const DirectedTree& tree = e.shift.tree();
  Json vertices = Json::array();
  for (Vertex v = 0; v < tree.size(); ++v)
    vertices.push_back(Json{{"vertex", vertex_to_json(tree.id(v))},
                            {"weight", complex_to_json(e.shift.weight(v))},
                            {"kappa", e.kappa[v]},
                            {"retained", num(e.retained[v])},
                            {"eps", num(e.system.eps[v])},
                            {"measure", measure_to_json(e.system.mu[v])}});
  return Json{{"i", e.i},
              {"passes", r.passes},
              {"supports_within", r.supports_within},
              {"worst_discrepancy", num(r.worst_discrepancy)},
              {"alpha", num(r.alpha.value)},
              {"findings", findings_to_json(r.findings, &tree)},
              {"vertices", vertices}};
}

Json convergence_to_json(const ConvergenceReport& r, const DirectedTree& tree) {
  Json rows = Json::array();
  for (const ConvergenceRow& row : r.rows)
    rows.push_back(Json{{"i", row.i},
                        {"truncated_norm_sq", num(row.truncated_norm_sq)},
                        {"restricted_moment", num(row.restricted_moment)},
                        {"cross", complex_to_json(row.cross)},
                        {"residual", num(row.residual)},
                        {"residual_direct", num(row.residual_direct)},
                        {"max_weight_gap", num(row.max_weight_gap)}});
  return Json{{"vertex", vertex_or_null(r.vertex, &tree)},
              {"n", r.n},
              {"norm_sq", num(r.norm_sq)},
              {"max_support", num(r.max_support)},
              {"nonincreasing", r.nonincreasing},
              {"zero_beyond_support", r.zero_beyond_support},
              {"rows", rows}};
}

Json carleman_to_json(const CarlemanDiagnostic& d) {
  Json sums = Json::array();
  for (double s : d.partial_sums) sums.push_back(num(s));
  return Json{{"trend", to_string(d.trend)},
              {"growth_exponent", d.growth_exponent ? num(*d.growth_exponent) : Json(nullptr)},
              {"infinite_term", d.infinite_term},
              {"partial_sums", sums}};
}

}  // namespace treeshift::io

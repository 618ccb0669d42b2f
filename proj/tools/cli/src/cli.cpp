#include "treeshift_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "treeshift_io/json_io.hpp"

namespace treeshift::cli {

using io::Json;

namespace {

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(x > 0 ? "inf" : (x < 0 ? "-inf" : "nan")); }

std::string format_name(Format f) { return f == Format::json ? "json" : "text"; }

Json config_to_json(const RunConfig& c) {
  Json inputs = Json::object();
  auto put = [&](const char* key, const std::string& path) {
    if (!path.empty()) inputs[key] = path;
  };
  put("input", c.input);
  put("tree", c.tree);
  put("weights", c.weights);
  put("system", c.system);
  put("measure", c.measure);
  Json out{{"horizon", c.horizon},
           {"tol", c.tol},
           {"tol_source", c.tol_source},
           {"format", format_name(c.format)},
           {"i_list", c.i_list},
           {"inputs", inputs}};
  if (c.subcommand == "certify") out["family"] = c.family;
  if (c.t) out["t"] = *c.t;
  if (c.theta) out["theta"] = *c.theta;
  if (c.vertex) out["vertex"] = *c.vertex;
  if (c.subcommand == "converge") out["n"] = c.n;
  if (c.back) out["back"] = *c.back;
  return out;
}

// Documents either are the section itself or carry it under `key`.
const Json& section(const Json& doc, const char* key) {
  if (doc.is_object()) {
    auto it = doc.find(key);
    if (it != doc.end()) return *it;
  }
  return doc;
}

class Inputs {
 public:
  explicit Inputs(const RunConfig& c) : c_(c) {
    if (!c.input.empty()) combined_ = io::read_file(c.input);
  }

  bool has(const std::string& path, const char* key) const {
    return !path.empty() || (combined_.is_object() && combined_.contains(key));
  }

  // The section from its own file, or from the combined document.
  Json get(const std::string& path, const char* key) const {
    if (!path.empty()) return section(io::read_file(path), key);
    if (combined_.is_object() && combined_.contains(key)) return combined_[key];
    if (!combined_.is_null() && std::string(key) == "branch") return combined_;
    throw InputError(std::string("no ") + key + " document given");
  }

  // Some documents keep the key in the section (weights, t), so hand back the
  // enclosing object.
  Json get_keyed(const std::string& path, const char* key) const {
    if (!path.empty()) return io::read_file(path);
    if (combined_.is_object() && combined_.contains(key)) return combined_;
    throw InputError(std::string("no ") + key + " document given");
  }

  const Json& combined() const { return combined_; }

 private:
  const RunConfig& c_;
  Json combined_;
};

struct Outcome {
  int exit_code = kExitPass;
  Json result;
};

Json findings_json(const std::vector<Finding>& fs, const DirectedTree* tree) {
  Json out = Json::array();
  for (const Finding& f : fs) out.push_back(io::finding_to_json(f, tree));
  return out;
}

Json verdict_witnesses(const StieltjesVerdict& v) {
  Json out = Json::array();
  if (v.witness)
    out.push_back(io::finding_to_json(Finding{kNoVertex, v.witness->block, -v.witness->quadratic_form, std::nullopt,
                                              "quadratic form of the witness vector is negative"},
                                      nullptr));
  return out;
}

WeightedShift load_shift(const Inputs& in, const RunConfig& c) {
  DirectedTree tree = io::tree_from_json(in.get(c.tree, "tree"));
  return io::weights_from_json(std::move(tree), in.get_keyed(c.weights, "weights"));
}

std::optional<MeasureSystem> load_system(const Inputs& in, const RunConfig& c, const DirectedTree& tree) {
  if (!in.has(c.system, "system")) return std::nullopt;
  return io::system_from_json(tree, in.get(c.system, "system"));
}

MeasureSystem require_system(const Inputs& in, const RunConfig& c, const DirectedTree& tree) {
  auto s = load_system(in, c, tree);
  if (!s) throw InputError("no system document given");
  return *s;
}

Outcome validate_tree(const Inputs& in, const RunConfig& c) {
  Json doc = in.get(c.tree, "tree");
  ValidationReport r;
  if (doc.is_object() && doc.contains("family")) {
    r = validate(io::tree_from_json(doc));
  } else {
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges"))
      throw InputError("tree: expected \"vertices\" and \"edges\"");
    std::vector<VertexId> vertices;
    for (std::size_t k = 0; k < doc["vertices"].size(); ++k)
      vertices.push_back(io::vertex_from_json(doc["vertices"][k], "tree.vertices[" + std::to_string(k) + "]"));
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < doc["edges"].size(); ++k) {
      const Json& e = doc["edges"][k];
      const std::string where = "tree.edges[" + std::to_string(k) + "]";
      if (!e.is_array() || e.size() != 2) throw InputError(where + ": expected [parent, child]");
      edges.emplace_back(io::vertex_from_json(e[0], where), io::vertex_from_json(e[1], where));
    }
    r = validate_edges(vertices, edges);
  }
  Outcome out{r.valid() ? kExitPass : kExitRefuted, io::validation_to_json(r)};
  Json w = Json::array();
  for (const Violation& v : r.violations) {
    Json id = v.vertices.empty() ? Json(nullptr) : io::vertex_to_json(v.vertices.front());
    w.push_back(Json{{"vertex", id}, {"tag", to_string(v.kind)}, {"discrepancy", 1.0}, {"detail", v.detail}});
  }
  out.result["witnesses"] = w;
  return out;
}

Outcome moments(const Inputs& in, const RunConfig& c) {
  WeightedShift s = load_shift(in, c);
  auto system = load_system(in, c, s.tree());
  const DirectedTree& t = s.tree();
  Json rows = Json::array();
  for (Vertex v = 0; v < t.size(); ++v) {
    int n_max = c.horizon;
    if (!system) n_max = std::min(n_max, complete_depth(t, v).value_or(c.horizon));
    MomentSequence seq = vertex_moment_sequence(s, v, n_max, system ? &*system : nullptr);
    Json vals = Json::array();
    for (double x : seq.values) vals.push_back(num(x));
    rows.push_back(Json{{"vertex", io::vertex_to_json(t.id(v))}, {"t", vals}});
  }
  return {kExitPass, Json{{"vertices", rows}}};
}

Outcome stieltjes(const Inputs& in, const RunConfig& c) {
  MomentSequence seq = c.t ? io::moments_from_json(io::parse(*c.t, "--t")) : io::moments_from_json(in.get_keyed("", "t"));
  StieltjesVerdict v = check_stieltjes(seq, c.tol);
  Json r = io::verdict_to_json(v);
  r["carleman"] = io::carleman_to_json(carleman_diagnostic(seq));
  r["witnesses"] = verdict_witnesses(v);
  return {v.consistent() ? kExitPass : kExitRefuted, r};
}

Outcome backward(const Inputs& in, const RunConfig& c) {
  if (!c.theta) throw InputError("backward-extend needs --theta");
  AtomicMeasure mu = io::measure_from_json(in.get(c.measure, "measure"));
  ExtendedReal inv = integral_inv_s(mu);
  Json r{{"theta", *c.theta}, {"integral_inv_s", num(inv.value())}};
  try {
    AtomicMeasure nu = backward_extend(mu, *c.theta);
    r["nu"] = io::measure_to_json(nu);
    r["roundtrip"] = compare_measures(forward_map(nu), mu).mass;
    r["witnesses"] = Json::array();
    return {kExitPass, r};
  } catch (const DomainError& e) {
    r["nu"] = nullptr;
    r["witnesses"] = Json::array({io::finding_to_json(
        Finding{kNoVertex, "backward-extension", inv.value() - *c.theta, std::nullopt, e.what()}, nullptr)});
    return {kExitRefuted, r};
  }
}

Outcome consistency(const Inputs& in, const RunConfig& c) {
  WeightedShift s = load_shift(in, c);
  MeasureSystem sys = require_system(in, c, s.tree());
  const DirectedTree& t = s.tree();
  Json rows = Json::array();
  std::vector<Finding> all;
  for (Vertex v = 0; v < t.size(); ++v) {
    if (t.is_truncated(v)) continue;
    ConsistencyReport r = check_consistency_at(sys, s, v, c.tol);
    rows.push_back(io::consistency_to_json(r, t));
    all.insert(all.end(), r.findings.begin(), r.findings.end());
  }
  return {all.empty() ? kExitPass : kExitRefuted, Json{{"vertices", rows}, {"witnesses", findings_json(all, &t)}}};
}

Outcome truncation(const Inputs& in, const RunConfig& c) {
  WeightedShift s = load_shift(in, c);
  MeasureSystem sys = require_system(in, c, s.tree());
  Json entries = Json::array();
  Json witnesses = Json::array();
  bool ok = true;
  for (int i : c.i_list) {
    TruncationEntry e = truncate(sys, s, i);
    TruncationReport r = verify_truncated_consistency(e, c.tol);
    ok = ok && r.passes;
    entries.push_back(io::truncation_to_json(e, r));
    for (const Finding& f : r.findings) {
      Json w = io::finding_to_json(f, &s.tree());
      w["i"] = i;
      witnesses.push_back(w);
    }
  }
  return {ok ? kExitPass : kExitRefuted, Json{{"entries", entries}, {"witnesses", witnesses}}};
}

Outcome converge(const Inputs& in, const RunConfig& c) {
  if (!c.vertex) throw InputError("converge needs --vertex");
  WeightedShift s = load_shift(in, c);
  MeasureSystem sys = require_system(in, c, s.tree());
  Vertex u = s.tree().index(VertexId::parse(*c.vertex));
  ConvergenceReport r = convergence_report(sys, s, u, c.n, c.i_list);
  return {kExitPass, io::convergence_to_json(r, s.tree())};
}

Outcome from_model(const ModelCertificate& m) {
  Json r = io::model_certificate_to_json(m);
  return {exit_code(m.status), r};
}

Outcome certify_general(const Inputs& in, const RunConfig& c) {
  WeightedShift s = load_shift(in, c);
  const DirectedTree& t = s.tree();
  auto system = load_system(in, c, t);
  if (!system) {
    if (t.has_truncation()) throw InputError("a truncated tree needs a system document for its frontier");
    std::map<Vertex, MomentSequence> seqs;
    for (Vertex v = 0; v < t.size(); ++v) seqs[v] = vertex_moment_sequence(s, v, c.horizon);
    system = build_system_from_sequences(s, seqs, c.tol);
  }
  Certificate cert = certify_subnormal(s, *system, c.horizon, c.tol);
  Json r = io::certificate_to_json(cert, t);
  r["system"] = io::system_to_json(t, *system);
  return {exit_code(cert.status), r};
}

std::vector<Complex> load_weight_list(const Inputs& in, const RunConfig& c, int* first) {
  return io::weight_list_from_json(in.get_keyed(c.weights, "weights"), first);
}

Outcome certify(const Inputs& in, const RunConfig& c) {
  if (c.family == "general") return certify_general(in, c);
  if (c.family == "unilateral") {
    int first = 1;
    std::vector<Complex> w = load_weight_list(in, c, &first);
    if (first != 1) throw InputError("weights: unilateral weights start at vertex 1");
    return from_model(certify_unilateral(w, c.horizon, c.tol));
  }
  if (c.family == "bilateral") {
    constexpr int kUnkeyed = std::numeric_limits<int>::min();
    int first = kUnkeyed;
    std::vector<Complex> w = load_weight_list(in, c, &first);
    int back = first == kUnkeyed ? c.back.value_or(8) : 1 - first;
    if (first != kUnkeyed && c.back && *c.back != back)
      throw InputError("weights: --back disagrees with the first keyed vertex");
    if (back < 0 || static_cast<int>(w.size()) <= back)
      throw InputError("weights: the window needs vertices on both sides of 0");
    return from_model(certify_bilateral(w, back, c.horizon, c.tol));
  }
  if (c.family == "t-eta-kappa") return from_model(certify_t_eta_kappa(io::branch_from_json(in.get("", "branch")), c.horizon, c.tol));
  throw InputError("unknown family " + c.family);
}

void render_text(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_text(v, path.empty() ? k : path + "." + k, rows);
    return;
  }
  if (j.is_array()) {
    bool scalars = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (scalars) {
      std::string line;
      for (const Json& e : j) line += (line.empty() ? "" : " ") + (e.is_string() ? e.get<std::string>() : e.dump());
      rows.emplace_back(path, line.empty() ? "-" : line);
      return;
    }
    for (std::size_t k = 0; k < j.size(); ++k) render_text(j[k], path + "[" + std::to_string(k) + "]", rows);
    return;
  }
  rows.emplace_back(path, j.is_string() ? j.get<std::string>() : j.dump());
}

std::string render(const Json& report, Format f) {
  if (f == Format::json) return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  render_text(report, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << k << std::string(width - k.size() + 2, ' ') << v << "\n";
  return out.str();
}

RunResult error_result(const std::string& command, const Json& config, const std::string& message, Format f) {
  Json report{{"command", command}, {"config", config}, {"exit_code", kExitInput},
              {"error", Json{{"kind", "input-error"}, {"message", message}}}};
  return {kExitInput, render(report, f)};
}

}  // namespace

RunResult run(const RunConfig& c) {
  Json config = config_to_json(c);
  try {
    if (c.horizon < 1) throw InputError("--horizon must be at least 1");
    if (!(c.tol > 0.0) || !std::isfinite(c.tol)) throw InputError("tolerance must be positive");
    if (c.i_list.empty() || !std::is_sorted(c.i_list.begin(), c.i_list.end()) || c.i_list.front() < 1)
      throw InputError("--i-list must be an increasing list of positive integers");
    Inputs in(c);
    Outcome o;
    const std::string& s = c.subcommand;
    if (s == "validate-tree") o = validate_tree(in, c);
    else if (s == "moments") o = moments(in, c);
    else if (s == "check-stieltjes") o = stieltjes(in, c);
    else if (s == "backward-extend") o = backward(in, c);
    else if (s == "check-consistency") o = consistency(in, c);
    else if (s == "truncate") o = truncation(in, c);
    else if (s == "converge") o = converge(in, c);
    else if (s == "certify") o = certify(in, c);
    else throw InputError("unknown subcommand " + s);
    Json report{{"command", s}, {"config", config}, {"exit_code", o.exit_code}, {"result", o.result}};
    return {o.exit_code, render(report, c.format)};
  } catch (const InputError& e) {
    return error_result(c.subcommand, config, e.what(), c.format);
  } catch (const DomainError& e) {
    return error_result(c.subcommand, config, std::string("precondition failed: ") + e.what(), c.format);
  } catch (const Json::exception& e) {
    return error_result(c.subcommand, config, e.what(), c.format);
  }
}

RunResult run_command_line(int argc, const char* const* argv, const char* env_tol) {
  RunConfig c;
  CLI::App app{"Subnormality checks for weighted shifts on directed trees", "treeshift"};
  app.require_subcommand(1);

  std::optional<double> tol_flag;
  std::string format = "json";
  std::string i_list;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", c.input, "Combined JSON document");
    sub->add_option("--horizon", c.horizon, "Depth horizon N_T")->default_val(16);
    sub->add_option("--tol", tol_flag, "Tolerance (overrides TREESHIFT_TOL)");
    sub->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--i-list", i_list, "Comma-separated truncation indices");
  };
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"validate-tree", "Check the tree invariants"},
                      {"moments", "Per-vertex ||S^n e_u||^2"},
                      {"check-stieltjes", "Hankel positivity test of a moment prefix"},
                      {"backward-extend", "Prepend theta to the moments of a measure"},
                      {"check-consistency", "Consistency condition at every vertex"},
                      {"truncate", "Bounded approximants for each i"},
                      {"converge", "Residual of the approximants at one vertex"},
                      {"certify", "Subnormality certificate"}};
  std::optional<std::string> t_inline;
  std::optional<std::string> vertex;
  std::optional<double> theta;
  std::optional<int> back;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    std::string name = s.name;
    if (name != "check-stieltjes" && name != "backward-extend") sub->add_option("--tree", c.tree, "Tree document");
    if (name == "moments" || name == "check-consistency" || name == "truncate" || name == "converge" ||
        name == "certify")
      sub->add_option("--weights", c.weights, "Weights document");
    if (name == "moments" || name == "check-consistency" || name == "truncate" || name == "converge" ||
        name == "certify")
      sub->add_option("--system", c.system, "Measure system document");
    if (name == "check-stieltjes") sub->add_option("--t", t_inline, "Inline moment list, e.g. \"[1,1,0,0]\"");
    if (name == "backward-extend") {
      sub->add_option("--measure", c.measure, "Measure document");
      sub->add_option("--theta", theta, "Value prepended to the moments")->required();
    }
    if (name == "converge") {
      sub->add_option("--vertex", vertex, "Vertex id")->required();
      sub->add_option("--n", c.n, "Power n");
    }
    if (name == "certify") {
      sub->add_option("--family", c.family, "general, unilateral, bilateral or t-eta-kappa")
          ->check(CLI::IsMember({"general", "unilateral", "bilateral", "t-eta-kappa"}));
      sub->add_option("--back", back, "Bilateral window: vertices below 0");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return {kExitPass, app.help()};
  } catch (const CLI::CallForAllHelp& e) {
    return {kExitPass, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    return error_result("", Json::object(), e.what(), Format::json);
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  c.format = format == "text" ? Format::text : Format::json;
  c.t = t_inline;
  c.vertex = vertex;
  c.theta = theta;
  c.back = back;

  if (!i_list.empty()) {
    c.i_list.clear();
    std::stringstream ss(i_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        int v = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        c.i_list.push_back(v);
      } catch (const std::exception&) {
        return error_result(c.subcommand, config_to_json(c), "--i-list: not an integer: " + item, c.format);
      }
    }
  }
  if (tol_flag) {
    c.tol = *tol_flag;
    c.tol_source = "flag";
  } else if (env_tol && *env_tol) {
    char* end = nullptr;
    double v = std::strtod(env_tol, &end);
    if (end == env_tol || *end != '\0')
      return error_result(c.subcommand, config_to_json(c), std::string("TREESHIFT_TOL: not a number: ") + env_tol,
                          c.format);
    c.tol = v;
    c.tol_source = "env";
  }
  return run(c);
}

}  // namespace treeshift::cli

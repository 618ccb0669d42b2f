#include "treeshift/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "treeshift/error.hpp"

namespace treeshift {

namespace {

void require_shape(const WeightedShift& shift, const MeasureSystem& system) {
  if (system.mu.size() != shift.tree().size() || system.eps.size() != shift.tree().size())
    throw InputError("measure system does not cover the vertex set");
}

std::string name(const WeightedShift& shift, Vertex v) { return shift.tree().id(v).to_string(); }

// Visits the terms of the n-step expansion below u: vertices at depth n, and
// truncated vertices reached earlier. Branches with a zero path coefficient
// are pruned since every term below them vanishes.
template <typename F>
void walk_terms(const WeightedShift& shift, Vertex u, int n, F&& on_term) {
  const DirectedTree& tree = shift.tree();
  struct Item {
    Vertex v;
    int depth;
    double coeff;
  };
  std::vector<Item> stack{{u, 0, 1.0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.depth == n || tree.is_truncated(it.v)) {
      on_term(it.v, it.depth, it.coeff);
      continue;
    }
    for (Vertex c : tree.children(it.v)) {
      double coeff = it.coeff * shift.weight_sq(c);
      if (coeff != 0.0) stack.push_back({c, it.depth + 1, coeff});
    }
  }
}

ConsistencyReport compare_with_rhs(const MeasureSystem& system, const WeightedShift& shift, Vertex u,
                                   const std::vector<std::pair<double, std::pair<Vertex, int>>>& terms, double tol,
                                   const char* tag) {
  ConsistencyReport report;
  report.vertex = u;
  report.eps_stored = system.eps[u];
  std::vector<Atom> rhs;
  for (const auto& [coeff, where] : terms) {
    const auto [v, power] = where;
    const AtomicMeasure& mv = system.mu[v];
    if (power > 0 && mv.mass_at_zero() > 0.0) {
      report.consistent = false;
      report.child_sum = ExtendedReal::infinity();
      report.findings.push_back({v, "zero-atom-under-nonzero-weight", mv.mass_at_zero(), 0.0,
                                 "mu at " + name(shift, v) + " has an atom at 0 but enters " + name(shift, u) +
                                     " with a nonzero weight"});
      return report;
    }
    if (power == 1) report.child_sum = report.child_sum + ExtendedReal{coeff * mv.inverse_moment(1).value()};
    for (const Atom& a : mv.atoms()) rhs.push_back({a.position, coeff * a.mass / std::pow(a.position, power)});
  }
  if (system.eps[u] > 0.0) rhs.push_back({0.0, system.eps[u]});
  const AtomicMeasure& mu = system.mu[u];
  MeasureDiscrepancy d = compare_measures(mu, AtomicMeasure(std::move(rhs)));
  report.discrepancy = d.mass;
  report.position = d.position;
  if (d.mass > tol * std::max(1.0, mu.total_mass())) {
    report.consistent = false;
    report.findings.push_back({u, tag, d.mass, d.position, "measure at " + name(shift, u) +
                                                               " differs from the reweighted children"});
  }
  if (system.eps[u] < -tol) {
    report.consistent = false;
    report.findings.push_back({u, "negative-eps", -system.eps[u], std::nullopt, "eps must be nonnegative"});
  }
  return report;
}

}  // namespace

ConsistencyReport check_consistency_at(const MeasureSystem& system, const WeightedShift& shift, Vertex u,
                                       double tol) {
  require_shape(shift, system);
  const DirectedTree& tree = shift.tree();
  if (tree.is_truncated(u))
    throw DomainError("vertex " + name(shift, u) + " is truncated; its children lie beyond the horizon");
  std::vector<std::pair<double, std::pair<Vertex, int>>> terms;
  for (Vertex v : tree.children(u))
    if (shift.weight_sq(v) != 0.0) terms.push_back({shift.weight_sq(v), {v, 1}});
  ConsistencyReport report = compare_with_rhs(system, shift, u, terms, tol, "consistency-condition");
  if (report.child_sum.is_finite()) {
    double expected = 1.0 - report.child_sum.value();
    double gap = std::abs(expected - system.eps[u]);
    if (gap > tol) {
      report.consistent = false;
      report.findings.push_back({u, "eps-balance", gap, std::nullopt,
                                 "stored eps differs from 1 minus the weighted child integrals of 1/s"});
    }
  }
  return report;
}

ConsistencyReport propagate_check(const MeasureSystem& system, const WeightedShift& shift, Vertex u, int n,
                                  double tol) {
  require_shape(shift, system);
  if (n < 1) throw InputError("propagation depth must be at least 1");
  if (shift.tree().is_truncated(u)) throw DomainError("vertex " + name(shift, u) + " is truncated");
  std::vector<std::pair<double, std::pair<Vertex, int>>> terms;
  walk_terms(shift, u, n, [&](Vertex v, int depth, double coeff) {
    if (depth > 0) terms.push_back({coeff, {v, depth}});
  });
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return compare_with_rhs(system, shift, u, terms, tol, "n-step-consistency");
}

double completed_power_norm_sq(const WeightedShift& shift, const MeasureSystem& system, Vertex u, int n) {
  require_shape(shift, system);
  if (n < 0) throw InputError("power must be nonnegative");
  std::vector<std::pair<Vertex, double>> terms;
  walk_terms(shift, u, n, [&](Vertex v, int depth, double coeff) {
    terms.push_back({v, depth == n ? coeff : coeff * system.mu[v].moment(n - depth)});
  });
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (const auto& t : terms) sum += t.second;
  return sum;
}

MomentSequence vertex_moment_sequence(const WeightedShift& shift, Vertex u, int n_max, const MeasureSystem* system) {
  if (n_max < 0) throw InputError("n_max must be nonnegative");
  MomentSequence seq;
  seq.origin = MomentOrigin::weights;
  if (system) {
    for (int n = 0; n <= n_max; ++n) seq.values.push_back(completed_power_norm_sq(shift, *system, u, n));
    return seq;
  }
  auto depth = complete_depth(shift.tree(), u);
  if (depth && n_max > *depth)
    throw DomainError("moments at " + name(shift, u) + " beyond order " + std::to_string(*depth) +
                      " need measures at the truncated vertices");
  for (int n = 0; n <= n_max; ++n) seq.values.push_back(power_norm_sq(shift, u, n));
  return seq;
}

MomentMatchReport moments_match(const MeasureSystem& system, const WeightedShift& shift, Vertex u, int n_max,
                                double tol) {
  require_shape(shift, system);
  MomentMatchReport report;
  report.vertex = u;
  for (int n = 0; n <= n_max; ++n) {
    MomentMatchRow row;
    row.n = n;
    row.integral = system.mu[u].moment(n);
    row.power_norm = completed_power_norm_sq(shift, system, u, n);
    double scale = std::max(std::abs(row.integral), std::abs(row.power_norm));
    row.relative_error = scale == 0.0 ? 0.0 : std::abs(row.integral - row.power_norm) / scale;
    report.worst_relative_error = std::max(report.worst_relative_error, row.relative_error);
    if (row.relative_error > tol) report.matches = false;
    report.rows.push_back(row);
  }
  return report;
}

ParentMeasure parent_from_children(const WeightedShift& shift, Vertex u,
                                   const std::vector<AtomicMeasure>& child_measures, double tol) {
  auto children = shift.tree().children(u);
  if (children.size() != child_measures.size())
    throw InputError("one measure per child of " + name(shift, u) + " is required");
  ExtendedReal sum;
  AtomicMeasure mu;
  for (std::size_t k = 0; k < children.size(); ++k) {
    double w = shift.weight_sq(children[k]);
    if (w == 0.0) continue;
    sum = sum + w * child_measures[k].inverse_moment(1);
    if (sum.is_infinite()) break;
    mu = mu + child_measures[k].power_weighted(-1).scaled(w);
  }
  if (sum.is_infinite() || sum.value() > 1.0 + tol)
    throw DomainError("weighted child integrals of 1/s at " + name(shift, u) + " sum to " +
                      (sum.is_infinite() ? std::string("infinity") : std::to_string(sum.value())) +
                      ", which exceeds 1");
  double eps = 1.0 - sum.value();
  if (eps <= 64.0 * std::numeric_limits<double>::epsilon()) eps = 0.0;
  if (eps > 0.0) mu = mu + AtomicMeasure::dirac(0.0, eps);
  return {mu, eps};
}

AtomicMeasure child_from_parent_single(const WeightedShift& shift, Vertex u0, const AtomicMeasure& mu_parent) {
  auto children = shift.tree().children(u0);
  if (children.size() != 1) throw DomainError("vertex " + name(shift, u0) + " does not have exactly one child");
  double w = shift.weight_sq(children[0]);
  if (w == 0.0) throw DomainError("the weight into the only child of " + name(shift, u0) + " is zero");
  return forward_map(mu_parent).scaled(1.0 / w);
}

namespace {

// Vertices ordered so that every child precedes its parent.
std::vector<Vertex> bottom_up_order(const DirectedTree& tree) {
  std::vector<Vertex> order;
  std::deque<Vertex> queue;
  for (Vertex v = 0; v < tree.size(); ++v)
    if (tree.parent(v) == kNoVertex) queue.push_back(v);
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (Vertex c : tree.children(v)) queue.push_back(c);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

bool is_leaf(const DirectedTree& tree, Vertex v) { return !tree.is_truncated(v) && tree.children(v).empty(); }

}  // namespace

MeasureSystem system_from_frontier(const WeightedShift& shift, const std::map<Vertex, AtomicMeasure>& frontier,
                                   double tol) {
  const DirectedTree& tree = shift.tree();
  MeasureSystem system;
  system.mu.resize(tree.size());
  system.eps.assign(tree.size(), 0.0);
  system.provenance = "parent-from-children";
  for (Vertex v : bottom_up_order(tree)) {
    if (tree.is_truncated(v)) {
      auto it = frontier.find(v);
      if (it == frontier.end()) throw InputError("no measure given for truncated vertex " + name(shift, v));
      system.mu[v] = it->second;
      system.eps[v] = it->second.mass_at_zero();
    } else if (is_leaf(tree, v)) {
      system.mu[v] = AtomicMeasure::dirac(0.0);
      system.eps[v] = 1.0;
    } else {
      std::vector<AtomicMeasure> kids;
      for (Vertex c : tree.children(v)) kids.push_back(system.mu[c]);
      ParentMeasure p = parent_from_children(shift, v, kids, tol);
      system.mu[v] = std::move(p.mu);
      system.eps[v] = p.eps;
    }
  }
  return system;
}

MeasureSystem build_system_from_sequences(const WeightedShift& shift,
                                          const std::map<Vertex, MomentSequence>& sequences, double tol) {
  const DirectedTree& tree = shift.tree();
  MeasureSystem system;
  system.mu.resize(tree.size());
  system.eps.assign(tree.size(), 0.0);
  system.determinacy.assign(tree.size(), std::nullopt);
  system.conditional = true;
  system.provenance = "quadrature";
  for (Vertex v = 0; v < tree.size(); ++v) {
    if (is_leaf(tree, v)) {
      system.mu[v] = AtomicMeasure::dirac(0.0);
      continue;
    }
    auto it = sequences.find(v);
    if (it == sequences.end()) throw InputError("no moment sequence given for vertex " + name(shift, v));
    StieltjesVerdict verdict = check_stieltjes(it->second, tol);
    if (!verdict.consistent())
      throw DomainError("the moment sequence at " + name(shift, v) + " is not a Stieltjes moment sequence");
    system.mu[v] = quadrature_from_moments(it->second, tol).measure;
    system.determinacy[v] = carleman_diagnostic(it->second).trend;
  }
  for (Vertex v = 0; v < tree.size(); ++v) {
    if (is_leaf(tree, v)) {
      system.eps[v] = 1.0;
    } else if (tree.is_truncated(v)) {
      system.eps[v] = system.mu[v].mass_at_zero();
    } else {
      ExtendedReal sum;
      for (Vertex c : tree.children(v)) sum = sum + shift.weight_sq(c) * system.mu[c].inverse_moment(1);
      // An infinite sum means a child carries an atom at 0 under a nonzero
      // weight; the certificate reports that vertex, eps here is moot.
      system.eps[v] = sum.is_infinite() ? 0.0 : std::max(0.0, 1.0 - sum.value());
      if (system.eps[v] <= 64.0 * std::numeric_limits<double>::epsilon()) system.eps[v] = 0.0;
    }
  }
  return system;
}

std::string to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::certified: return "certified-up-to-horizon";
    case CertificateStatus::refuted: return "refuted";
    case CertificateStatus::conditional: return "conditional";
  }
  return "refuted";
}

int exit_code(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::certified: return 0;
    case CertificateStatus::refuted: return 1;
    case CertificateStatus::conditional: return 2;
  }
  return 1;
}

Certificate certify_subnormal(const WeightedShift& shift, const MeasureSystem& system, int horizon, double tol) {
  require_shape(shift, system);
  if (horizon < 0) throw InputError("horizon must be nonnegative");
  const DirectedTree& tree = shift.tree();
  Certificate cert;
  cert.horizon = horizon;
  cert.tolerance = tol;

  StructuralReport structure = structural_checks(shift);
  if (structure.hyponormality_obstruction) {
    Vertex leaf = structure.leaves.empty() ? kNoVertex : structure.leaves.front();
    cert.witnesses.push_back({leaf, "hyponormality", 0.0, std::nullopt,
                              "nonzero weights on a tree with a leaf: not hyponormal, hence not subnormal"});
  }
  const bool all_nonzero = shift.nonzero_weights();

  for (Vertex v = 0; v < tree.size(); ++v) {
    VertexCheck check;
    check.vertex = v;
    check.truncated = tree.is_truncated(v);
    check.eps = system.eps[v];
    std::vector<Finding> found;

    double mass = system.mu[v].total_mass();
    if (std::abs(mass - 1.0) > tol)
      found.push_back({v, "not-probability", std::abs(mass - 1.0), std::nullopt,
                       "measure at " + name(shift, v) + " has total mass " + std::to_string(mass)});
    if (!check.truncated) {
      ConsistencyReport c = check_consistency_at(system, shift, v, tol);
      check.consistency_discrepancy = c.discrepancy;
      found.insert(found.end(), c.findings.begin(), c.findings.end());
    }
    MomentMatchReport m = moments_match(system, shift, v, horizon, tol);
    check.moment_error = m.worst_relative_error;
    if (!m.matches) {
      auto worst = std::max_element(m.rows.begin(), m.rows.end(), [](const auto& a, const auto& b) {
        return a.relative_error < b.relative_error;
      });
      found.push_back({v, "moment-identity", worst->relative_error, std::nullopt,
                       "int s^" + std::to_string(worst->n) + " dmu differs from ||S^n e_u||^2"});
    }
    bool weighted_in = (tree.parent(v) != kNoVertex && shift.weight_sq(v) != 0.0) ||
                       (tree.parent(v) == kNoVertex && tree.has_parent_in_full_tree(v) && all_nonzero);
    if (weighted_in && std::abs(system.eps[v]) > tol)
      found.push_back({v, "eps-under-nonzero-weight", std::abs(system.eps[v]), std::nullopt,
                       "a nonzero weight enters " + name(shift, v) + " so eps must vanish"});

    check.passes = found.empty();
    cert.witnesses.insert(cert.witnesses.end(), found.begin(), found.end());
    cert.vertices.push_back(check);
  }

  cert.notes.push_back("verdict holds up to horizon " + std::to_string(horizon));
  if (tree.has_truncation()) cert.notes.push_back("measures at truncated vertices are taken as data");
  if (system.conditional)
    cert.notes.push_back("measures come from moment data (" + system.provenance +
                         "); representing measures need not be unique");
  if (!cert.witnesses.empty())
    cert.status = CertificateStatus::refuted;
  else if (system.conditional)
    cert.status = CertificateStatus::conditional;
  else
    cert.status = CertificateStatus::certified;
  return cert;
}

std::pair<WeightedShift, MeasureSystem> restrict_to_subtree(const WeightedShift& shift, const MeasureSystem& system,
                                                            Vertex u) {
  require_shape(shift, system);
  const DirectedTree& tree = shift.tree();
  DirectedTree sub = subtree(tree, u);
  std::vector<Complex> weights(sub.size());
  MeasureSystem out;
  out.mu.resize(sub.size());
  out.eps.resize(sub.size());
  out.conditional = system.conditional;
  out.provenance = system.provenance;
  if (!system.determinacy.empty()) out.determinacy.resize(sub.size());
  for (Vertex s = 0; s < sub.size(); ++s) {
    Vertex v = tree.index(sub.id(s));
    weights[s] = v == u ? Complex{} : shift.weight(v);
    out.mu[s] = system.mu[v];
    out.eps[s] = system.eps[v];
    if (!system.determinacy.empty()) out.determinacy[s] = system.determinacy[v];
  }
  return {WeightedShift(std::move(sub), std::move(weights)), std::move(out)};
}

Certificate certify_cover(const WeightedShift& shift, const MeasureSystem& system, const std::vector<Vertex>& cover,
                          int horizon, double tol) {
  Certificate out;
  out.horizon = horizon;
  out.tolerance = tol;
  bool conditional = false;
  for (Vertex w : cover) {
    auto [sub_shift, sub_system] = restrict_to_subtree(shift, system, w);
    Certificate c = certify_subnormal(sub_shift, sub_system, horizon, tol);
    auto to_full = [&](Vertex s) { return s == kNoVertex ? s : shift.tree().index(sub_shift.tree().id(s)); };
    for (VertexCheck vc : c.vertices) {
      vc.vertex = to_full(vc.vertex);
      out.vertices.push_back(vc);
    }
    for (Finding f : c.witnesses) {
      f.vertex = to_full(f.vertex);
      out.witnesses.push_back(f);
    }
    conditional = conditional || c.status == CertificateStatus::conditional;
    out.notes.push_back("subtree at " + name(shift, w) + ": " + to_string(c.status));
  }
  if (!out.witnesses.empty())
    out.status = CertificateStatus::refuted;
  else if (conditional)
    out.status = CertificateStatus::conditional;
  return out;
}

std::vector<StieltjesVerdict> stieltjes_at_vertices(const WeightedShift& shift, int n_max,
                                                    const MeasureSystem* system, double tol) {
  std::vector<StieltjesVerdict> out;
  for (Vertex v = 0; v < shift.tree().size(); ++v) {
    int n = n_max;
    if (!system)
      if (auto depth = complete_depth(shift.tree(), v)) n = std::min(n, *depth);
    out.push_back(check_stieltjes(vertex_moment_sequence(shift, v, n, system), tol));
  }
  return out;
}

}  // namespace treeshift

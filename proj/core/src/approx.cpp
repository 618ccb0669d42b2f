#include "treeshift/approx.hpp"

#include <algorithm>
#include <cmath>

#include "treeshift/error.hpp"

namespace treeshift {

namespace {

double retained_fraction(const AtomicMeasure& mu, double i) {
  double total = mu.total_mass();
  if (total == 0.0) return 0.0;
  if (mu.support_within(i)) return 1.0;
  return mu.mass_upto(i) / total;
}

}  // namespace

TruncationEntry truncate(const MeasureSystem& system, const WeightedShift& shift, int i) {
  if (i < 1) throw InputError("truncation index must be at least 1");
  const DirectedTree& tree = shift.tree();
  if (system.mu.size() != tree.size() || system.eps.size() != tree.size())
    throw InputError("measure system does not cover the vertex set");
  const double cut = static_cast<double>(i);
  TruncationEntry entry;
  entry.i = i;
  entry.kappa.resize(tree.size());
  entry.retained.resize(tree.size());
  MeasureSystem out;
  out.mu.resize(tree.size());
  out.eps.resize(tree.size());
  out.conditional = system.conditional;
  out.provenance = system.provenance + "+truncated";
  out.determinacy = system.determinacy;

  for (Vertex v = 0; v < tree.size(); ++v) {
    const AtomicMeasure& mu = system.mu[v];
    double lo = mu.empty() ? 0.0 : mu.atoms().front().position;
    entry.kappa[v] = std::max(1, static_cast<int>(std::ceil(lo)));
    double r = retained_fraction(mu, cut);
    entry.retained[v] = r;
    if (r == 1.0) {
      out.mu[v] = mu;
      out.eps[v] = system.eps[v];
    } else if (r == 0.0) {
      out.mu[v] = AtomicMeasure::dirac(0.0);
      out.eps[v] = 1.0;
    } else {
      double kept = mu.mass_upto(cut);
      out.mu[v] = mu.restricted_upto(cut).scaled(1.0 / kept);
      out.eps[v] = system.eps[v] / kept;
    }
  }

  std::vector<Complex> weights(tree.size());
  for (Vertex v = 0; v < tree.size(); ++v) {
    Vertex p = tree.parent(v);
    if (p == kNoVertex) continue;
    double rp = entry.retained[p];
    weights[v] = rp == 0.0 ? Complex{} : shift.weight(v) * std::sqrt(entry.retained[v] / rp);
  }
  entry.shift = WeightedShift(tree, std::move(weights));
  entry.system = std::move(out);
  return entry;
}

TruncationReport verify_truncated_consistency(const TruncationEntry& entry, double tol) {
  TruncationReport report;
  report.i = entry.i;
  const DirectedTree& tree = entry.shift.tree();
  const double cut = static_cast<double>(entry.i);
  for (Vertex v = 0; v < tree.size(); ++v) {
    const AtomicMeasure& mu = entry.system.mu[v];
    if (!mu.support_within(cut)) {
      report.supports_within = false;
      report.findings.push_back({v, "support-outside-window", mu.max_position() - cut, mu.max_position(),
                                 "truncated measure reaches beyond [0, i]"});
    }
    if (std::abs(mu.total_mass() - 1.0) > tol)
      report.findings.push_back({v, "not-probability", std::abs(mu.total_mass() - 1.0), std::nullopt, ""});
    if (tree.is_truncated(v)) continue;
    ConsistencyReport c = check_consistency_at(entry.system, entry.shift, v, tol);
    report.worst_discrepancy = std::max(report.worst_discrepancy, c.discrepancy);
    report.findings.insert(report.findings.end(), c.findings.begin(), c.findings.end());
  }
  report.alpha = bound_alpha(entry.shift);
  if (report.alpha.value > cut * (1.0 + tol))
    report.findings.push_back({report.alpha.attained_at, "norm-bound", report.alpha.value - cut, std::nullopt,
                               "sum of squared child weights exceeds i"});
  report.passes = report.findings.empty();
  return report;
}

Complex truncated_lambda_path(const TruncationEntry& entry, const WeightedShift& shift, Vertex u, Vertex v) {
  if (entry.i < entry.kappa.at(u))
    throw DomainError("truncation index " + std::to_string(entry.i) + " is below the support threshold " +
                      std::to_string(entry.kappa[u]) + " at " + shift.tree().id(u).to_string());
  return lambda_path(shift, u, v) * std::sqrt(entry.retained.at(v) / entry.retained.at(u));
}

ConvergenceReport convergence_report(const MeasureSystem& system, const WeightedShift& shift, Vertex u, int n,
                                     const std::vector<int>& i_list) {
  if (n < 0) throw InputError("power must be nonnegative");
  if (auto depth = complete_depth(shift.tree(), u); depth && n > *depth)
    throw DomainError("S^n e_u leaves the truncated tree for n > " + std::to_string(*depth));
  for (std::size_t k = 1; k < i_list.size(); ++k)
    if (i_list[k] <= i_list[k - 1]) throw InputError("i_list must be strictly increasing");

  ConvergenceReport report;
  report.vertex = u;
  report.n = n;
  for (const AtomicMeasure& mu : system.mu) report.max_support = std::max(report.max_support, mu.max_position());
  const CoefficientMap full = power_coefficients(shift, u, n);
  for (const auto& term : full.terms) report.norm_sq += std::norm(term.second);

  for (int i : i_list) {
    TruncationEntry entry = truncate(system, shift, i);
    ConvergenceRow row;
    row.i = i;
    const CoefficientMap part = power_coefficients(entry.shift, u, n);
    for (std::size_t k = 0; k < full.terms.size(); ++k) {
      Complex a = full.terms[k].second;
      Complex b = part.terms[k].second;
      row.truncated_norm_sq += std::norm(b);
      row.cross += a * std::conj(b);
      row.residual_direct += std::norm(a - b);
    }
    row.residual = report.norm_sq + row.truncated_norm_sq - 2.0 * row.cross.real();
    double kept = system.mu[u].mass_upto(i);
    row.restricted_moment = kept == 0.0 ? 0.0 : system.mu[u].restricted_upto(i).moment(n) / kept;
    for (Vertex v = 0; v < shift.tree().size(); ++v)
      row.max_weight_gap = std::max(row.max_weight_gap, std::abs(entry.shift.weight(v) - shift.weight(v)));
    if (!report.rows.empty() && row.residual > report.rows.back().residual) report.nonincreasing = false;
    if (i >= report.max_support && row.residual != 0.0) report.zero_beyond_support = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace treeshift

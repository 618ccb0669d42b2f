#include "treeshift/models.hpp"

#include <algorithm>
#include <cmath>

#include "treeshift/error.hpp"

namespace treeshift {

std::optional<double> ModelCertificate::quantity(const std::string& key) const {
  for (const auto& [k, v] : quantities)
    if (k == key) return v;
  return std::nullopt;
}

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

Finding stieltjes_finding(Vertex v, const StieltjesVerdict& verdict, std::string detail) {
  Finding f;
  f.vertex = v;
  f.tag = "stieltjes";
  f.discrepancy = verdict.witness ? -verdict.witness->quadratic_form : 0.0;
  f.detail = std::move(detail) + (verdict.witness ? " (" + verdict.witness->block + " block)" : "");
  return f;
}

// Folds a cross-check into the model verdict. The cross-check certifies a proof
// construction that holds by theorem once the closed-form condition passed, so
// a failure there is numerical and only downgrades to conditional.
void absorb_cross_check(ModelCertificate& mc, Certificate cross, bool conditional_measures) {
  if (cross.refuted()) {
    mc.status = CertificateStatus::conditional;
    mc.notes.push_back("cross-check of the constructed measure system failed numerically:");
    for (const Finding& f : cross.witnesses)
      mc.notes.push_back("  " + f.tag + " at vertex index " + std::to_string(f.vertex) + ": " + f.detail);
  } else {
    mc.status = conditional_measures || cross.status == CertificateStatus::conditional
                    ? CertificateStatus::conditional
                    : CertificateStatus::certified;
  }
  mc.cross_check = std::move(cross);
}

// Depth up to which a quadrature measure reproduces the input moments: all of
// them when the Hankel block was singular, otherwise the 2r - 1 matched ones.
int matched_order(const Quadrature& q, int available) {
  if (!q.full_rank()) return available;
  return std::min(available, 2 * static_cast<int>(q.rank) - 1);
}

}  // namespace

ModelCertificate certify_unilateral(const std::vector<Complex>& weights, int horizon, double tol) {
  if (weights.empty()) throw InputError("unilateral shift needs at least one weight");
  const int n_max = static_cast<int>(weights.size());
  ModelCertificate mc;
  mc.family = "unilateral";
  MomentSequence t;
  t.origin = MomentOrigin::weights;
  t.values.push_back(1.0);
  for (const Complex& w : weights) t.values.push_back(t.values.back() * std::norm(w));

  bool zero = std::any_of(weights.begin(), weights.end(), [](const Complex& w) { return w == Complex{}; });
  if (zero) {
    // Outside the classical criterion; run the general certifier on the path
    // with per-vertex sequences.
    mc.notes.push_back("zero weight: classical criterion does not apply, general certifier used");
    if (n_max < 2) throw InputError("the general certifier needs at least two weights");
    DirectedTree tree = DirectedTree::unilateral(n_max - 1);
    std::vector<Complex> w(tree.size());
    for (int n = 1; n < n_max; ++n) w[static_cast<std::size_t>(n)] = weights[static_cast<std::size_t>(n - 1)];
    WeightedShift shift(std::move(tree), std::move(w));
    std::map<Vertex, MomentSequence> sequences;
    for (int u = 0; u < n_max; ++u) {
      MomentSequence s;
      s.origin = MomentOrigin::weights;
      s.values.push_back(1.0);
      for (int n = u + 1; n <= n_max; ++n)
        s.values.push_back(s.values.back() * std::norm(weights[static_cast<std::size_t>(n - 1)]));
      StieltjesVerdict v = check_stieltjes(s, tol);
      mc.verdicts.push_back(v);
      if (!v.consistent()) {
        mc.status = CertificateStatus::refuted;
        mc.witnesses.push_back(stieltjes_finding(static_cast<Vertex>(u), v,
                                                 "power norms at " + std::to_string(u) + " are not a moment sequence"));
        return mc;
      }
      sequences.emplace(static_cast<Vertex>(u), std::move(s));
    }
    MeasureSystem system = build_system_from_sequences(shift, sequences, tol);
    Certificate cert = certify_subnormal(shift, system, horizon, tol);
    mc.status = cert.status;
    mc.witnesses = cert.witnesses;
    mc.shift = std::move(shift);
    mc.system = std::move(system);
    mc.cross_check = std::move(cert);
    return mc;
  }

  StieltjesVerdict verdict = check_stieltjes(t, tol);
  mc.verdicts.push_back(verdict);
  mc.quantities.emplace_back("order", static_cast<double>(n_max));
  mc.quantities.emplace_back("hankel_min_eigenvalue", verdict.hankel.min_eigenvalue);
  mc.quantities.emplace_back("shifted_hankel_min_eigenvalue", verdict.shifted.min_eigenvalue);
  if (!verdict.consistent()) {
    mc.status = CertificateStatus::refuted;
    mc.witnesses.push_back(stieltjes_finding(0, verdict, "{1, |l1|^2, |l1 l2|^2, ...} is not a moment sequence"));
    return mc;
  }

  Quadrature q = quadrature_from_moments(t, tol);
  const int depth = std::max(1, matched_order(q, n_max));
  const AtomicMeasure& mu = q.measure;
  mc.quantities.emplace_back("atoms", static_cast<double>(q.rank));
  mc.quantities.emplace_back("system_depth", depth);

  DirectedTree tree = DirectedTree::unilateral(depth);
  std::vector<Complex> w(tree.size());
  for (int n = 1; n <= depth; ++n) w[static_cast<std::size_t>(n)] = weights[static_cast<std::size_t>(n - 1)];
  WeightedShift shift(std::move(tree), std::move(w));
  MeasureSystem system;
  system.provenance = "quadrature; any representing measure of the product sequence works";
  for (int n = 0; n <= depth; ++n) {
    AtomicMeasure mn = mu.power_weighted(n);
    system.mu.push_back(mn.scaled(1.0 / mn.total_mass()));
    system.eps.push_back(n == 0 ? system.mu.back().mass_at_zero() : 0.0);
  }
  mc.quantities.emplace_back("eps_0", system.eps[0]);
  absorb_cross_check(mc, certify_subnormal(shift, system, horizon, tol), false);
  mc.shift = std::move(shift);
  mc.system = std::move(system);
  return mc;
}

TwoSidedSequence two_sided_sequence(const std::vector<Complex>& weights, int back) {
  const int forward = static_cast<int>(weights.size()) - back;
  if (back < 0 || forward < 1) throw InputError("bilateral window needs back >= 0 and at least one forward weight");
  auto weight_into = [&](int vertex) { return weights.at(static_cast<std::size_t>(vertex + back - 1)); };
  TwoSidedSequence ts;
  ts.back = back;
  ts.values.assign(static_cast<std::size_t>(back + forward + 1), 1.0);
  for (int n = 1; n <= forward; ++n)
    ts.values[static_cast<std::size_t>(n + back)] = ts.values[static_cast<std::size_t>(n - 1 + back)] * std::norm(weight_into(n));
  for (int n = -1; n >= -back; --n)
    ts.values[static_cast<std::size_t>(n + back)] =
        ts.values[static_cast<std::size_t>(n + 1 + back)] / std::norm(weight_into(n + 1));
  return ts;
}

ModelCertificate certify_bilateral(const std::vector<Complex>& weights, int back, int horizon, double tol) {
  for (const Complex& w : weights)
    if (w == Complex{}) throw InputError("bilateral certifier needs nonzero weights");
  TwoSidedSequence ts = two_sided_sequence(weights, back);
  const int forward = ts.forward();
  ModelCertificate mc;
  mc.family = "bilateral";
  mc.quantities.emplace_back("window_back", back);
  mc.quantities.emplace_back("window_forward", forward);

  MomentSequence root_seq;
  for (int k = 0; k <= back; ++k) {
    MomentSequence s;
    s.origin = MomentOrigin::weights;
    for (int n = 0; n - k <= forward; ++n) s.values.push_back(ts.at(n - k));
    StieltjesVerdict v = check_stieltjes(s, tol);
    mc.verdicts.push_back(v);
    if (!v.consistent()) {
      mc.status = CertificateStatus::refuted;
      mc.quantities.emplace_back("first_failing_k", k);
      Finding f = stieltjes_finding(kNoVertex, v, "shifted sequence {t_(n-" + std::to_string(k) + ")} fails");
      f.tag = "two-sided-stieltjes";
      f.id = VertexId(-k);
      mc.witnesses.push_back(std::move(f));
      return mc;
    }
    if (k == back) root_seq = std::move(s);
  }

  // Representing measure at the window root, normalized to ||S^n e_{-K}||^2,
  // pushed forward along the path one vertex at a time.
  for (double& x : root_seq.values) x /= ts.at(-back);
  Quadrature q = quadrature_from_moments(root_seq, tol);
  const int reach = matched_order(q, back + forward) - back;
  if (reach < 1)
    throw DomainError("window too short to build a measure system; increase the forward length");
  const int depth = std::min(forward, reach);
  mc.quantities.emplace_back("atoms", static_cast<double>(q.rank));
  mc.quantities.emplace_back("system_depth", depth);

  DirectedTree tree = DirectedTree::bilateral_window(depth, back);
  std::vector<Complex> w(tree.size());
  for (Vertex v = 1; v < tree.size(); ++v) w[v] = weights[v - 1];
  WeightedShift shift(std::move(tree), std::move(w));
  MeasureSystem system;
  system.provenance = "quadrature at the window root, then forward maps";
  system.mu.push_back(q.measure.scaled(1.0 / q.measure.total_mass()));
  for (Vertex v = 0; v + 1 < shift.tree().size(); ++v)
    system.mu.push_back(child_from_parent_single(shift, v, system.mu.back()));
  system.eps.assign(shift.tree().size(), 0.0);
  absorb_cross_check(mc, certify_subnormal(shift, system, horizon, tol), false);
  mc.shift = std::move(shift);
  mc.system = std::move(system);
  return mc;
}

ExtendedReal branch_sum(const BranchData& data, int k) {
  if (data.branch_measures.size() != data.entry_weights.size())
    throw InputError("one branch measure per entry weight is required");
  ExtendedReal sum;
  for (std::size_t i = 0; i < data.entry_weights.size(); ++i)
    sum = sum + std::norm(data.entry_weights[i]) * data.branch_measures[i].inverse_moment(k);
  return sum;
}

double trunk_product(const BranchData& data, int l) {
  if (l < 0 || static_cast<std::size_t>(l) > data.trunk_weights.size())
    throw InputError("trunk product needs " + std::to_string(l) + " trunk weights");
  double p = 1.0;
  for (int j = 0; j < l; ++j) p *= std::norm(data.trunk_weights[static_cast<std::size_t>(j)]);
  return p;
}

namespace {

Finding condition_finding(int vertex, std::string tag, double discrepancy, std::string detail) {
  Finding f;
  f.tag = std::move(tag);
  f.discrepancy = discrepancy;
  f.detail = std::move(detail);
  f.id = VertexId(vertex);
  return f;
}

// |lambda_{-(kappa-n)} .. lambda_{-(kappa-1)}|^2 = ||S^n e_{-kappa}||^2.
double root_power_norm(const BranchData& data, int n) {
  const int kappa = *data.kappa;
  double p = 1.0;
  for (int j = kappa - n; j <= kappa - 1; ++j) p *= std::norm(data.trunk_weights.at(static_cast<std::size_t>(j)));
  return p;
}

void require_finite_kappa(const BranchData& data) {
  if (!data.kappa || *data.kappa < 1) throw InputError("this check needs a finite kappa >= 1");
  if (data.trunk_weights.size() != static_cast<std::size_t>(*data.kappa))
    throw InputError("a finite trunk of length kappa needs exactly kappa trunk weights");
}

// P_kappa sum_i |lambda_{i,1}|^2 s^{-power} mu_i, or empty if some mu_i under a
// nonzero entry weight has an atom at 0.
std::optional<AtomicMeasure> weighted_branch_measure(const BranchData& data, int power, double factor) {
  AtomicMeasure out;
  for (std::size_t i = 0; i < data.entry_weights.size(); ++i) {
    double c = std::norm(data.entry_weights[i]);
    if (c == 0.0) continue;
    if (data.branch_measures[i].mass_at_zero() > 0.0) return std::nullopt;
    out = out + data.branch_measures[i].power_weighted(-power).scaled(c * factor);
  }
  return out;
}

}  // namespace

ConditionCheck check_integral_condition(const BranchData& data, double tol) {
  ConditionCheck out;
  const ExtendedReal s1 = branch_sum(data, 1);
  out.quantities.emplace_back("branch_sum_1", s1.value());
  if (data.kappa && *data.kappa == 0) {
    out.quantities.emplace_back("eps_0", 1.0 - s1.value());
    if (!(s1 <= ExtendedReal{1.0 + tol}))
      out.failures.push_back(condition_finding(0, "branch-sum-bound", s1.value() - 1.0,
                                               "sum of |l_i1|^2 int 1/s dmu_i exceeds 1"));
    out.holds = out.failures.empty();
    return out;
  }
  if (data.kappa) require_finite_kappa(data);
  if (data.trunk_weights.empty()) throw InputError("a nonempty trunk needs trunk weights");
  if (s1.is_infinite() || std::abs(s1.value() - 1.0) > tol)
    out.failures.push_back(condition_finding(0, "branch-sum-equality", s1.value() - 1.0,
                                             "sum of |l_i1|^2 int 1/s dmu_i must equal 1"));
  const int equalities = data.kappa ? *data.kappa - 1 : static_cast<int>(data.trunk_weights.size());
  for (int l = 1; l <= equalities; ++l) {
    double value = trunk_product(data, l) * branch_sum(data, l + 1).value();
    out.quantities.emplace_back("trunk_identity_" + std::to_string(l), value);
    if (!std::isfinite(value) || std::abs(value - 1.0) > tol)
      out.failures.push_back(condition_finding(-l, "trunk-identity", value - 1.0,
                                               "P_" + std::to_string(l) + " times the branch sum of s^-" +
                                                   std::to_string(l + 1) + " must equal 1"));
  }
  if (data.kappa) {
    const int kappa = *data.kappa;
    double value = trunk_product(data, kappa) * branch_sum(data, kappa + 1).value();
    out.quantities.emplace_back("root_mass_bound", value);
    out.quantities.emplace_back("eps_root", 1.0 - value);
    if (!std::isfinite(value) || value > 1.0 + tol)
      out.failures.push_back(condition_finding(-kappa, "root-mass-bound", value - 1.0,
                                               "P_kappa times the branch sum of s^-(kappa+1) exceeds 1"));
  } else {
    out.quantities.emplace_back("window", static_cast<double>(data.trunk_weights.size()));
  }
  out.holds = out.failures.empty();
  return out;
}

ConditionCheck check_root_measure_condition(const BranchData& data, const AtomicMeasure& nu, double tol) {
  require_finite_kappa(data);
  const int kappa = *data.kappa;
  ConditionCheck out;
  if (std::abs(nu.total_mass() - 1.0) > tol)
    out.failures.push_back(condition_finding(-kappa, "not-probability", std::abs(nu.total_mass() - 1.0),
                                             "nu must be a probability measure"));
  for (int n = 1; n <= kappa; ++n) {
    double lhs = nu.moment(n);
    double rhs = root_power_norm(data, n);
    out.quantities.emplace_back("root_moment_" + std::to_string(n), lhs);
    if (!close(lhs, rhs, tol))
      out.failures.push_back(condition_finding(-kappa, "root-moment", lhs - rhs,
                                               "int s^" + std::to_string(n) + " dnu must equal ||S^n e_root||^2"));
  }
  auto rhs = weighted_branch_measure(data, 1, trunk_product(data, kappa));
  if (!rhs) {
    out.failures.push_back(condition_finding(0, "zero-atom-under-nonzero-weight", 1.0,
                                             "a branch measure has an atom at 0 under a nonzero entry weight"));
  } else {
    MeasureDiscrepancy d = compare_measures(nu.power_weighted(kappa), *rhs);
    out.quantities.emplace_back("root_measure_discrepancy", d.mass);
    if (d.mass > tol * std::max(1.0, rhs->total_mass()))
      out.failures.push_back(condition_finding(-kappa, "root-measure-identity", d.mass,
                                               "s^kappa nu differs from P_kappa sum_i |l_i1|^2 (1/s) mu_i"));
  }
  out.holds = out.failures.empty();
  return out;
}

std::optional<AtomicMeasure> canonical_root_measure(const BranchData& data, double tol) {
  require_finite_kappa(data);
  const int kappa = *data.kappa;
  auto part = weighted_branch_measure(data, kappa + 1, trunk_product(data, kappa));
  if (!part) return std::nullopt;
  double deficit = 1.0 - part->total_mass();
  if (deficit < -tol) return std::nullopt;
  if (deficit > 64.0 * std::numeric_limits<double>::epsilon()) return *part + AtomicMeasure::dirac(0.0, deficit);
  return part;
}

WeightedShift branch_shift(const BranchData& data, int depth) {
  if (data.eta < 2) throw InputError("T(eta, kappa) requires eta >= 2");
  if (data.entry_weights.size() != static_cast<std::size_t>(data.eta))
    throw InputError("one entry weight per branch is required");
  DirectedTree tree = DirectedTree::t_eta_kappa(data.eta, data.kappa, depth);
  const int trunk = data.kappa ? *data.kappa : depth;
  if (data.trunk_weights.size() < static_cast<std::size_t>(trunk))
    throw InputError("the trunk needs " + std::to_string(trunk) + " weights");
  std::vector<Complex> w(tree.size());
  for (int l = 0; l < trunk; ++l) w[tree.index(VertexId(-l))] = data.trunk_weights[static_cast<std::size_t>(l)];
  for (int i = 1; i <= data.eta; ++i) {
    const auto bi = static_cast<std::size_t>(i - 1);
    w[tree.index(VertexId(i, 1))] = data.entry_weights[bi];
    for (int j = 2; j <= depth; ++j) {
      Complex lw;
      const auto k = static_cast<std::size_t>(j - 2);
      if (bi < data.branch_weights.size() && k < data.branch_weights[bi].size()) {
        lw = data.branch_weights[bi][k];
      } else if (bi < data.branch_measures.size()) {
        double lo = data.branch_measures[bi].moment(j - 2);
        if (lo == 0.0) throw DomainError("branch measure " + std::to_string(i) + " cannot define deeper weights");
        lw = std::sqrt(data.branch_measures[bi].moment(j - 1) / lo);
      } else {
        throw InputError("branch " + std::to_string(i) + " needs a weight at depth " + std::to_string(j));
      }
      w[tree.index(VertexId(i, j))] = lw;
    }
  }
  return WeightedShift(std::move(tree), std::move(w));
}

namespace {

// The proof's measure system on T(eta, kappa): branch vertices carry
// s^{n-1} mu_i normalized, the trunk the branch sums of s^{-l-1} mu_i (or the
// pushforwards of nu), and only the root or the branching vertex holds eps.
MeasureSystem branch_system(const BranchData& data, const WeightedShift& shift, bool use_nu) {
  const DirectedTree& tree = shift.tree();
  const int depth = tree.family().depth;
  MeasureSystem system;
  system.mu.resize(tree.size());
  system.eps.assign(tree.size(), 0.0);
  system.provenance = "branch construction";
  for (int i = 1; i <= data.eta; ++i) {
    const AtomicMeasure& mi = data.branch_measures[static_cast<std::size_t>(i - 1)];
    for (int n = 1; n <= depth; ++n) {
      AtomicMeasure m = mi.power_weighted(n - 1);
      system.mu[tree.index(VertexId(i, n))] = m.scaled(1.0 / m.total_mass());
    }
  }
  const int trunk = data.kappa ? *data.kappa : depth;
  if (use_nu) {
    const int kappa = *data.kappa;
    for (int l = 0; l <= kappa; ++l) {
      AtomicMeasure m = data.nu->power_weighted(kappa - l);
      system.mu[tree.index(VertexId(-l))] = m.scaled(1.0 / m.total_mass());
    }
    system.eps[tree.index(VertexId(-kappa))] = data.nu->mass_at_zero();
    return system;
  }
  for (int l = 0; l <= trunk; ++l) {
    auto m = weighted_branch_measure(data, l + 1, trunk_product(data, std::min(l, static_cast<int>(data.trunk_weights.size()))));
    system.mu[tree.index(VertexId(-l))] = m ? *m : AtomicMeasure{};
  }
  if (data.kappa) {
    Vertex root = tree.index(VertexId(-*data.kappa));
    double eps = 1.0 - system.mu[root].total_mass();
    if (eps > 64.0 * std::numeric_limits<double>::epsilon()) {
      system.eps[root] = eps;
      system.mu[root] = system.mu[root] + AtomicMeasure::dirac(0.0, eps);
    }
  }
  return system;
}

}  // namespace

ModelCertificate certify_t_eta_kappa(const BranchData& input, int depth, double tol) {
  if (input.eta < 2) throw InputError("T(eta, kappa) requires eta >= 2");
  if (input.kappa && *input.kappa < 0) throw InputError("kappa must be nonnegative");
  if (input.entry_weights.size() != static_cast<std::size_t>(input.eta))
    throw InputError("one entry weight per branch is required");
  for (const Complex& w : input.entry_weights)
    if (w == Complex{}) throw InputError("entry weights must be nonzero");
  if (input.kappa && input.trunk_weights.size() != static_cast<std::size_t>(*input.kappa))
    throw InputError("a finite trunk of length kappa needs exactly kappa trunk weights");
  if (!input.kappa && input.trunk_weights.empty()) throw InputError("an infinite trunk needs a window of trunk weights");
  if (depth < 1) throw InputError("depth must be at least 1");

  ModelCertificate mc;
  mc.family = "t-eta-kappa";
  BranchData data = input;
  bool from_quadrature = false;

  if (!data.branch_measures.empty()) {
    if (data.branch_measures.size() != static_cast<std::size_t>(data.eta))
      throw InputError("one branch measure per branch is required");
    for (int i = 0; i < data.eta; ++i) {
      const AtomicMeasure& mi = data.branch_measures[static_cast<std::size_t>(i)];
      if (!mi.is_probability(tol)) throw InputError("branch measure " + std::to_string(i + 1) + " is not a probability measure");
      if (static_cast<std::size_t>(i) >= data.branch_weights.size()) continue;
      const auto& bw = data.branch_weights[static_cast<std::size_t>(i)];
      double product = 1.0;
      for (std::size_t n = 1; n <= bw.size() && static_cast<int>(n) < depth; ++n) {
        product *= std::norm(bw[n - 1]);
        if (!close(mi.moment(static_cast<int>(n)), product, tol))
          throw InputError("branch measures do not represent branch weights: branch " + std::to_string(i + 1) +
                           ", moment " + std::to_string(n));
      }
    }
  } else {
    if (data.branch_weights.size() != static_cast<std::size_t>(data.eta))
      throw InputError("give either branch measures or branch weights for every branch");
    from_quadrature = true;
    mc.notes.push_back("branch measures built by quadrature from branch weights");
    for (int i = 0; i < data.eta; ++i) {
      const auto& bw = data.branch_weights[static_cast<std::size_t>(i)];
      if (bw.empty()) throw InputError("branch " + std::to_string(i + 1) + " needs at least one weight");
      MomentSequence s;
      s.origin = MomentOrigin::weights;
      s.values.push_back(1.0);
      for (const Complex& w : bw) s.values.push_back(s.values.back() * std::norm(w));
      StieltjesVerdict v = check_stieltjes(s, tol);
      mc.verdicts.push_back(v);
      if (!v.consistent()) {
        mc.status = CertificateStatus::refuted;
        Finding f = stieltjes_finding(kNoVertex, v, "branch " + std::to_string(i + 1) + " power norms fail");
        f.id = VertexId(i + 1, 1);
        mc.witnesses.push_back(std::move(f));
        return mc;
      }
      Quadrature q = quadrature_from_moments(s, tol);
      depth = std::min(depth, matched_order(q, static_cast<int>(bw.size())) + 1);
      data.branch_measures.push_back(q.measure.scaled(1.0 / q.measure.total_mass()));
    }
  }
  if (!data.kappa) {
    if (static_cast<std::size_t>(depth) > data.trunk_weights.size()) {
      depth = static_cast<int>(data.trunk_weights.size());
      mc.notes.push_back("depth reduced to the trunk window");
    }
    data.trunk_weights.resize(static_cast<std::size_t>(depth));
    mc.notes.push_back("infinite trunk: identities checked up to window " + std::to_string(depth));
  }

  const bool use_nu = data.kappa && *data.kappa > 0 && data.nu.has_value();
  ConditionCheck cond = use_nu ? check_root_measure_condition(data, *data.nu, tol) : check_integral_condition(data, tol);
  mc.quantities = cond.quantities;
  mc.quantities.emplace_back("depth", depth);

  WeightedShift shift = branch_shift(data, depth);
  for (Finding f : cond.failures) {
    if (f.id && shift.tree().contains(*f.id)) f.vertex = shift.tree().index(*f.id);
    mc.witnesses.push_back(std::move(f));
  }
  if (!cond.holds) {
    if (from_quadrature) {
      mc.status = CertificateStatus::conditional;
      mc.notes.push_back("condition fails for the quadrature measures; other representing measures are not excluded");
    } else {
      mc.status = CertificateStatus::refuted;
      mc.notes.push_back("finitely atomic branch measures are determinate, so the failed condition refutes subnormality");
    }
    mc.shift = std::move(shift);
    return mc;
  }

  MeasureSystem system = branch_system(data, shift, use_nu);
  system.conditional = from_quadrature;
  if (data.kappa) mc.quantities.emplace_back("eps_root", system.eps[shift.tree().index(VertexId(-*data.kappa))]);
  absorb_cross_check(mc, certify_subnormal(shift, system, depth, tol), from_quadrature);
  mc.shift = std::move(shift);
  mc.system = std::move(system);
  return mc;
}

EquivalenceReport ibj_equivalence_check(const BranchData& data, double tol) {
  require_finite_kappa(data);
  const int kappa = *data.kappa;
  EquivalenceReport r;
  r.integral = check_integral_condition(data, tol);
  r.integral_condition = r.integral.holds;
  if (auto nu = canonical_root_measure(data, tol)) {
    r.root = check_root_measure_condition(data, *nu, tol);
  } else {
    r.root.failures.push_back(condition_finding(-kappa, "no-root-measure", 0.0,
                                                "no probability measure nu fits the branch data"));
  }
  r.root_measure_condition = r.root.holds;
  r.agree = r.integral_condition == r.root_measure_condition;

  if (data.nu) {
    const AtomicMeasure& nu = *data.nu;
    r.supplied_nu_condition = check_root_measure_condition(data, nu, tol).holds;
    if (*r.supplied_nu_condition) {
      // Read the integral identities off nu: int s^{kappa-l} dnu divided by
      // ||S^{kappa-l} e_{-kappa}||^2 recovers P_l times the branch sum of s^{-l-1}.
      bool ok = true;
      for (int l = 0; l < kappa; ++l) {
        double via_nu = nu.moment(kappa - l) / root_power_norm(data, kappa - l);
        double direct = trunk_product(data, l) * branch_sum(data, l + 1).value();
        ok = ok && close(via_nu, direct, tol) && close(via_nu, 1.0, tol);
      }
      double direct_root = trunk_product(data, kappa) * branch_sum(data, kappa + 1).value();
      ok = ok && close(1.0 - nu.mass_at_zero(), direct_root, tol);
      r.reverse_agrees = ok && r.integral_condition;
    } else {
      r.reverse_agrees = !r.integral_condition;
    }
  }
  return r;
}

DeterExtraction deter_extract(const WeightedShift& shift, const std::map<Vertex, MomentSequence>& sequences,
                              double tol) {
  const DirectedTree& tree = shift.tree();
  const FamilyParams& fam = tree.family();
  if (fam.family != Family::t_eta_kappa) throw InputError("deter_extract needs a shift on T(eta, kappa)");
  const int depth = fam.depth;
  const int trunk = fam.kappa ? *fam.kappa : depth;

  auto sequence_at = [&](const VertexId& id) -> const MomentSequence& {
    auto it = sequences.find(tree.index(id));
    if (it == sequences.end()) throw InputError("no moment sequence given for vertex " + id.to_string());
    if (!check_stieltjes(it->second, tol).consistent())
      throw DomainError("the moment sequence at " + id.to_string() + " is not a Stieltjes moment sequence");
    return it->second;
  };
  for (int k = 1; k <= trunk; ++k) sequence_at(VertexId(-k));
  const MomentSequence& root_seq = sequence_at(VertexId(0));

  DeterExtraction out;
  BranchData& data = out.data;
  data.eta = fam.eta;
  data.kappa = fam.kappa;
  for (int l = 0; l < trunk; ++l) data.trunk_weights.push_back(shift.weight(tree.index(VertexId(-l))));
  int usable = depth;
  for (int i = 1; i <= fam.eta; ++i) {
    const MomentSequence& s = sequence_at(VertexId(i, 1));
    Quadrature q = quadrature_from_moments(s, tol);
    usable = std::min(usable, matched_order(q, static_cast<int>(s.order())) + 1);
    data.branch_measures.push_back(q.measure.scaled(1.0 / q.measure.total_mass()));
    data.entry_weights.push_back(shift.weight(tree.index(VertexId(i, 1))));
    out.branch_quadrature.push_back(std::move(q));
  }
  for (int i = 1; i <= fam.eta; ++i) {
    std::vector<Complex> bw;
    for (int j = 2; j <= usable; ++j) bw.push_back(shift.weight(tree.index(VertexId(i, j))));
    data.branch_weights.push_back(std::move(bw));
  }

  out.conclusion = certify_t_eta_kappa(data, std::max(1, usable), tol);
  if (out.conclusion.status == CertificateStatus::certified) out.conclusion.status = CertificateStatus::conditional;
  out.conclusion.notes.push_back("conditional on determinacy of {||S^(n+1) e_0||^2}");

  MomentSequence shifted;
  shifted.origin = root_seq.origin;
  shifted.values.assign(root_seq.values.begin() + 1, root_seq.values.end());
  if (!shifted.values.empty()) out.shifted_root_diagnostic = carleman_diagnostic(shifted);
  out.quasi_analytic_sums = carleman_diagnostic(root_seq).partial_sums;
  return out;
}

}  // namespace treeshift

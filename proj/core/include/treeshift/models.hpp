#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeshift/consistency.hpp"

namespace treeshift {

/// Verdict of a closed-form certifier, with the constructed proof system and
/// its cross-check by certify_subnormal when one was built.
struct ModelCertificate {
  std::string family;
  CertificateStatus status = CertificateStatus::certified;
  std::vector<Finding> witnesses;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<StieltjesVerdict> verdicts;
  std::optional<WeightedShift> shift;
  std::optional<MeasureSystem> system;
  std::optional<Certificate> cross_check;

  std::optional<double> quantity(const std::string& key) const;
};

/// Weights lambda_1..lambda_N of the unilateral shift; lambda_n enters vertex n.
ModelCertificate certify_unilateral(const std::vector<Complex>& weights, int horizon = 16,
                                    double tol = kDefaultTolerance);

/// Two-sided t_n on [-K, N] built from a bilateral window.
struct TwoSidedSequence {
  int back = 0;                // K
  std::vector<double> values;  // t_{-K} .. t_N
  double at(int n) const { return values.at(static_cast<std::size_t>(n + back)); }
  int forward() const { return static_cast<int>(values.size()) - back - 1; }
};

/// t_n = |lambda_1..lambda_n|^2, t_0 = 1, t_{-n} = |lambda_{-n+1}..lambda_0|^{-2}.
/// weights[k] enters vertex k - back + 1, for k = 0 .. back + forward - 1.
TwoSidedSequence two_sided_sequence(const std::vector<Complex>& weights, int back);

/// Checks {t_{n-k}}_{n>=0} for k = 0..K and builds the measures of the window by
/// repeated forward maps from the window root.
ModelCertificate certify_bilateral(const std::vector<Complex>& weights, int back, int horizon = 16,
                                   double tol = kDefaultTolerance);

/// Data of a shift on T(eta, kappa): branch measures mu_i, entry weights
/// lambda_{i,1}, optional branch weights lambda_{i,2}, lambda_{i,3}, ..., trunk
/// weights lambda_0, lambda_{-1}, ... and an optional root measure nu.
struct BranchData {
  int eta = 2;
  std::optional<int> kappa;  // empty means an infinite trunk
  std::vector<AtomicMeasure> branch_measures;
  std::vector<Complex> entry_weights;
  std::vector<std::vector<Complex>> branch_weights;
  std::vector<Complex> trunk_weights;
  std::optional<AtomicMeasure> nu;
};

/// sum_i |lambda_{i,1}|^2 int s^{-k} dmu_i.
ExtendedReal branch_sum(const BranchData& data, int k);
/// |lambda_0 lambda_{-1} .. lambda_{-(l-1)}|^2.
double trunk_product(const BranchData& data, int l);

struct ConditionCheck {
  bool holds = false;
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<Finding> failures;
};

/// kappa = 0: branch_sum(1) <= 1.
/// finite kappa: branch_sum(1) = 1, P_l branch_sum(l+1) = 1 for l < kappa,
/// P_kappa branch_sum(kappa+1) <= 1. Infinite kappa: the equalities up to
/// the trunk window.
ConditionCheck check_integral_condition(const BranchData& data, double tol = kDefaultTolerance);

/// int s^n dnu = |lambda_{-(kappa-n)} .. lambda_{-(kappa-1)}|^2 for n = 1..kappa and
/// s^kappa nu = P_kappa sum_i |lambda_{i,1}|^2 (1/s) mu_i as measures.
ConditionCheck check_root_measure_condition(const BranchData& data, const AtomicMeasure& nu,
                                            double tol = kDefaultTolerance);

/// The only candidate for nu: P_kappa sum_i |lambda_{i,1}|^2 s^{-kappa-1} mu_i plus
/// the missing mass at 0. Empty when that is not a probability measure.
std::optional<AtomicMeasure> canonical_root_measure(const BranchData& data, double tol = kDefaultTolerance);

/// Builds the shift on T(eta, kappa) truncated at branch depth `depth` (for an
/// infinite trunk, the window has the same depth).
WeightedShift branch_shift(const BranchData& data, int depth);

ModelCertificate certify_t_eta_kappa(const BranchData& data, int depth = 16, double tol = kDefaultTolerance);

struct EquivalenceReport {
  bool integral_condition = false;       // condition via the integral identities
  bool root_measure_condition = false;   // condition via the canonical nu
  bool agree = false;
  std::optional<bool> supplied_nu_condition;
  std::optional<bool> reverse_agrees;    // integral identities recovered from the supplied nu
  ConditionCheck integral;
  ConditionCheck root;
};

EquivalenceReport ibj_equivalence_check(const BranchData& data, double tol = kDefaultTolerance);

struct DeterExtraction {
  BranchData data;
  ModelCertificate conclusion;
  CarlemanDiagnostic shifted_root_diagnostic;   // on {||S^{n+1} e_0||^2}
  std::vector<double> quasi_analytic_sums;      // partial sums of ||S^n e_0||^{-1/n}
  std::vector<Quadrature> branch_quadrature;
};

/// Branch measures by quadrature from the sequences at the children of 0,
/// after check_stieltjes at -k, 0 and the children. Always conditional.
DeterExtraction deter_extract(const WeightedShift& shift, const std::map<Vertex, MomentSequence>& sequences,
                              double tol = kDefaultTolerance);

}  // namespace treeshift

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeshift/measure.hpp"
#include "treeshift/moments.hpp"
#include "treeshift/shift.hpp"

namespace treeshift {

/// Per-vertex probability measures mu_v and scalars eps_v, indexed like the
/// tree's vertices. At truncated vertices the measure is data: it stands in for
/// the untruncated subtree below.
struct MeasureSystem {
  std::vector<AtomicMeasure> mu;
  std::vector<double> eps;
  /// Built from moment data, so it is one representing choice among possibly many.
  bool conditional = false;
  std::string provenance = "user";
  std::vector<std::optional<DeterminacyTrend>> determinacy;
};

/// Machine-readable failure: vertex, identity tag and size of the mismatch.
struct Finding {
  Vertex vertex = kNoVertex;
  std::string tag;
  double discrepancy = 0.0;
  std::optional<double> position;
  std::string detail;
  std::optional<VertexId> id;  // set when no tree index is at hand
};

struct ConsistencyReport {
  Vertex vertex = kNoVertex;
  bool consistent = true;
  double discrepancy = 0.0;  // largest atom-mass mismatch
  double position = 0.0;     // where it occurs
  double eps_stored = 0.0;
  ExtendedReal child_sum;    // sum over children of |lambda_v|^2 int 1/s dmu_v
  std::vector<Finding> findings;
};

/// mu_u against sum_{v in Chi(u)} |lambda_v|^2 (1/s) mu_v + eps_u delta_0, plus the
/// eps-balance eps_u = 1 - child_sum. Throws DomainError at a truncated vertex.
ConsistencyReport check_consistency_at(const MeasureSystem& system, const WeightedShift& shift, Vertex u,
                                       double tol = kDefaultTolerance);

/// n-step identity mu_u = sum_{v in Chi<n>(u)} |lambda_{u|v}|^2 s^{-n} mu_v + eps_u delta_0.
/// Truncated vertices reached before depth n enter with their own measure and
/// the depth they sit at.
ConsistencyReport propagate_check(const MeasureSystem& system, const WeightedShift& shift, Vertex u, int n,
                                  double tol = kDefaultTolerance);

/// ||S^n e_u||^2 completed through the truncation: vertices of Chi<n>(u)
/// contribute |lambda_{u|v}|^2, a truncated vertex f at depth d < n contributes
/// |lambda_{u|f}|^2 int s^{n-d} dmu_f. Without truncation this is power_norm_sq.
double completed_power_norm_sq(const WeightedShift& shift, const MeasureSystem& system, Vertex u, int n);

/// {||S^n e_u||^2}_{n <= n_max}. Needs n_max <= complete_depth(u) unless a system
/// is given to complete the sums.
MomentSequence vertex_moment_sequence(const WeightedShift& shift, Vertex u, int n_max,
                                      const MeasureSystem* system = nullptr);

struct MomentMatchRow {
  int n = 0;
  double integral = 0.0;    // int s^n dmu_u
  double power_norm = 0.0;  // ||S^n e_u||^2
  double relative_error = 0.0;
};

struct MomentMatchReport {
  Vertex vertex = kNoVertex;
  bool matches = true;
  double worst_relative_error = 0.0;
  std::vector<MomentMatchRow> rows;
};

MomentMatchReport moments_match(const MeasureSystem& system, const WeightedShift& shift, Vertex u, int n_max,
                                double tol = kDefaultTolerance);

struct ParentMeasure {
  AtomicMeasure mu;
  double eps = 0.0;
};

/// mu_u = sum |lambda_v|^2 (1/s) mu_v + eps delta_0 with eps the deficit. Throws
/// DomainError when the child sum exceeds 1 + tol (or is infinite).
ParentMeasure parent_from_children(const WeightedShift& shift, Vertex u,
                                   const std::vector<AtomicMeasure>& child_measures,
                                   double tol = kDefaultTolerance);

/// Inverse map for a single child u1 of u0: (1/|lambda_{u1}|^2) s mu_parent.
AtomicMeasure child_from_parent_single(const WeightedShift& shift, Vertex u0, const AtomicMeasure& mu_parent);

/// Bottom-up construction: truncated vertices take frontier[v], leaves delta_0,
/// every other vertex parent_from_children.
MeasureSystem system_from_frontier(const WeightedShift& shift, const std::map<Vertex, AtomicMeasure>& frontier,
                                   double tol = kDefaultTolerance);

/// mu_u by quadrature from the sequence at u, delta_0 at leaves. eps_u is the
/// deficit at interior vertices and mu_u({0}) at truncated ones. The result is
/// conditional: quadrature picks one representing measure.
MeasureSystem build_system_from_sequences(const WeightedShift& shift,
                                          const std::map<Vertex, MomentSequence>& sequences,
                                          double tol = kDefaultTolerance);

enum class CertificateStatus { certified, refuted, conditional };
std::string to_string(CertificateStatus status);
int exit_code(CertificateStatus status);

struct VertexCheck {
  Vertex vertex = kNoVertex;
  bool truncated = false;
  double consistency_discrepancy = 0.0;
  double moment_error = 0.0;
  double eps = 0.0;
  bool passes = true;
};

struct Certificate {
  CertificateStatus status = CertificateStatus::certified;
  int horizon = 0;
  double tolerance = kDefaultTolerance;
  std::vector<VertexCheck> vertices;
  std::vector<Finding> witnesses;
  std::vector<std::string> notes;

  bool refuted() const { return status == CertificateStatus::refuted; }
  /// Certified or conditional: no check failed.
  bool passes() const { return status != CertificateStatus::refuted; }
};

/// Consistency at every non-truncated vertex, moment identities up to the
/// horizon, probability of every mu_v, the structural hyponormality obstruction,
/// and eps_v = 0 wherever a nonzero weight enters v.
Certificate certify_subnormal(const WeightedShift& shift, const MeasureSystem& system, int horizon,
                              double tol = kDefaultTolerance);

/// The shift and system restricted to Des(u) with u as root.
std::pair<WeightedShift, MeasureSystem> restrict_to_subtree(const WeightedShift& shift, const MeasureSystem& system,
                                                            Vertex u);

/// Certificate on each subtree of a cover; refuted if any is, conditional if any is.
Certificate certify_cover(const WeightedShift& shift, const MeasureSystem& system, const std::vector<Vertex>& cover,
                          int horizon, double tol = kDefaultTolerance);

/// check_stieltjes on {||S^n e_u||^2}_{n <= n_max} at every vertex; the criterion
/// that decides subnormality when all supports are bounded.
std::vector<StieltjesVerdict> stieltjes_at_vertices(const WeightedShift& shift, int n_max,
                                                    const MeasureSystem* system = nullptr,
                                                    double tol = kDefaultTolerance);

}  // namespace treeshift

#pragma once

#include <vector>

#include "treeshift/consistency.hpp"

namespace treeshift {

/// The bounded approximant of index i: weights lambda^(i), measures mu^(i) on
/// [0, i] and scalars eps^(i), built from a consistent system.
struct TruncationEntry {
  int i = 0;
  WeightedShift shift;
  MeasureSystem system;
  /// kappa_u = min { i >= 1 : mu_u([0, i]) > 0 }.
  std::vector<int> kappa;
  /// mu_u([0, i]) / mu_u(R+); exactly 1 when the support already lies in [0, i].
  std::vector<double> retained;
};

/// lambda^(i)_v = lambda_v sqrt(mu_v([0,i]) / mu_par(v)([0,i])), or 0 when the
/// parent keeps no mass; mu^(i)_v the normalized restriction to [0, i], or
/// delta_0; eps^(i)_v = eps_v / mu_v([0,i]), or 1.
TruncationEntry truncate(const MeasureSystem& system, const WeightedShift& shift, int i);

struct TruncationReport {
  int i = 0;
  bool passes = true;
  bool supports_within = true;
  double worst_discrepancy = 0.0;
  AlphaBound alpha;
  std::vector<Finding> findings;
};

/// Consistency of the truncated triple at every non-truncated vertex, supports
/// in [0, i], probability, and the norm bound alpha <= i.
TruncationReport verify_truncated_consistency(const TruncationEntry& entry, double tol = kDefaultTolerance);

/// lambda^(i)_{u|v} from the closed form lambda_{u|v} sqrt(mu_v([0,i]) / mu_u([0,i])).
/// Throws DomainError when i < kappa_u.
Complex truncated_lambda_path(const TruncationEntry& entry, const WeightedShift& shift, Vertex u, Vertex v);

struct ConvergenceRow {
  int i = 0;
  double truncated_norm_sq = 0.0;  // ||S^(i)^n e_u||^2
  double restricted_moment = 0.0;  // int_[0,i] s^n dmu_u / mu_u([0,i])
  Complex cross;                   // <S^n e_u, S^(i)^n e_u>
  double residual = 0.0;           // ||S^n e_u||^2 + ||S^(i)^n e_u||^2 - 2 Re cross
  double residual_direct = 0.0;    // sum |lambda_{u|v} - lambda^(i)_{u|v}|^2
  double max_weight_gap = 0.0;     // max_v |lambda^(i)_v - lambda_v|
};

struct ConvergenceReport {
  Vertex vertex = kNoVertex;
  int n = 0;
  double norm_sq = 0.0;  // ||S^n e_u||^2
  double max_support = 0.0;
  std::vector<ConvergenceRow> rows;
  bool nonincreasing = true;
  bool zero_beyond_support = true;
};

/// Requires n <= complete_depth(u), so that S^n e_u is a vector of the
/// truncated tree. i_list must be increasing.
ConvergenceReport convergence_report(const MeasureSystem& system, const WeightedShift& shift, Vertex u, int n,
                                     const std::vector<int>& i_list);

}  // namespace treeshift

#pragma once

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "treeshift/tree.hpp"

namespace treeshift {

using Complex = std::complex<double>;

/// Weighted shift S_lambda on a directed tree: S e_u = sum over children v of
/// lambda_v e_v. Weights are stored per vertex index; parentless vertices carry 0.
class WeightedShift {
 public:
  WeightedShift() = default;
  /// weights[v] is lambda_v. Throws InputError on a size mismatch or a nonzero
  /// weight on a parentless vertex.
  WeightedShift(DirectedTree tree, std::vector<Complex> weights);

  /// Keys must be vertices with a parent. Missing vertices get weight 0 unless
  /// require_all is set, in which case they are rejected.
  static WeightedShift from_map(DirectedTree tree, const std::map<VertexId, Complex>& weights,
                                bool require_all = false);

  const DirectedTree& tree() const { return tree_; }
  const std::vector<Complex>& weights() const { return weights_; }
  Complex weight(Vertex v) const { return weights_.at(v); }
  double weight_sq(Vertex v) const { return std::norm(weights_.at(v)); }
  /// True iff lambda_v != 0 for every vertex with a parent.
  bool nonzero_weights() const;

 private:
  DirectedTree tree_;
  std::vector<Complex> weights_;
};

/// S^n e_u = sum of terms[k].second * e_{terms[k].first}, support in Chi<n>(u).
struct CoefficientMap {
  Vertex source = kNoVertex;
  int power = 0;
  std::vector<std::pair<Vertex, Complex>> terms;  // sorted by vertex
};

/// lambda_{u|v}: 1 when v = u, else the product of weights along the path from u
/// down to v. Throws DomainError when v is not a descendant of u.
Complex lambda_path(const WeightedShift& shift, Vertex u, Vertex v);

CoefficientMap power_coefficients(const WeightedShift& shift, Vertex u, int n);

/// ||S^n e_u||^2 over the vertex set (0 when Chi<n>(u) is empty).
double power_norm_sq(const WeightedShift& shift, Vertex u, int n);

/// <S^m e_u, S^n e_v>, linear in the first slot, from the closed form
/// that only needs one path coefficient and one power norm.
Complex inner_product_powers(const WeightedShift& shift, Vertex u, int m, Vertex v, int n);

struct AdjointImage {
  Vertex target = kNoVertex;
  Complex coefficient;
};

/// S* e_u = conj(lambda_u) e_{par(u)}; empty for the root (zero vector).
std::optional<AdjointImage> adjoint_basis(const WeightedShift& shift, Vertex u);

struct AlphaBound {
  double value = 0.0;
  Vertex attained_at = kNoVertex;
  bool lower_bound_only = false;    // the tree is truncated
  bool grows_with_horizon = false;  // supremum only reached next to the truncation
};

/// sup over u of sum_{v in Chi(u)} |lambda_v|^2, evaluated on vertices whose
/// children are all present. Equals ||S||^2 when the shift is bounded.
AlphaBound bound_alpha(const WeightedShift& shift);

struct StructuralReport {
  bool leafless = false;
  bool nonzero_weights = false;
  bool injective = false;
  std::vector<Vertex> kernel_vertices;  // sum of |lambda_v|^2 over Chi(u) is 0
  std::vector<Vertex> leaves;
  /// Nonzero weights on a tree with a leaf: S is not hyponormal, hence not subnormal.
  bool hyponormality_obstruction = false;
};

StructuralReport structural_checks(const WeightedShift& shift);

}  // namespace treeshift

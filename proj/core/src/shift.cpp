#include "treeshift/shift.hpp"

#include <algorithm>

#include "treeshift/error.hpp"

namespace treeshift {

WeightedShift::WeightedShift(DirectedTree tree, std::vector<Complex> weights)
    : tree_(std::move(tree)), weights_(std::move(weights)) {
  if (weights_.size() != tree_.size())
    throw InputError("weight vector size does not match the vertex count");
  for (Vertex v = 0; v < tree_.size(); ++v)
    if (tree_.parent(v) == kNoVertex && weights_[v] != Complex{})
      throw InputError("vertex " + tree_.id(v).to_string() + " has no parent and cannot carry a weight");
}

WeightedShift WeightedShift::from_map(DirectedTree tree, const std::map<VertexId, Complex>& weights,
                                      bool require_all) {
  std::vector<Complex> w(tree.size());
  for (const auto& [id, value] : weights) {
    Vertex v = tree.index(id);
    if (tree.parent(v) == kNoVertex)
      throw InputError("weight given for parentless vertex " + id.to_string());
    w[v] = value;
  }
  if (require_all)
    for (Vertex v = 0; v < tree.size(); ++v)
      if (tree.parent(v) != kNoVertex && !weights.count(tree.id(v)))
        throw InputError("missing weight for vertex " + tree.id(v).to_string());
  return WeightedShift(std::move(tree), std::move(w));
}

bool WeightedShift::nonzero_weights() const {
  for (Vertex v = 0; v < tree_.size(); ++v)
    if (tree_.parent(v) != kNoVertex && weights_[v] == Complex{}) return false;
  return true;
}

Complex lambda_path(const WeightedShift& shift, Vertex u, Vertex v) {
  const DirectedTree& tree = shift.tree();
  std::vector<Vertex> path;
  Vertex w = v;
  while (w != u) {
    if (w == kNoVertex || path.size() > tree.size())
      throw DomainError(tree.id(v).to_string() + " is not a descendant of " + tree.id(u).to_string());
    path.push_back(w);
    w = tree.parent(w);
  }
  // Multiply top-down so that lambda_{u|w} = lambda_{u|v} * lambda_w holds bitwise.
  Complex out{1.0, 0.0};
  for (auto it = path.rbegin(); it != path.rend(); ++it) out *= shift.weight(*it);
  return out;
}

CoefficientMap power_coefficients(const WeightedShift& shift, Vertex u, int n) {
  if (n < 0) throw InputError("power must be nonnegative");
  const DirectedTree& tree = shift.tree();
  if (u >= tree.size()) throw InputError("unknown vertex index");
  CoefficientMap out{u, n, {{u, Complex{1.0, 0.0}}}};
  for (int k = 0; k < n && !out.terms.empty(); ++k) {
    std::vector<std::pair<Vertex, Complex>> next;
    for (const auto& [v, c] : out.terms)
      for (Vertex w : tree.children(v)) next.emplace_back(w, c * shift.weight(w));
    out.terms = std::move(next);
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

double power_norm_sq(const WeightedShift& shift, Vertex u, int n) {
  double sum = 0.0;
  for (const auto& term : power_coefficients(shift, u, n).terms) sum += std::norm(term.second);
  return sum;
}

namespace {

// par^k(w), or kNoVertex when the chain leaves the vertex set.
Vertex ancestor(const DirectedTree& tree, Vertex w, int k) {
  for (int j = 0; j < k && w != kNoVertex; ++j) w = tree.parent(w);
  return w;
}

}  // namespace

Complex inner_product_powers(const WeightedShift& shift, Vertex u, int m, Vertex v, int n) {
  if (m < 0 || n < 0) throw InputError("powers must be nonnegative");
  const DirectedTree& tree = shift.tree();
  if (m <= n) {
    // C^{m,n}(u,v) is nonempty iff par^{n-m}(u) = v and Chi<m>(u) is nonempty.
    if (ancestor(tree, u, n - m) != v || children_n(tree, u, m).empty()) return {};
    return std::conj(lambda_path(shift, v, u)) * power_norm_sq(shift, u, m);
  }
  if (ancestor(tree, v, m - n) != u || children_n(tree, v, n).empty()) return {};
  return lambda_path(shift, u, v) * power_norm_sq(shift, v, n);
}

std::optional<AdjointImage> adjoint_basis(const WeightedShift& shift, Vertex u) {
  Vertex p = shift.tree().parent(u);
  if (p == kNoVertex) return std::nullopt;
  return AdjointImage{p, std::conj(shift.weight(u))};
}

AlphaBound bound_alpha(const WeightedShift& shift) {
  const DirectedTree& tree = shift.tree();
  AlphaBound out;
  out.lower_bound_only = tree.has_truncation();
  double deep_max = 0.0;
  double shallow_max = 0.0;
  bool any_deep = false;
  for (Vertex u = 0; u < tree.size(); ++u) {
    if (tree.is_truncated(u)) continue;
    double sum = 0.0;
    bool next_to_cut = false;
    for (Vertex v : tree.children(u)) {
      sum += shift.weight_sq(v);
      next_to_cut = next_to_cut || tree.is_truncated(v);
    }
    if (out.attained_at == kNoVertex || sum > out.value) {
      out.value = sum;
      out.attained_at = u;
    }
    if (next_to_cut) {
      any_deep = true;
      deep_max = std::max(deep_max, sum);
    } else {
      shallow_max = std::max(shallow_max, sum);
    }
  }
  out.grows_with_horizon = out.lower_bound_only && any_deep && deep_max > shallow_max * (1.0 + 1e-12);
  return out;
}

StructuralReport structural_checks(const WeightedShift& shift) {
  const DirectedTree& tree = shift.tree();
  StructuralReport out;
  out.leafless = tree.leafless();
  out.nonzero_weights = shift.nonzero_weights();
  for (Vertex u = 0; u < tree.size(); ++u) {
    if (tree.is_truncated(u)) continue;
    if (tree.children(u).empty()) out.leaves.push_back(u);
    double sum = 0.0;
    for (Vertex v : tree.children(u)) sum += shift.weight_sq(v);
    if (sum == 0.0) out.kernel_vertices.push_back(u);
  }
  out.injective = out.leafless && out.kernel_vertices.empty();
  out.hyponormality_obstruction = out.nonzero_weights && !out.leafless;
  return out;
}

}  // namespace treeshift

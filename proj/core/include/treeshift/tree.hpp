#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treeshift/vertex.hpp"

namespace treeshift {

/// Position of a vertex in DirectedTree::vertices(). Indices follow the
/// VertexId ordering, so iterating by index gives deterministic output.
using Vertex = std::size_t;
inline constexpr Vertex kNoVertex = static_cast<Vertex>(-1);

using Edge = std::pair<VertexId, VertexId>;  // (parent, child)

enum class Family { explicit_tree, unilateral, bilateral_window, t_eta_kappa };

std::string to_string(Family family);
Family family_from_string(const std::string& text);

struct FamilyParams {
  Family family = Family::explicit_tree;
  int eta = 0;
  std::optional<int> kappa;  // empty means an infinite trunk
  int depth = 0;             // truncation horizon N_T
  std::optional<int> back;   // bilateral window [-back, depth]; defaults to depth
};

struct Violation {
  enum class Kind {
    empty,
    duplicate_vertex,
    unknown_vertex,
    duplicate_edge,
    multiple_parents,
    multiple_roots,
    cycle,
    disconnected,
    family_mismatch,
  };
  Kind kind;
  std::string detail;
  std::vector<VertexId> vertices;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string summary() const;
};

/// A finite (possibly truncated) directed tree.
///
/// Generated families are explicit truncations at depth N_T. Vertices whose
/// children lie beyond the truncation are marked truncated; downstream checks
/// treat them as "data ends here" instead of as leaves.
class DirectedTree {
 public:
  DirectedTree() = default;

  /// Builds from an edge list and throws InputError if validate_edges() reports
  /// anything.
  static DirectedTree from_edges(std::vector<VertexId> vertices, const std::vector<Edge>& edges,
                                 const std::vector<VertexId>& truncated = {});

  /// Builds from a parent map without checking tree invariants, so that
  /// validate() can inspect malformed input. Unknown ids still throw.
  static DirectedTree from_parents(std::vector<VertexId> vertices,
                                   const std::map<VertexId, VertexId>& parent,
                                   const std::vector<VertexId>& truncated = {});

  /// Canonical families. Throws InputError for eta < 2, kappa < 0 or depth < 1.
  static DirectedTree make_family(const FamilyParams& params);
  static DirectedTree unilateral(int depth);
  static DirectedTree bilateral_window(int depth, std::optional<int> back = std::nullopt);
  static DirectedTree t_eta_kappa(int eta, std::optional<int> kappa, int depth);

  std::size_t size() const { return ids_.size(); }
  const std::vector<VertexId>& vertices() const { return ids_; }
  const VertexId& id(Vertex v) const { return ids_.at(v); }
  bool contains(const VertexId& id) const { return index_.count(id) != 0; }
  /// Throws InputError for an unknown id.
  Vertex index(const VertexId& id) const;

  Vertex parent(Vertex v) const { return parent_.at(v); }
  std::span<const Vertex> children(Vertex v) const { return children_.at(v); }
  bool is_truncated(Vertex v) const { return truncated_.at(v); }
  bool has_truncation() const;

  /// Structural root of the vertex set, if there is exactly one parentless vertex.
  std::optional<Vertex> root() const;

  const FamilyParams& family() const { return family_; }
  /// Depth horizon: N_T for families, the height for explicit trees.
  int horizon() const;

  /// Leaflessness of the untruncated tree. Families answer from the tag;
  /// explicit trees look for a non-truncated childless vertex.
  bool leafless() const;
  /// True for the bilateral window and T(eta, infinity).
  bool rootless() const;
  /// Whether v lies in V minus Root(T) of the untruncated tree. For rootless
  /// families the window root has a parent outside the window.
  bool has_parent_in_full_tree(Vertex v) const;

 private:
  void rebuild_index();
  void rebuild_children();

  std::vector<VertexId> ids_;
  std::map<VertexId, Vertex> index_;
  std::vector<Vertex> parent_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<bool> truncated_;
  FamilyParams family_;
  std::optional<bool> leafless_hint_;
  bool rootless_ = false;

  friend DirectedTree subtree(const DirectedTree& tree, Vertex u);
};

ValidationReport validate(const DirectedTree& tree);
ValidationReport validate_edges(const std::vector<VertexId>& vertices, const std::vector<Edge>& edges);

/// Chi<n>(u) = { w : par^n(w) = u }, sorted by index. Chi<0>(u) = {u}.
std::vector<Vertex> children_n(const DirectedTree& tree, Vertex u, int n);
std::vector<VertexId> children_n(const DirectedTree& tree, const VertexId& u, int n);

/// Des(u) within the vertex set, sorted by index.
std::vector<Vertex> descendants(const DirectedTree& tree, Vertex u);
std::vector<VertexId> descendants(const DirectedTree& tree, const VertexId& u);

/// The directed tree on Des(u) rooted at u. Truncation marks and the analytic
/// leaflessness of the parent tree carry over.
DirectedTree subtree(const DirectedTree& tree, Vertex u);
DirectedTree subtree(const DirectedTree& tree, const VertexId& u);

/// Number of generations below u that are fully present: the distance to the
/// nearest truncated descendant, or empty if no descendant is truncated.
std::optional<int> complete_depth(const DirectedTree& tree, Vertex u);

/// Distance from u to v when v is in Des(u).
std::optional<int> depth_between(const DirectedTree& tree, Vertex u, Vertex v);

}  // namespace treeshift

#include "treeshift/tree.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "treeshift/error.hpp"

namespace treeshift {

std::string to_string(Family family) {
  switch (family) {
    case Family::explicit_tree: return "explicit";
    case Family::unilateral: return "unilateral";
    case Family::bilateral_window: return "bilateral-window";
    case Family::t_eta_kappa: return "t-eta-kappa";
  }
  return "explicit";
}

Family family_from_string(const std::string& text) {
  if (text == "explicit") return Family::explicit_tree;
  if (text == "unilateral") return Family::unilateral;
  if (text == "bilateral-window" || text == "bilateral") return Family::bilateral_window;
  if (text == "t-eta-kappa") return Family::t_eta_kappa;
  throw InputError("unknown tree family '" + text + "'");
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::empty: return "empty";
    case Violation::Kind::duplicate_vertex: return "duplicate-vertex";
    case Violation::Kind::unknown_vertex: return "unknown-vertex";
    case Violation::Kind::duplicate_edge: return "duplicate-edge";
    case Violation::Kind::multiple_parents: return "multiple-parents";
    case Violation::Kind::multiple_roots: return "more-than-one-root";
    case Violation::Kind::cycle: return "cycle";
    case Violation::Kind::disconnected: return "disconnected";
    case Violation::Kind::family_mismatch: return "family-mismatch";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  if (valid()) return "valid directed tree";
  std::ostringstream os;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) os << "; ";
    os << to_string(violations[k].kind) << ": " << violations[k].detail;
  }
  return os.str();
}

namespace {

std::string join_ids(const std::vector<VertexId>& ids) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += ", ";
    out += ids[k].to_string();
  }
  return out;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  std::size_t find(std::size_t x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { up[find(a)] = find(b); }
  std::vector<std::size_t> up;
};

// Roots, cycles and connectivity of a parent array.
void structural_violations(const std::vector<VertexId>& ids, const std::vector<Vertex>& parent,
                           std::vector<Violation>& out) {
  const std::size_t n = ids.size();
  if (n == 0) {
    out.push_back({Violation::Kind::empty, "tree has no vertices", {}});
    return;
  }
  std::vector<VertexId> roots;
  for (Vertex v = 0; v < n; ++v)
    if (parent[v] == kNoVertex) roots.push_back(ids[v]);
  if (roots.size() > 1)
    out.push_back({Violation::Kind::multiple_roots,
                   "parentless vertices " + join_ids(roots) + " (a directed tree has at most one root)",
                   roots});

  // Parent pointers form a functional graph; walk each chain once.
  enum : char { unseen, on_path, done };
  std::vector<char> state(n, unseen);
  for (Vertex start = 0; start < n; ++start) {
    if (state[start] != unseen) continue;
    std::vector<Vertex> path;
    Vertex v = start;
    while (v != kNoVertex && state[v] == unseen) {
      state[v] = on_path;
      path.push_back(v);
      v = parent[v];
    }
    if (v != kNoVertex && state[v] == on_path) {
      std::vector<VertexId> cycle;
      auto it = std::find(path.begin(), path.end(), v);
      for (; it != path.end(); ++it) cycle.push_back(ids[*it]);
      std::sort(cycle.begin(), cycle.end());
      out.push_back({Violation::Kind::cycle, "directed cycle through " + join_ids(cycle), cycle});
    }
    for (Vertex p : path) state[p] = done;
  }

  DisjointSets sets(n);
  for (Vertex v = 0; v < n; ++v)
    if (parent[v] != kNoVertex) sets.unite(v, parent[v]);
  std::set<std::size_t> components;
  for (Vertex v = 0; v < n; ++v) components.insert(sets.find(v));
  if (components.size() > 1)
    out.push_back({Violation::Kind::disconnected,
                   std::to_string(components.size()) + " connected components", {}});
}

std::vector<Vertex> parent_array(const std::vector<VertexId>& ids,
                                 const std::map<VertexId, Vertex>& index,
                                 const std::map<VertexId, VertexId>& parent) {
  std::vector<Vertex> out(ids.size(), kNoVertex);
  for (const auto& [child, par] : parent) {
    auto c = index.find(child);
    auto p = index.find(par);
    if (c == index.end() || p == index.end())
      throw InputError("parent map references unknown vertex " +
                       (c == index.end() ? child : par).to_string());
    out[c->second] = p->second;
  }
  return out;
}

}  // namespace

Vertex DirectedTree::index(const VertexId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError("unknown vertex " + id.to_string());
  return it->second;
}

bool DirectedTree::has_truncation() const {
  return std::find(truncated_.begin(), truncated_.end(), true) != truncated_.end();
}

std::optional<Vertex> DirectedTree::root() const {
  std::optional<Vertex> found;
  for (Vertex v = 0; v < size(); ++v) {
    if (parent_[v] != kNoVertex) continue;
    if (found) return std::nullopt;
    found = v;
  }
  return found;
}

int DirectedTree::horizon() const {
  if (family_.family != Family::explicit_tree) return family_.depth;
  int height = 0;
  for (Vertex v = 0; v < size(); ++v) {
    int level = 0;
    for (Vertex p = parent_[v]; p != kNoVertex && level <= static_cast<int>(size()); p = parent_[p])
      ++level;
    height = std::max(height, level);
  }
  return height;
}

bool DirectedTree::leafless() const {
  if (family_.family != Family::explicit_tree) return true;
  if (leafless_hint_) return *leafless_hint_;
  for (Vertex v = 0; v < size(); ++v)
    if (children_[v].empty() && !truncated_[v]) return false;
  return true;
}

bool DirectedTree::rootless() const { return rootless_; }

bool DirectedTree::has_parent_in_full_tree(Vertex v) const {
  return parent_.at(v) != kNoVertex || rootless_;
}

void DirectedTree::rebuild_index() {
  index_.clear();
  for (Vertex v = 0; v < ids_.size(); ++v) index_.emplace(ids_[v], v);
}

void DirectedTree::rebuild_children() {
  children_.assign(ids_.size(), {});
  for (Vertex v = 0; v < ids_.size(); ++v)
    if (parent_[v] != kNoVertex) children_[parent_[v]].push_back(v);
}

DirectedTree DirectedTree::from_parents(std::vector<VertexId> vertices,
                                        const std::map<VertexId, VertexId>& parent,
                                        const std::vector<VertexId>& truncated) {
  DirectedTree tree;
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  tree.ids_ = std::move(vertices);
  tree.rebuild_index();
  tree.parent_ = parent_array(tree.ids_, tree.index_, parent);
  tree.rebuild_children();
  tree.truncated_.assign(tree.ids_.size(), false);
  for (const auto& t : truncated) tree.truncated_[tree.index(t)] = true;
  return tree;
}

DirectedTree DirectedTree::from_edges(std::vector<VertexId> vertices, const std::vector<Edge>& edges,
                                      const std::vector<VertexId>& truncated) {
  ValidationReport report = validate_edges(vertices, edges);
  if (!report.valid()) throw InputError("invalid tree: " + report.summary());
  std::map<VertexId, VertexId> parent;
  for (const auto& [p, c] : edges) parent.emplace(c, p);
  return from_parents(std::move(vertices), parent, truncated);
}

DirectedTree DirectedTree::make_family(const FamilyParams& params) {
  if (params.depth < 1) throw InputError("family depth horizon must be at least 1");
  std::vector<VertexId> ids;
  std::map<VertexId, VertexId> parent;
  std::vector<VertexId> truncated;
  bool rootless = false;
  switch (params.family) {
    case Family::explicit_tree:
      throw InputError("make_family needs a generated family tag");
    case Family::unilateral:
      for (int n = 0; n <= params.depth; ++n) {
        ids.emplace_back(n);
        if (n > 0) parent.emplace(VertexId(n), VertexId(n - 1));
      }
      truncated.emplace_back(params.depth);
      break;
    case Family::bilateral_window: {
      const int back = params.back.value_or(params.depth);
      if (back < 0) throw InputError("bilateral window needs a nonnegative backward length");
      for (int n = -back; n <= params.depth; ++n) {
        ids.emplace_back(n);
        if (n > -back) parent.emplace(VertexId(n), VertexId(n - 1));
      }
      truncated.emplace_back(params.depth);
      rootless = true;
      break;
    }
    case Family::t_eta_kappa: {
      if (params.eta < 2) throw InputError("T(eta, kappa) requires eta >= 2");
      if (params.kappa && *params.kappa < 0) throw InputError("T(eta, kappa) requires kappa >= 0");
      const int trunk = params.kappa ? *params.kappa : params.depth;
      rootless = !params.kappa;
      for (int k = trunk; k >= 1; --k) {
        ids.emplace_back(-k);
        if (k < trunk) parent.emplace(VertexId(-k), VertexId(-k - 1));
      }
      ids.emplace_back(0);
      if (trunk > 0) parent.emplace(VertexId(0), VertexId(-1));
      for (int i = 1; i <= params.eta; ++i) {
        for (int j = 1; j <= params.depth; ++j) {
          ids.emplace_back(i, j);
          parent.emplace(VertexId(i, j), j == 1 ? VertexId(0) : VertexId(i, j - 1));
        }
        truncated.emplace_back(i, params.depth);
      }
      break;
    }
  }
  DirectedTree tree = from_parents(std::move(ids), parent, truncated);
  tree.family_ = params;
  if (params.family != Family::t_eta_kappa) tree.family_.eta = 0;
  if (params.family != Family::t_eta_kappa) tree.family_.kappa.reset();
  tree.rootless_ = rootless;
  return tree;
}

DirectedTree DirectedTree::unilateral(int depth) {
  return make_family({Family::unilateral, 0, std::nullopt, depth});
}

DirectedTree DirectedTree::bilateral_window(int depth, std::optional<int> back) {
  return make_family({Family::bilateral_window, 0, std::nullopt, depth, back});
}

DirectedTree DirectedTree::t_eta_kappa(int eta, std::optional<int> kappa, int depth) {
  return make_family({Family::t_eta_kappa, eta, kappa, depth});
}

ValidationReport validate(const DirectedTree& tree) {
  ValidationReport report;
  std::vector<Vertex> parent(tree.size());
  for (Vertex v = 0; v < tree.size(); ++v) parent[v] = tree.parent(v);
  structural_violations(tree.vertices(), parent, report.violations);

  if (tree.family().family != Family::explicit_tree) {
    DirectedTree canonical = DirectedTree::make_family(tree.family());
    bool same = canonical.vertices() == tree.vertices();
    for (Vertex v = 0; same && v < tree.size(); ++v) same = canonical.parent(v) == tree.parent(v);
    if (!same)
      report.violations.push_back({Violation::Kind::family_mismatch,
                                   "vertex set differs from the canonical " +
                                       to_string(tree.family().family) + " truncation",
                                   {}});
  }
  return report;
}

ValidationReport validate_edges(const std::vector<VertexId>& vertices, const std::vector<Edge>& edges) {
  ValidationReport report;
  auto& out = report.violations;

  std::vector<VertexId> ids = vertices;
  std::sort(ids.begin(), ids.end());
  std::vector<VertexId> dups;
  for (std::size_t k = 1; k < ids.size(); ++k)
    if (ids[k] == ids[k - 1] && (dups.empty() || dups.back() != ids[k])) dups.push_back(ids[k]);
  if (!dups.empty())
    out.push_back({Violation::Kind::duplicate_vertex, "repeated vertices " + join_ids(dups), dups});
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::map<VertexId, Vertex> index;
  for (Vertex v = 0; v < ids.size(); ++v) index.emplace(ids[v], v);

  std::set<Edge> seen;
  std::map<VertexId, VertexId> parent;
  bool structural_ok = true;
  for (const auto& edge : edges) {
    const auto& [p, c] = edge;
    for (const VertexId* end : {&p, &c})
      if (!index.count(*end)) {
        out.push_back({Violation::Kind::unknown_vertex,
                       "edge endpoint " + end->to_string() + " is not a listed vertex", {*end}});
        structural_ok = false;
      }
    if (!seen.insert(edge).second) {
      out.push_back({Violation::Kind::duplicate_edge,
                     "edge " + p.to_string() + " -> " + c.to_string() + " listed twice", {p, c}});
      continue;
    }
    auto [it, inserted] = parent.emplace(c, p);
    if (!inserted) {
      out.push_back({Violation::Kind::multiple_parents,
                     c.to_string() + " has parents " + it->second.to_string() + " and " + p.to_string(),
                     {c}});
      structural_ok = false;
    }
  }
  if (!structural_ok) return report;

  std::vector<Vertex> parr = parent_array(ids, index, parent);
  structural_violations(ids, parr, out);
  return report;
}

std::vector<Vertex> children_n(const DirectedTree& tree, Vertex u, int n) {
  if (u >= tree.size()) throw InputError("unknown vertex index");
  if (n < 0) throw InputError("generation must be nonnegative");
  std::vector<Vertex> level{u};
  for (int k = 0; k < n && !level.empty(); ++k) {
    std::vector<Vertex> next;
    for (Vertex v : level) {
      auto ch = tree.children(v);
      next.insert(next.end(), ch.begin(), ch.end());
    }
    level = std::move(next);
  }
  std::sort(level.begin(), level.end());
  level.erase(std::unique(level.begin(), level.end()), level.end());
  return level;
}

std::vector<VertexId> children_n(const DirectedTree& tree, const VertexId& u, int n) {
  std::vector<VertexId> out;
  for (Vertex v : children_n(tree, tree.index(u), n)) out.push_back(tree.id(v));
  return out;
}

std::vector<Vertex> descendants(const DirectedTree& tree, Vertex u) {
  if (u >= tree.size()) throw InputError("unknown vertex index");
  std::vector<bool> seen(tree.size(), false);
  std::vector<Vertex> out{u};
  seen[u] = true;
  for (std::size_t k = 0; k < out.size(); ++k)
    for (Vertex c : tree.children(out[k]))
      if (!seen[c]) {
        seen[c] = true;
        out.push_back(c);
      }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> descendants(const DirectedTree& tree, const VertexId& u) {
  std::vector<VertexId> out;
  for (Vertex v : descendants(tree, tree.index(u))) out.push_back(tree.id(v));
  return out;
}

DirectedTree subtree(const DirectedTree& tree, Vertex u) {
  std::vector<Vertex> des = descendants(tree, u);
  std::vector<VertexId> ids;
  std::map<VertexId, VertexId> parent;
  std::vector<VertexId> truncated;
  for (Vertex v : des) {
    ids.push_back(tree.id(v));
    if (v != u && tree.parent(v) != kNoVertex) parent.emplace(tree.id(v), tree.id(tree.parent(v)));
    if (tree.is_truncated(v)) truncated.push_back(tree.id(v));
  }
  DirectedTree out = DirectedTree::from_parents(std::move(ids), parent, truncated);
  if (tree.family().family != Family::explicit_tree || tree.leafless_hint_)
    out.leafless_hint_ = tree.leafless();
  return out;
}

DirectedTree subtree(const DirectedTree& tree, const VertexId& u) { return subtree(tree, tree.index(u)); }

std::optional<int> complete_depth(const DirectedTree& tree, Vertex u) {
  std::vector<bool> seen(tree.size(), false);
  std::vector<Vertex> level{u};
  seen[u] = true;
  for (int d = 0; !level.empty(); ++d) {
    std::vector<Vertex> next;
    for (Vertex v : level) {
      if (tree.is_truncated(v)) return d;
      for (Vertex c : tree.children(v))
        if (!seen[c]) {
          seen[c] = true;
          next.push_back(c);
        }
    }
    level = std::move(next);
  }
  return std::nullopt;
}

std::optional<int> depth_between(const DirectedTree& tree, Vertex u, Vertex v) {
  int d = 0;
  for (Vertex w = v; w != kNoVertex && d <= static_cast<int>(tree.size()); w = tree.parent(w), ++d)
    if (w == u) return d;
  return std::nullopt;
}

}  // namespace treeshift

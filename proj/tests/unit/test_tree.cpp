#include <algorithm>
#include <set>

#include "doctest.h"
#include "generators.hpp"

using namespace treeshift;

namespace {

std::set<VertexId> as_set(const std::vector<VertexId>& v) { return {v.begin(), v.end()}; }

// par^n(w) by walking the parent map, the definition of Chi<n>.
std::set<Vertex> chi_by_parents(const DirectedTree& t, Vertex u, int n) {
  std::set<Vertex> out;
  for (Vertex w = 0; w < t.size(); ++w) {
    Vertex x = w;
    for (int k = 0; k < n && x != kNoVertex; ++k) x = t.parent(x);
    if (x == u) out.insert(w);
  }
  return out;
}

bool has_kind(const ValidationReport& r, Violation::Kind k) {
  return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST_CASE("vertex ids roundtrip through text") {
  for (VertexId id : {VertexId(0), VertexId(-3), VertexId(2, 5), VertexId(std::string("leaf"))})
    CHECK(VertexId::parse(id.to_string()) == id);
  CHECK(VertexId(-1) < VertexId(0));
  CHECK(VertexId(9) < VertexId(1, 1));
  CHECK(VertexId(1, 2) < VertexId(2, 1));
}

TEST_CASE("validate") {
  SUBCASE("path is valid") {
    DirectedTree t = DirectedTree::from_parents({0, 1, 2}, {{1, 0}, {2, 1}});
    CHECK(validate(t).valid());
  }
  SUBCASE("two-cycle") {
    DirectedTree t = DirectedTree::from_parents({0, 1}, {{0, 1}, {1, 0}});
    CHECK(has_kind(validate(t), Violation::Kind::cycle));
  }
  SUBCASE("two roots") {
    DirectedTree t = DirectedTree::from_parents({0, 1}, {});
    CHECK(has_kind(validate(t), Violation::Kind::multiple_roots));
  }
  SUBCASE("duplicate edge rejected") {
    ValidationReport r = validate_edges({0, 1}, {{0, 1}, {0, 1}});
    CHECK(has_kind(r, Violation::Kind::duplicate_edge));
    CHECK_THROWS_AS(DirectedTree::from_edges({0, 1}, {{0, 1}, {0, 1}}), InputError);
  }
  SUBCASE("two parents") {
    ValidationReport r = validate_edges({0, 1, 2}, {{0, 2}, {1, 2}});
    CHECK(has_kind(r, Violation::Kind::multiple_parents));
  }
  SUBCASE("edge order is irrelevant") {
    DirectedTree a = DirectedTree::from_edges({0, 1, 2}, {{0, 1}, {1, 2}});
    DirectedTree b = DirectedTree::from_edges({2, 1, 0}, {{1, 2}, {0, 1}});
    CHECK(a.vertices() == b.vertices());
    for (Vertex v = 0; v < a.size(); ++v) CHECK(a.parent(v) == b.parent(v));
  }
}

TEST_CASE("families") {
  DirectedTree t20 = DirectedTree::t_eta_kappa(2, 0, 3);
  CHECK(t20.size() == 7);
  CHECK(validate(t20).valid());
  CHECK(t20.leafless());

  DirectedTree u5 = DirectedTree::unilateral(5);
  CHECK(u5.size() == 6);
  CHECK(u5.root() == u5.index(0));
  CHECK(u5.is_truncated(u5.index(5)));

  DirectedTree t32 = DirectedTree::t_eta_kappa(3, 2, 1);
  CHECK(t32.root() == t32.index(-2));
  CHECK(t32.size() == 3 + 3);

  DirectedTree inf = DirectedTree::t_eta_kappa(2, std::nullopt, 4);
  CHECK(inf.rootless());
  CHECK(inf.contains(-4));
  CHECK_FALSE(inf.contains(-5));

  CHECK_THROWS_AS(DirectedTree::t_eta_kappa(1, 0, 3), InputError);
  CHECK_THROWS_AS(DirectedTree::unilateral(0), InputError);

  DirectedTree bw = DirectedTree::bilateral_window(3, 2);
  CHECK(bw.rootless());
  CHECK(bw.vertices().front() == VertexId(-2));
  CHECK(bw.vertices().back() == VertexId(3));
}

TEST_CASE("children_n and descendants") {
  DirectedTree t21 = DirectedTree::t_eta_kappa(2, 1, 4);
  CHECK(as_set(children_n(t21, VertexId(0), 1)) == std::set<VertexId>{VertexId(1, 1), VertexId(2, 1)});
  CHECK(children_n(t21, VertexId(-1), 0) == std::vector<VertexId>{VertexId(-1)});
  DirectedTree u = DirectedTree::unilateral(5);
  CHECK(children_n(u, VertexId(0), 3) == std::vector<VertexId>{VertexId(3)});

  CHECK(as_set(descendants(t21, VertexId(1, 1))) ==
        std::set<VertexId>{VertexId(1, 1), VertexId(1, 2), VertexId(1, 3), VertexId(1, 4)});
  CHECK(descendants(t21, *t21.root()).size() == t21.size());
  DirectedTree leafy = DirectedTree::from_edges({0, 1}, {{0, 1}});
  CHECK(descendants(leafy, VertexId(1)) == std::vector<VertexId>{VertexId(1)});
  CHECK_THROWS_AS(children_n(u, VertexId(99), 1), InputError);
}

TEST_CASE("subtree") {
  DirectedTree t21 = DirectedTree::t_eta_kappa(2, 1, 3);
  DirectedTree same = subtree(t21, *t21.root());
  CHECK(same.vertices() == t21.vertices());

  DirectedTree branch = subtree(t21, VertexId(1, 1));
  CHECK(validate(branch).valid());
  CHECK(branch.size() == 3);
  CHECK(branch.root() == branch.index(VertexId(1, 1)));
  CHECK(branch.leafless());

  DirectedTree bw = DirectedTree::bilateral_window(4, 4);
  DirectedTree half = subtree(bw, VertexId(0));
  CHECK(half.size() == 5);
  CHECK(half.vertices().front() == VertexId(0));
}

TEST_CASE("combinatorial identities on random trees") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    DirectedTree t = testing::random_tree(rng);
    REQUIRE(validate(t).valid());
    const int h = t.horizon();
    for (Vertex u = 0; u < t.size(); ++u) {
      for (int n = 0; n <= h; ++n) {
        auto chi = children_n(t, u, n);
        CHECK(std::set<Vertex>(chi.begin(), chi.end()) == chi_by_parents(t, u, n));
        for (int m = 0; m + n <= h; ++m) {
          std::set<Vertex> composed;
          for (Vertex w : chi)
            for (Vertex x : children_n(t, w, m)) CHECK(composed.insert(x).second);
          auto direct = children_n(t, u, m + n);
          CHECK(composed == std::set<Vertex>(direct.begin(), direct.end()));
        }
      }
      auto c = t.children(u);
      for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = a + 1; b < c.size(); ++b) {
          auto da = descendants(t, c[a]);
          auto db = descendants(t, c[b]);
          std::vector<Vertex> both;
          std::set_intersection(da.begin(), da.end(), db.begin(), db.end(), std::back_inserter(both));
          CHECK(both.empty());
        }
      DirectedTree s = subtree(t, u);
      CHECK(validate(s).valid());
      CHECK(s.root() == s.index(t.id(u)));
    }
    std::size_t covered = 0;
    for (int n = 0; n <= h; ++n) covered += children_n(t, *t.root(), n).size();
    CHECK(covered == t.size());
  }
}

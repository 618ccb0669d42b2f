#include <cmath>
#include <map>

#include "doctest.h"
#include "generators.hpp"

using namespace treeshift;

namespace {

// S^n e_u expanded by walking parent chains, independent of the library.
std::map<Vertex, Complex> brute_power(const WeightedShift& s, Vertex u, int n) {
  std::map<Vertex, Complex> out;
  const DirectedTree& t = s.tree();
  for (Vertex w = 0; w < t.size(); ++w) {
    Complex c = 1.0;
    Vertex x = w;
    for (int k = 0; k < n && x != kNoVertex; ++k) {
      c *= s.weight(x);
      x = t.parent(x);
    }
    if (x == u) out[w] = c;
  }
  return out;
}

Complex brute_inner(const WeightedShift& s, Vertex u, int m, Vertex v, int n) {
  auto a = brute_power(s, u, m);
  auto b = brute_power(s, v, n);
  Complex sum = 0.0;
  for (const auto& [w, c] : a)
    if (auto it = b.find(w); it != b.end()) sum += c * std::conj(it->second);
  return sum;
}

WeightedShift unilateral(std::vector<Complex> lambdas) {
  DirectedTree t = DirectedTree::unilateral(static_cast<int>(lambdas.size()));
  lambdas.insert(lambdas.begin(), Complex{});
  return WeightedShift(std::move(t), std::move(lambdas));
}

}  // namespace

TEST_CASE("weights") {
  DirectedTree t = DirectedTree::unilateral(2);
  CHECK_THROWS_AS(WeightedShift(t, {1.0, 1.0, 1.0}), InputError);
  CHECK_THROWS_AS(WeightedShift(t, {0.0, 1.0}), InputError);
  CHECK_FALSE(WeightedShift(t, {0.0, 1.0, 0.0}).nonzero_weights());
  CHECK(WeightedShift::from_map(t, {{1, 2.0}, {2, 3.0}}, true).weight(2) == Complex(3.0));
  CHECK_THROWS_AS(WeightedShift::from_map(t, {{1, 2.0}}, true), InputError);
}

TEST_CASE("lambda_path") {
  WeightedShift ones = unilateral(std::vector<Complex>(6, 1.0));
  CHECK(lambda_path(ones, 2, 2) == Complex(1.0));
  CHECK(lambda_path(ones, 0, 4) == Complex(1.0));
  std::vector<Complex> sq;
  for (int n = 1; n <= 6; ++n) sq.push_back(std::sqrt(static_cast<double>(n)));
  WeightedShift root_n = unilateral(sq);
  double factorial = 1.0;
  for (int n = 1; n <= 6; ++n) {
    factorial *= n;
    CHECK(std::abs(lambda_path(root_n, 0, static_cast<Vertex>(n)) - std::sqrt(factorial)) < 1e-12);
  }
  CHECK_THROWS_AS(lambda_path(root_n, 3, 1), DomainError);
}

TEST_CASE("power coefficients and norms on T(2,0)") {
  DirectedTree t = DirectedTree::t_eta_kappa(2, 0, 3);
  const Complex a(0.3, 0.4), b(0.6, 0.0), l12(2.0, 0.0), l22(0.0, 1.5);
  std::map<VertexId, Complex> w{{VertexId(1, 1), a}, {VertexId(2, 1), b}, {VertexId(1, 2), l12},
                                {VertexId(2, 2), l22}, {VertexId(1, 3), 1.0}, {VertexId(2, 3), 1.0}};
  WeightedShift s = WeightedShift::from_map(t, w);
  Vertex o = t.index(0);
  CoefficientMap c0 = power_coefficients(s, o, 0);
  REQUIRE(c0.terms.size() == 1);
  CHECK(c0.terms[0].second == Complex(1.0));
  CoefficientMap c1 = power_coefficients(s, o, 1);
  REQUIRE(c1.terms.size() == 2);
  CHECK(c1.terms[0] == std::pair<Vertex, Complex>{t.index(VertexId(1, 1)), a});
  CHECK(c1.terms[1] == std::pair<Vertex, Complex>{t.index(VertexId(2, 1)), b});
  CoefficientMap c2 = power_coefficients(s, o, 2);
  CHECK(std::abs(c2.terms[0].second - a * l12) < 1e-15);
  CHECK(std::abs(c2.terms[1].second - b * l22) < 1e-15);
  CHECK(power_norm_sq(s, o, 0) == 1.0);

  WeightedShift half = WeightedShift::from_map(
      t, {{VertexId(1, 1), std::sqrt(0.5)}, {VertexId(2, 1), std::sqrt(0.5)}});
  CHECK(power_norm_sq(half, o, 1) == doctest::Approx(1.0));

  DirectedTree leafy = DirectedTree::from_edges({0, 1}, {{0, 1}});
  CHECK(power_norm_sq(WeightedShift(leafy, {0.0, 2.0}), 1, 1) == 0.0);
}

TEST_CASE("inner products of powers") {
  const Complex l1(0.7, -0.2), l2(1.1, 0.5), l3(0.9, 0.0);
  WeightedShift s = unilateral({l1, l2, l3});
  // <S^2 e_0, S e_1> = (l1 l2) conj(l2): both vectors sit on e_2.
  Complex expected = l1 * std::norm(l2);
  CHECK(std::abs(inner_product_powers(s, 0, 2, 1, 1) - expected) < 1e-15);
  CHECK(std::abs(inner_product_powers(s, 1, 1, 0, 2) - std::conj(expected)) < 1e-15);
  CHECK(std::abs(inner_product_powers(s, 0, 2, 0, 2) - power_norm_sq(s, 0, 2)) < 1e-15);
  CHECK(inner_product_powers(s, 0, 1, 0, 2) == Complex{});

  DirectedTree t = DirectedTree::t_eta_kappa(2, 0, 3);
  testing::Rng rng(3);
  WeightedShift b(t, testing::random_weights(rng, t));
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n)
      CHECK(inner_product_powers(b, t.index(VertexId(1, 1)), m, t.index(VertexId(2, 1)), n) == Complex{});
}

TEST_CASE("adjoint") {
  WeightedShift s = unilateral({1.0, 1.0, Complex(0, 2)});
  CHECK_FALSE(adjoint_basis(s, 0).has_value());
  auto img = adjoint_basis(s, 3);
  REQUIRE(img);
  CHECK(img->target == 2);
  CHECK(img->coefficient == Complex(0, -2));
  CHECK(adjoint_basis(unilateral({1.0, 1.0}), 2)->coefficient == Complex(1.0));
}

TEST_CASE("bound_alpha") {
  CHECK(bound_alpha(unilateral(std::vector<Complex>(5, 1.0))).value == doctest::Approx(1.0));
  std::vector<Complex> sq;
  for (int n = 1; n <= 10; ++n) sq.push_back(std::sqrt(static_cast<double>(n)));
  AlphaBound a = bound_alpha(unilateral(sq));
  CHECK(a.value == doctest::Approx(10.0));
  CHECK(a.grows_with_horizon);
  CHECK(a.lower_bound_only);

  DirectedTree t = DirectedTree::t_eta_kappa(2, 0, 3);
  const double r = std::sqrt(0.5);
  WeightedShift h = WeightedShift::from_map(t, {{VertexId(1, 1), 1.0}, {VertexId(2, 1), 1.0}, {VertexId(1, 2), r},
                                                {VertexId(2, 2), r}, {VertexId(1, 3), r}, {VertexId(2, 3), r}});
  CHECK(bound_alpha(h).value == doctest::Approx(2.0));
}

TEST_CASE("structural checks") {
  DirectedTree t = DirectedTree::t_eta_kappa(2, 0, 3);
  testing::Rng rng(5);
  StructuralReport r = structural_checks(WeightedShift(t, testing::random_weights(rng, t)));
  CHECK(r.leafless);
  CHECK(r.injective);
  CHECK_FALSE(r.hyponormality_obstruction);

  DirectedTree leafy = DirectedTree::from_edges({0, 1, 2}, {{0, 1}, {0, 2}});
  StructuralReport l = structural_checks(WeightedShift(leafy, {0.0, 1.0, 1.0}));
  CHECK_FALSE(l.leafless);
  CHECK(l.hyponormality_obstruction);

  StructuralReport k = structural_checks(WeightedShift(t, [&] {
    auto w = testing::random_weights(rng, t);
    w[t.index(VertexId(1, 1))] = 0.0;
    w[t.index(VertexId(2, 1))] = 0.0;
    return w;
  }()));
  CHECK_FALSE(k.injective);
  CHECK(k.kernel_vertices == std::vector<Vertex>{t.index(0)});
}

TEST_CASE("identities on random weight systems") {
  testing::Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    DirectedTree t = testing::random_tree(rng);
    WeightedShift s(t, testing::random_weights(rng, t));
    const int h = t.horizon();
    for (Vertex u = 0; u < t.size(); ++u) {
      for (int n = 0; n <= h; ++n) {
        auto brute = brute_power(s, u, n);
        CoefficientMap c = power_coefficients(s, u, n);
        REQUIRE(c.terms.size() == brute.size());
        for (const auto& [v, z] : c.terms) CHECK(std::abs(z - brute[v]) <= 1e-12 * std::max(1.0, std::abs(z)));
        for (const auto& [v, z] : c.terms)
          for (Vertex w : t.children(v))
            CHECK(std::abs(lambda_path(s, u, w) - z * s.weight(w)) <= 1e-12 * std::max(1.0, std::abs(z)));
        if (n + 1 <= h) {
          double via_children = 0.0;
          for (Vertex v : t.children(u)) via_children += s.weight_sq(v) * power_norm_sq(s, v, n);
          CHECK(power_norm_sq(s, u, n + 1) == doctest::Approx(via_children).epsilon(1e-12));
        }
      }
    }
    std::uniform_int_distribution<Vertex> pick(0, t.size() - 1);
    std::uniform_int_distribution<int> power(0, h);
    for (int k = 0; k < 20; ++k) {
      Vertex u = pick(rng), v = pick(rng);
      int m = power(rng), n = power(rng);
      Complex closed = inner_product_powers(s, u, m, v, n);
      Complex brute = brute_inner(s, u, m, v, n);
      CHECK(std::abs(closed - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
      CHECK(std::abs(closed - std::conj(inner_product_powers(s, v, n, u, m))) <= 1e-12 * std::max(1.0, std::abs(closed)));
    }
  }
}

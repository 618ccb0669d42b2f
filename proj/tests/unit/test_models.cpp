#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "generators.hpp"

using namespace treeshift;

namespace {

bool has_tag(const std::vector<Finding>& f, const std::string& tag) {
  return std::any_of(f.begin(), f.end(), [&](const Finding& x) { return x.tag == tag; });
}

// eta = 2 with branches delta_1 and delta_2; c1, c2 are |lambda_{i,1}|^2.
BranchData two_diracs(double c1, double c2, std::optional<int> kappa = 0) {
  BranchData d;
  d.eta = 2;
  d.kappa = kappa;
  d.branch_measures = {AtomicMeasure::dirac(1.0), AtomicMeasure::dirac(2.0)};
  d.entry_weights = {std::sqrt(c1), std::sqrt(c2)};
  d.branch_weights = {std::vector<Complex>(15, 1.0), std::vector<Complex>(15, std::sqrt(2.0))};
  return d;
}

// S(k) = c1 + c2 2^{-k} for two_diracs.
double S(double c1, double c2, int k) { return c1 + c2 * std::pow(2.0, -k); }

}  // namespace

TEST_CASE("unilateral") {
  ModelCertificate ones = certify_unilateral(std::vector<Complex>(12, 1.0));
  CHECK(ones.status == CertificateStatus::certified);
  REQUIRE(ones.system);
  CHECK(compare_measures(ones.system->mu[0], AtomicMeasure::dirac(1.0)).mass <= 1e-12);

  std::vector<Complex> root_n;
  for (int n = 1; n <= 10; ++n) root_n.push_back(std::sqrt(static_cast<double>(n)));
  ModelCertificate r = certify_unilateral(root_n);
  CHECK(r.verdicts.front().consistent());
  CHECK(r.verdicts.front().order == 10);
  CHECK(r.status == CertificateStatus::certified);
  REQUIRE(r.cross_check);
  CHECK(r.cross_check->passes());

  // Products {1, 1, 0.5}: det [[1, 1], [1, 0.5]] < 0.
  ModelCertificate bad = certify_unilateral({1.0, std::sqrt(0.5)});
  CHECK(bad.status == CertificateStatus::refuted);
  REQUIRE(bad.witnesses.size() == 1);
  CHECK(bad.witnesses[0].tag == "stieltjes");

  ModelCertificate two = certify_unilateral(std::vector<Complex>(8, std::sqrt(2.0)));
  CHECK(two.status == CertificateStatus::certified);
  CHECK(compare_measures(two.system->mu[0], AtomicMeasure::dirac(2.0)).mass <= 1e-12);

  // e_0 in the kernel, isometric above: subnormal. A zero weight after a
  // nonzero one gives a nilpotent block: refuted.
  ModelCertificate kernel = certify_unilateral({0.0, 1.0, 1.0, 1.0});
  CHECK(kernel.status != CertificateStatus::refuted);
  CHECK(certify_unilateral({1.0, 0.0, 1.0}).status == CertificateStatus::refuted);
  CHECK_THROWS_AS(certify_unilateral({}), InputError);
}

TEST_CASE("unilateral agrees with the general certifier") {
  testing::Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    AtomicMeasure mu = testing::random_measure(rng, 1 + trial % 4, 0.2, 5.0);
    std::vector<Complex> w;
    for (int n = 1; n <= 10; ++n) w.push_back(std::sqrt(mu.moment(n) / mu.moment(n - 1)));
    if (trial % 3 == 0) w[3] *= 1.4;
    ModelCertificate m = certify_unilateral(w);

    DirectedTree t = DirectedTree::unilateral(static_cast<int>(w.size()) - 1);
    std::vector<Complex> lw(t.size());
    for (Vertex v = 1; v < t.size(); ++v) lw[v] = w[v - 1];
    WeightedShift s(t, lw);
    bool all_stieltjes = true;
    for (Vertex u = 0; u < t.size(); ++u) {
      MomentSequence seq{{1.0}, MomentOrigin::weights};
      for (std::size_t n = u; n < w.size(); ++n) seq.values.push_back(seq.values.back() * std::norm(w[n]));
      all_stieltjes = all_stieltjes && check_stieltjes(seq).consistent();
    }
    CHECK((m.status == CertificateStatus::refuted) == !all_stieltjes);
  }
}

TEST_CASE("two-sided sequence") {
  std::vector<Complex> w(6, 1.0);
  w[0] = std::sqrt(2.0);  // enters vertex -1 when back = 2
  TwoSidedSequence ts = two_sided_sequence(w, 2);
  CHECK(ts.forward() == 4);
  CHECK(ts.at(0) == 1.0);
  CHECK(ts.at(-1) == 1.0);
  CHECK(ts.at(-2) == doctest::Approx(0.5));
  CHECK(ts.at(4) == 1.0);
}

TEST_CASE("bilateral") {
  ModelCertificate ones = certify_bilateral(std::vector<Complex>(16, 1.0), 8);
  CHECK(ones.status == CertificateStatus::certified);
  CHECK(ones.verdicts.size() == 9);

  ModelCertificate two = certify_bilateral(std::vector<Complex>(16, std::sqrt(2.0)), 8);
  CHECK(two.status == CertificateStatus::certified);
  REQUIRE(two.system);
  for (const AtomicMeasure& m : two.system->mu) CHECK(compare_measures(m, AtomicMeasure::dirac(2.0)).mass <= 1e-12);
  for (const StieltjesVerdict& v : two.verdicts) CHECK(v.consistent());

  std::vector<Complex> planted(16, 1.0);
  planted[8 - 2] = std::sqrt(2.0);  // lambda_{-1}
  ModelCertificate bad = certify_bilateral(planted, 8);
  CHECK(bad.status == CertificateStatus::refuted);
  CHECK(bad.quantity("first_failing_k") == 2.0);
  REQUIRE(bad.witnesses.size() == 1);
  CHECK(bad.witnesses[0].tag == "two-sided-stieltjes");
  CHECK(bad.witnesses[0].id == VertexId(-2));

  std::vector<Complex> z(16, 1.0);
  z[3] = 0.0;
  CHECK_THROWS_AS(certify_bilateral(z, 8), InputError);
}

TEST_CASE("bilateral: a pass at the window root extends to every shift") {
  testing::Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    AtomicMeasure mu = testing::random_measure(rng, 1 + trial % 3, 0.3, 4.0);
    const int back = 4;
    std::vector<Complex> w;
    for (int v = -back + 1; v <= 6; ++v) w.push_back(std::sqrt(mu.moment(v + back) / mu.moment(v + back - 1)));
    ModelCertificate c = certify_bilateral(w, back);
    CHECK(c.status == CertificateStatus::certified);
    REQUIRE(c.system);
    // mu_{-k} from the window root by forward maps equals s^{K-k} mu normalized.
    for (int k = 0; k <= back; ++k) {
      Vertex v = c.shift->tree().index(VertexId(-k));
      AtomicMeasure direct = mu.power_weighted(back - k);
      // Quadrature positions of near-colliding atoms are ill-conditioned, so
      // compare integrals rather than atoms.
      for (int n = 0; n <= 6; ++n)
        CHECK(c.system->mu[v].moment(n) == doctest::Approx(direct.moment(n) / direct.total_mass()).epsilon(1e-9));
    }
  }
}

TEST_CASE("branch sums") {
  BranchData d = two_diracs(0.5, 0.5);
  CHECK(branch_sum(d, 1).value() == doctest::Approx(0.75));
  d.trunk_weights = {2.0, 3.0};
  CHECK(trunk_product(d, 2) == doctest::Approx(36.0));
  CHECK_THROWS_AS(trunk_product(d, 3), InputError);
  BranchData z = d;
  z.branch_measures[0] = AtomicMeasure::dirac(0.0);
  CHECK(branch_sum(z, 1).is_infinite());
}

TEST_CASE("T(2,0) worked example") {
  ModelCertificate c = certify_t_eta_kappa(two_diracs(0.5, 0.5), 8);
  CHECK(c.status == CertificateStatus::certified);
  REQUIRE(c.quantity("eps_0"));
  CHECK(std::abs(*c.quantity("eps_0") - 0.25) <= 1e-12);
  CHECK(std::abs(*c.quantity("eps_root") - 0.25) <= 1e-12);
  REQUIRE(c.system);
  CHECK(c.system->eps[c.shift->tree().index(0)] == doctest::Approx(0.25));

  ModelCertificate heavy = certify_t_eta_kappa(two_diracs(1.0, 1.0), 8);
  CHECK(heavy.status == CertificateStatus::refuted);
  CHECK(*heavy.quantity("branch_sum_1") == doctest::Approx(1.5));
  REQUIRE_FALSE(heavy.witnesses.empty());
  CHECK(heavy.witnesses[0].vertex == heavy.shift->tree().index(0));

  BranchData wrong = two_diracs(0.5, 0.5);
  wrong.branch_weights[1][2] = 1.0;
  CHECK_THROWS_WITH_AS(certify_t_eta_kappa(wrong), doctest::Contains("do not represent"), InputError);
  BranchData improper = two_diracs(0.5, 0.5);
  improper.branch_measures[0] = AtomicMeasure::dirac(1.0, 0.5);
  CHECK_THROWS_AS(certify_t_eta_kappa(improper), InputError);
}

TEST_CASE("T(2,0) from branch weights alone") {
  BranchData d = two_diracs(0.5, 0.5);
  d.branch_measures.clear();
  ModelCertificate c = certify_t_eta_kappa(d, 8);
  CHECK(c.status == CertificateStatus::conditional);
  CHECK(std::abs(*c.quantity("eps_0") - 0.25) <= 1e-9);

  BranchData heavy = two_diracs(1.0, 1.0);
  heavy.branch_measures.clear();
  CHECK(certify_t_eta_kappa(heavy, 8).status == CertificateStatus::conditional);

  BranchData refuted = two_diracs(0.5, 0.5);
  refuted.branch_measures.clear();
  refuted.branch_weights[0] = {1.0, std::sqrt(0.5), 1.0};
  ModelCertificate r = certify_t_eta_kappa(refuted, 8);
  CHECK(r.status == CertificateStatus::refuted);
  CHECK(r.witnesses[0].id == VertexId(1, 1));
}

TEST_CASE("T(2,1) and T(2,2)") {
  const double c = 2.0 / 3.0;  // S(1) = c + c/2 = 1
  BranchData k1 = two_diracs(c, c, 1);
  k1.trunk_weights = {1.0};
  ModelCertificate a = certify_t_eta_kappa(k1, 8);
  CHECK(a.status == CertificateStatus::certified);
  CHECK(*a.quantity("eps_root") == doctest::Approx(1.0 - S(c, c, 2)));
  // Nonzero weights: eps vanishes off the root.
  for (Vertex v = 0; v < a.shift->tree().size(); ++v)
    if (v != a.shift->tree().index(-1)) CHECK(a.system->eps[v] == 0.0);

  k1.trunk_weights = {std::sqrt(1.01 / S(c, c, 2))};
  ModelCertificate over = certify_t_eta_kappa(k1, 8);
  CHECK(over.status == CertificateStatus::refuted);
  CHECK(has_tag(over.witnesses, "root-mass-bound"));

  BranchData k2 = two_diracs(c, c, 2);
  k2.trunk_weights = {std::sqrt(1.0 / S(c, c, 2)), 1.0};
  ModelCertificate b = certify_t_eta_kappa(k2, 8);
  CHECK(b.status == CertificateStatus::certified);
  CHECK(*b.quantity("trunk_identity_1") == doctest::Approx(1.0));

  k2.trunk_weights[0] *= 1.1;
  ModelCertificate off = certify_t_eta_kappa(k2, 8);
  CHECK(off.status == CertificateStatus::refuted);
  REQUIRE(has_tag(off.witnesses, "trunk-identity"));
  CHECK(off.witnesses[0].id == VertexId(-1));

  BranchData not_one = two_diracs(0.5, 0.5, 1);
  not_one.trunk_weights = {1.0};
  CHECK(certify_t_eta_kappa(not_one, 8).status == CertificateStatus::refuted);
}

TEST_CASE("T(2,1) with a root measure") {
  const double c = 2.0 / 3.0;
  BranchData d = two_diracs(c, c, 1);
  d.trunk_weights = {1.0};
  std::optional<AtomicMeasure> nu = canonical_root_measure(d);
  REQUIRE(nu);
  // nu = |lambda_0|^2 sum c_i s^{-2} mu_i + deficit delta_0.
  CHECK(nu->moment(1) == doctest::Approx(1.0));
  d.nu = nu;
  ModelCertificate m = certify_t_eta_kappa(d, 8);
  CHECK(m.status == CertificateStatus::certified);
  d.nu = AtomicMeasure({{0.0, 0.5}, {2.0, 0.5}});
  CHECK(certify_t_eta_kappa(d, 8).status == CertificateStatus::refuted);
}

TEST_CASE("T(2,inf)") {
  const double c = 2.0 / 3.0;
  BranchData d = two_diracs(c, c, std::nullopt);
  for (int l = 0; l < 8; ++l) d.trunk_weights.push_back(std::sqrt(S(c, c, l + 1) / S(c, c, l + 2)));
  ModelCertificate m = certify_t_eta_kappa(d, 8);
  CHECK(m.status == CertificateStatus::certified);
  CHECK(std::any_of(m.notes.begin(), m.notes.end(),
                    [](const std::string& n) { return n.find("up to window") != std::string::npos; }));
  d.trunk_weights[5] *= 1.2;
  CHECK(certify_t_eta_kappa(d, 8).status == CertificateStatus::refuted);
}

TEST_CASE("integral and root-measure conditions agree") {
  testing::Rng rng(61);
  int disagreements = 0, passes = 0;
  for (int trial = 0; trial < 100; ++trial) {
    BranchData d = testing::random_branch_data(rng, 2 + trial % 2, 1 + (trial / 2) % 2, trial % 4 == 3);
    EquivalenceReport r = ibj_equivalence_check(d);
    disagreements += r.agree ? 0 : 1;
    passes += r.integral_condition ? 1 : 0;
    CHECK(r.agree);
    if (r.integral_condition) {
      d.nu = canonical_root_measure(d);
      EquivalenceReport back = ibj_equivalence_check(d);
      CHECK(back.supplied_nu_condition == true);
      CHECK(back.reverse_agrees == true);
    }
  }
  CHECK(disagreements == 0);
  CHECK(passes > 20);
  CHECK(passes < 90);
}

TEST_CASE("ibj examples") {
  const double c = 2.0 / 3.0;
  BranchData d = two_diracs(c, c, 1);
  d.trunk_weights = {1.0};
  EquivalenceReport ok = ibj_equivalence_check(d);
  CHECK(ok.integral_condition);
  CHECK(ok.root_measure_condition);
  d.trunk_weights = {2.0};
  EquivalenceReport bad = ibj_equivalence_check(d);
  CHECK_FALSE(bad.integral_condition);
  CHECK_FALSE(bad.root_measure_condition);
  CHECK(bad.agree);
}

TEST_CASE("determinacy route") {
  BranchData d = two_diracs(0.5, 0.5);
  WeightedShift s = branch_shift(d, 10);
  const DirectedTree& t = s.tree();
  std::map<Vertex, MomentSequence> seqs;
  for (VertexId id : {VertexId(0), VertexId(1, 1), VertexId(2, 1)}) {
    Vertex v = t.index(id);
    seqs[v] = vertex_moment_sequence(s, v, *complete_depth(t, v));
  }
  DeterExtraction x = deter_extract(s, seqs);
  CHECK(compare_measures(x.data.branch_measures[0], AtomicMeasure::dirac(1.0)).mass <= 1e-9);
  CHECK(compare_measures(x.data.branch_measures[1], AtomicMeasure::dirac(2.0)).mass <= 1e-9);
  CHECK(x.conclusion.status == CertificateStatus::conditional);
  CHECK(*x.conclusion.quantity("eps_0") == doctest::Approx(0.25));

  BranchData flat = two_diracs(0.5, 0.5);
  flat.branch_measures = {AtomicMeasure::dirac(1.0), AtomicMeasure::dirac(1.0)};
  flat.branch_weights = {std::vector<Complex>(15, 1.0), std::vector<Complex>(15, 1.0)};
  WeightedShift fs = branch_shift(flat, 12);
  std::map<Vertex, MomentSequence> fseq;
  for (VertexId id : {VertexId(0), VertexId(1, 1), VertexId(2, 1)}) {
    Vertex v = fs.tree().index(id);
    fseq[v] = vertex_moment_sequence(fs, v, *complete_depth(fs.tree(), v));
  }
  DeterExtraction f = deter_extract(fs, fseq);
  CHECK(f.quasi_analytic_sums.back() == doctest::Approx(12.0));
  CHECK(f.shifted_root_diagnostic.trend == DeterminacyTrend::divergence);

  // ||S^n e_(i,1)||^2 = (2n)!^2: the Carleman series converges.
  BranchData fast = two_diracs(0.5, 0.5);
  fast.branch_measures.clear();
  std::vector<Complex> grow;
  for (int n = 1; n < 12; ++n) grow.push_back(2.0 * n * (2.0 * n - 1.0));
  fast.branch_weights = {grow, grow};
  WeightedShift gs = branch_shift(fast, 12);
  std::map<Vertex, MomentSequence> gseq;
  for (VertexId id : {VertexId(0), VertexId(1, 1), VertexId(2, 1)}) {
    Vertex v = gs.tree().index(id);
    gseq[v] = vertex_moment_sequence(gs, v, *complete_depth(gs.tree(), v));
  }
  DeterExtraction g = deter_extract(gs, gseq);
  CHECK(g.shifted_root_diagnostic.trend == DeterminacyTrend::convergence);
  CHECK(g.conclusion.status == CertificateStatus::conditional);

  seqs.erase(t.index(VertexId(2, 1)));
  CHECK_THROWS_AS(deter_extract(s, seqs), InputError);
  CHECK_THROWS_AS(deter_extract(WeightedShift(DirectedTree::unilateral(3), std::vector<Complex>(4, 0.0)), {}),
                  InputError);
}

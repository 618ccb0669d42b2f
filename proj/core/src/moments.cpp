#include "treeshift/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "treeshift/error.hpp"

namespace treeshift {

namespace {

void require_finite(const MomentSequence& seq) {
  if (seq.values.empty()) throw InputError("moment sequence is empty");
  for (double t : seq.values)
    if (!std::isfinite(t)) throw InputError("moment sequence has a non-finite entry");
}

HankelBlock analyse_block(const std::vector<double>& t, std::size_t offset, std::size_t size, double tol) {
  HankelBlock block;
  block.size = size;
  if (size == 0) return block;
  Eigen::MatrixXd h(size, size);
  for (std::size_t k = 0; k < size; ++k)
    for (std::size_t l = 0; l < size; ++l) h(k, l) = t[k + l + offset];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw DomainError("Hankel eigen-decomposition failed");
  const auto& ev = solver.eigenvalues();
  block.min_eigenvalue = ev(0);
  block.spectral_norm = std::max(std::abs(ev(0)), std::abs(ev(size - 1)));
  block.min_eigenvector.resize(size);
  for (std::size_t k = 0; k < size; ++k) block.min_eigenvector[k] = solver.eigenvectors()(k, 0);
  block.passes = block.min_eigenvalue >= -tol * std::max(1.0, block.spectral_norm);
  return block;
}

}  // namespace

std::string to_string(MomentOrigin origin) {
  switch (origin) {
    case MomentOrigin::user: return "user";
    case MomentOrigin::measure: return "measure";
    case MomentOrigin::weights: return "weights";
  }
  return "user";
}

std::string to_string(StieltjesStatus status) {
  return status == StieltjesStatus::consistent ? "consistent-up-to-order" : "refuted";
}

std::string to_string(DeterminacyTrend trend) {
  switch (trend) {
    case DeterminacyTrend::divergence: return "divergence-trend";
    case DeterminacyTrend::convergence: return "convergence-trend";
    case DeterminacyTrend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

MomentSequence moments_of(const AtomicMeasure& mu, int n_max) {
  if (n_max < 0) throw InputError("n_max must be nonnegative");
  MomentSequence seq;
  seq.origin = MomentOrigin::measure;
  seq.values.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) seq.values.push_back(mu.moment(n));
  return seq;
}

double hankel_form(const std::vector<double>& t, std::size_t offset, const std::vector<double>& a) {
  long double sum = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t l = 0; l < a.size(); ++l)
      sum += static_cast<long double>(t.at(k + l + offset)) * a[k] * a[l];
  return static_cast<double>(sum);
}

StieltjesVerdict check_stieltjes(const MomentSequence& seq, double tol) {
  require_finite(seq);
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  StieltjesVerdict verdict;
  verdict.order = seq.order();
  verdict.tolerance = tol;
  const auto& t = seq.values;
  if (t[0] < 0.0) {
    verdict.status = StieltjesStatus::refuted;
    verdict.hankel.size = 1;
    verdict.hankel.min_eigenvalue = t[0];
    verdict.hankel.spectral_norm = -t[0];
    verdict.hankel.min_eigenvector = {1.0};
    verdict.hankel.passes = false;
    verdict.witness = StieltjesWitness{"hankel", {1.0}, t[0]};
    return verdict;
  }
  const std::size_t n = seq.order();
  verdict.hankel = analyse_block(t, 0, n / 2 + 1, tol);
  if (n >= 1) verdict.shifted = analyse_block(t, 1, (n - 1) / 2 + 1, tol);
  auto refute = [&](const HankelBlock& block, const char* name, std::size_t offset) {
    verdict.status = StieltjesStatus::refuted;
    verdict.witness = StieltjesWitness{name, block.min_eigenvector, hankel_form(t, offset, block.min_eigenvector)};
  };
  if (!verdict.hankel.passes)
    refute(verdict.hankel, "hankel", 0);
  else if (!verdict.shifted.passes)
    refute(verdict.shifted, "shifted-hankel", 1);
  return verdict;
}

ExtendedReal integral_inv_s(const AtomicMeasure& mu, int k) {
  if (k < 1) throw InputError("inverse power must be at least 1");
  return mu.inverse_moment(k);
}

AtomicMeasure backward_extend(const AtomicMeasure& mu, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InputError("theta must be positive and finite");
  ExtendedReal inv = integral_inv_s(mu, 1);
  if (inv.is_infinite()) throw DomainError("no backward extension: the measure has an atom at 0");
  double deficit = theta - inv.value();
  // Round-off in the 1/s sum is of order eps * theta; anything beyond that is a
  // genuine failure of int 1/s dmu <= theta.
  double slack = 16.0 * std::numeric_limits<double>::epsilon() * std::max(theta, inv.value());
  if (deficit < -slack) throw DomainError("no backward extension: integral of 1/s exceeds theta");
  AtomicMeasure nu = mu.power_weighted(-1);
  if (deficit > slack) nu = nu + AtomicMeasure::dirac(0.0, deficit);
  return nu;
}

AtomicMeasure forward_map(const AtomicMeasure& nu) { return nu.power_weighted(1); }

CarlemanDiagnostic carleman_diagnostic(const MomentSequence& seq) {
  require_finite(seq);
  for (double t : seq.values)
    if (t < 0.0) throw InputError("Carleman diagnostic needs nonnegative moments");
  CarlemanDiagnostic out;
  const std::size_t n_max = seq.order();
  double sum = 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t n = 1; n <= n_max; ++n) {
    double t = seq.values[n];
    if (t == 0.0) {
      out.infinite_term = true;
      sum = std::numeric_limits<double>::infinity();
    } else {
      double root = std::exp(std::log(t) / (2.0 * static_cast<double>(n)));
      sum += 1.0 / root;
      if (2 * n >= n_max) {
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(root));
      }
    }
    out.partial_sums.push_back(sum);
  }
  if (out.infinite_term) {
    out.trend = DeterminacyTrend::divergence;
    return out;
  }
  if (xs.size() >= 3) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      mx += xs[k];
      my += ys[k];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxy += (xs[k] - mx) * (ys[k] - my);
      sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    double slope = sxy / sxx;
    out.growth_exponent = slope;
    // Terms behave like n^{-slope}: slope <= 1 diverges, slope > 1 converges.
    if (slope <= 1.25)
      out.trend = DeterminacyTrend::divergence;
    else if (slope >= 1.5)
      out.trend = DeterminacyTrend::convergence;
  }
  return out;
}

namespace {

// Chebyshev algorithm: recurrence coefficients of the monic orthogonal
// polynomials from raw moments, then the Golub-Welsch eigen-decomposition of
// the Jacobi matrix. sigma_k(l) is the integral of pi_k(s) s^l.
template <typename Real>
Quadrature gauss_rule(const std::vector<Real>& m, Real rank_tol) {
  Quadrature out;
  out.requested = m.size() / 2;
  if (out.requested == 0 || m[0] == Real(0)) return out;
  const std::size_t n = out.requested;
  const std::size_t len = 2 * n;
  std::vector<Real> prev2(len, Real(0));
  std::vector<Real> prev(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(len));
  std::vector<Real> alpha{m[1] / m[0]};
  std::vector<Real> beta{m[0]};
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<Real> cur(len, Real(0));
    for (std::size_t l = k; l < len - k; ++l) cur[l] = prev[l + 1] - alpha[k - 1] * prev[l] - beta[k - 1] * prev2[l];
    // sigma_k(k) = ||pi_k||^2; tiny relative to t_{2k} means the measure is
    // already resolved by k atoms.
    if (!(cur[k] > rank_tol * m[2 * k])) break;
    alpha.push_back(cur[k + 1] / cur[k] - prev[k] / prev[k - 1]);
    beta.push_back(cur[k] / prev[k - 1]);
    prev2 = std::move(prev);
    prev = std::move(cur);
  }

  using Ext = long double;
  using Mat = Eigen::Matrix<Ext, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Ext, Eigen::Dynamic, 1>;
  const std::size_t r = alpha.size();
  Vec diag(r);
  Vec sub(r > 1 ? r - 1 : 0);
  for (std::size_t k = 0; k < r; ++k) diag(k) = static_cast<Ext>(alpha[k]);
  for (std::size_t k = 1; k < r; ++k) sub(k - 1) = std::sqrt(static_cast<Ext>(beta[k]));
  Eigen::SelfAdjointEigenSolver<Mat> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw DomainError("Jacobi eigen-decomposition failed");

  Ext scale = 1.0L;
  for (std::size_t k = 0; k < r; ++k) scale = std::max(scale, std::abs(solver.eigenvalues()(k)));
  const Ext mass = static_cast<Ext>(m[0]);
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < r; ++k) {
    Ext x = solver.eigenvalues()(k);
    Ext v0 = solver.eigenvectors()(0, k);
    if (std::abs(x) <= 1e-10L * scale) x = 0.0L;
    if (x < 0.0L) throw DomainError("quadrature produced a negative node");
    atoms.push_back({static_cast<double>(x), static_cast<double>(mass * v0 * v0)});
  }
  out.measure = AtomicMeasure(std::move(atoms));
  out.rank = out.measure.size();
  return out;
}

}  // namespace

MomentSequence WideMoments::rounded() const {
  MomentSequence seq;
  seq.origin = MomentOrigin::measure;
  for (WideReal v : values) seq.values.push_back(static_cast<double>(v));
  return seq;
}

WideMoments wide_moments_of(const AtomicMeasure& mu, int n_max) {
  if (n_max < 0) throw InputError("n_max must be nonnegative");
  WideMoments out;
  out.values.assign(static_cast<std::size_t>(n_max) + 1, WideReal(0));
  for (const Atom& a : mu.atoms()) {
    WideReal x = a.position;
    WideReal p = 1;
    for (int n = 0; n <= n_max; ++n) {
      out.values[static_cast<std::size_t>(n)] += WideReal(a.mass) * p;
      p *= x;
    }
  }
  return out;
}

Quadrature quadrature_from_moments(const MomentSequence& seq, double tol) {
  if (!check_stieltjes(seq, tol).consistent()) throw DomainError("quadrature of a refuted moment sequence");
  std::vector<long double> m(seq.values.begin(), seq.values.end());
  return gauss_rule(m, 1e-11L);
}

Quadrature quadrature_from_moments(const WideMoments& seq, double tol) {
  if (!check_stieltjes(seq.rounded(), tol).consistent())
    throw DomainError("quadrature of a refuted moment sequence");
  return gauss_rule(seq.values, WideReal(1e-26L));
}

double cauchy_schwarz_bound(const MomentSequence& seq) {
  require_finite(seq);
  double best = 0.0;
  for (std::size_t n = 0; 2 * n + 1 <= seq.order(); ++n) {
    double denom = seq.values[2 * n + 1];
    if (!(denom > 0.0) || !(seq.values[n] > 0.0)) throw InputError("Cauchy-Schwarz bound needs positive moments");
    best = std::max(best, seq.values[n] * seq.values[n] / denom);
  }
  return best;
}

}  // namespace treeshift

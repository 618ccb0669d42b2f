#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "treeshift/measure.hpp"

namespace treeshift {

inline constexpr double kDefaultTolerance = 1e-9;

enum class MomentOrigin { user, measure, weights };
std::string to_string(MomentOrigin origin);

/// Finite prefix t_0..t_N of a real sequence.
struct MomentSequence {
  std::vector<double> values;
  MomentOrigin origin = MomentOrigin::user;

  std::size_t order() const { return values.empty() ? 0 : values.size() - 1; }
  double operator[](std::size_t n) const { return values.at(n); }
};

MomentSequence moments_of(const AtomicMeasure& mu, int n_max);

/// Eigen data of one Hankel block.
struct HankelBlock {
  std::size_t size = 0;
  double min_eigenvalue = 0.0;
  double spectral_norm = 0.0;
  std::vector<double> min_eigenvector;
  bool passes = true;
};

struct StieltjesWitness {
  std::string block;  // "hankel" or "shifted-hankel"
  std::vector<double> coefficients;
  double quadratic_form = 0.0;
};

enum class StieltjesStatus { consistent, refuted };
std::string to_string(StieltjesStatus status);

/// "consistent" means consistent up to order N: a finite prefix can refute the
/// Stieltjes property but never establish it.
struct StieltjesVerdict {
  StieltjesStatus status = StieltjesStatus::consistent;
  std::size_t order = 0;
  double tolerance = kDefaultTolerance;
  HankelBlock hankel;
  HankelBlock shifted;
  std::optional<StieltjesWitness> witness;

  bool consistent() const { return status == StieltjesStatus::consistent; }
};

/// PSD test of H = [t_{k+l}] and H' = [t_{k+l+1}] at maximal size. A block
/// passes when its least eigenvalue is >= -tol * max(1, ||block||).
StieltjesVerdict check_stieltjes(const MomentSequence& seq, double tol = kDefaultTolerance);

/// sum_{k,l} t_{k+l+offset} a_k a_l, evaluated in extended precision.
double hankel_form(const std::vector<double>& t, std::size_t offset, const std::vector<double>& a);

/// Integral of 1/s^k with 1/0 = inf.
ExtendedReal integral_inv_s(const AtomicMeasure& mu, int k = 1);

/// nu = (1/s) mu + (theta - int 1/s dmu) delta_0, the representing measure of
/// {theta, t_0, t_1, ...}. Throws DomainError when int 1/s dmu > theta.
AtomicMeasure backward_extend(const AtomicMeasure& mu, double theta);

/// mu = s nu; the atom at 0 is annihilated.
AtomicMeasure forward_map(const AtomicMeasure& nu);

enum class DeterminacyTrend { divergence, convergence, inconclusive };
std::string to_string(DeterminacyTrend trend);

/// Finite-data view of the Carleman series sum t_n^{-1/(2n)}. Never a proof.
struct CarlemanDiagnostic {
  std::vector<double> partial_sums;  // partial_sums[k] sums n = 1..k+1
  std::optional<double> growth_exponent;  // slope of log t_n^{1/2n} against log n
  DeterminacyTrend trend = DeterminacyTrend::inconclusive;
  bool infinite_term = false;
};

CarlemanDiagnostic carleman_diagnostic(const MomentSequence& seq);

struct Quadrature {
  AtomicMeasure measure;
  std::size_t rank = 0;       // atoms produced
  std::size_t requested = 0;  // floor((N+1)/2)
  bool full_rank() const { return rank == requested; }
};

/// Moments carried in extended precision. Recovering positions and masses
/// from moments is exponentially ill-conditioned in the number of atoms, so
/// round-trips through double-precision moments lose up to ~1e-4 for six atoms
/// spread over [0.1, 10]; the wide type keeps that loss below 1e-15.
#if defined(__SIZEOF_FLOAT128__)
using WideReal = __float128;
#else
using WideReal = long double;
#endif

struct WideMoments {
  std::vector<WideReal> values;
  std::size_t order() const { return values.empty() ? 0 : values.size() - 1; }
  MomentSequence rounded() const;
};

WideMoments wide_moments_of(const AtomicMeasure& mu, int n_max);

/// Gauss rule from t_0..t_{2k-1} via the Chebyshev algorithm and the Jacobi
/// matrix eigen-decomposition. A numerically singular Hankel block gives fewer
/// atoms. Throws DomainError on a refuted sequence.
Quadrature quadrature_from_moments(const MomentSequence& seq, double tol = kDefaultTolerance);
/// Same rule with the recurrence computed from extended-precision moments. The
/// Stieltjes check runs on the rounded sequence.
Quadrature quadrature_from_moments(const WideMoments& seq, double tol = kDefaultTolerance);

/// sup_n t_n^2 / t_{2n+1}, a lower bound for int 1/s dmu.
double cauchy_schwarz_bound(const MomentSequence& seq);

}  // namespace treeshift

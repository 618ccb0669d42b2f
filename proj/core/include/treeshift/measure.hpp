#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace treeshift {

/// Nonnegative extended real used for integrals of 1/s^k, with 1/0 = inf and
/// 0 * inf = 0.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }
  /// The finite value, or +inf as a double.
  constexpr double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return {a.value_ + b.value_};
  }
  /// Scaling by a nonnegative factor; 0 * inf = 0.
  friend constexpr ExtendedReal operator*(double c, ExtendedReal a) {
    if (a.infinite_) return c == 0.0 ? ExtendedReal{0.0} : infinity();
    return {c * a.value_};
  }
  friend constexpr bool operator<=(ExtendedReal a, ExtendedReal b) {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

struct Atom {
  double position = 0.0;
  double mass = 0.0;
};

/// Finitely atomic positive measure on [0, inf).
///
/// Canonical form: positions strictly increasing, masses positive. Atoms closer
/// than kPositionTolerance * max(1, |x|) merge and their masses add; zero
/// masses are dropped.
class AtomicMeasure {
 public:
  static constexpr double kPositionTolerance = 1e-12;

  AtomicMeasure() = default;
  /// Throws InputError on a negative or non-finite position or mass.
  explicit AtomicMeasure(std::vector<Atom> atoms);
  static AtomicMeasure dirac(double position, double mass = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }

  double total_mass() const;
  bool is_probability(double tol = 1e-9) const;
  double mass_at_zero() const;
  /// mu([0, c]).
  double mass_upto(double c) const;
  double max_position() const;
  bool support_within(double c) const { return empty() || max_position() <= c; }

  /// Integral of s^n, summed by ascending position.
  double moment(int n) const;
  /// Integral of s^(-k); infinite iff there is an atom at 0.
  ExtendedReal inverse_moment(int k) const;

  AtomicMeasure scaled(double factor) const;
  /// The measure s^p d mu. Negative p throws DomainError when an atom sits at 0;
  /// positive p annihilates it.
  AtomicMeasure power_weighted(int p) const;
  /// mu restricted to [0, c].
  AtomicMeasure restricted_upto(double c) const;

  friend AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b);

 private:
  std::vector<Atom> atoms_;
};

/// Largest mass difference between a and b over the union of their atoms, with
/// positions matched under the merge tolerance.
struct MeasureDiscrepancy {
  double mass = 0.0;
  double position = 0.0;
};
MeasureDiscrepancy compare_measures(const AtomicMeasure& a, const AtomicMeasure& b);

}  // namespace treeshift

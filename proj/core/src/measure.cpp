#include "treeshift/measure.hpp"

#include <algorithm>
#include <cmath>

#include "treeshift/error.hpp"

namespace treeshift {

namespace {

bool same_position(double a, double b) {
  return std::abs(a - b) <= AtomicMeasure::kPositionTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.position) || a.position < 0.0)
      throw InputError("atom position must be finite and nonnegative");
    if (!std::isfinite(a.mass) || a.mass < 0.0) throw InputError("atom mass must be finite and nonnegative");
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.position < b.position; });
  for (const Atom& a : atoms) {
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && same_position(atoms_.back().position, a.position))
      atoms_.back().mass += a.mass;
    else
      atoms_.push_back(a);
  }
}

AtomicMeasure AtomicMeasure::dirac(double position, double mass) {
  return AtomicMeasure({{position, mass}});
}

double AtomicMeasure::total_mass() const {
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.mass;
  return sum;
}

bool AtomicMeasure::is_probability(double tol) const { return std::abs(total_mass() - 1.0) <= tol; }

double AtomicMeasure::mass_at_zero() const {
  return !atoms_.empty() && atoms_.front().position == 0.0 ? atoms_.front().mass : 0.0;
}

double AtomicMeasure::mass_upto(double c) const {
  double sum = 0.0;
  for (const Atom& a : atoms_)
    if (a.position <= c) sum += a.mass;
  return sum;
}

double AtomicMeasure::max_position() const { return atoms_.empty() ? 0.0 : atoms_.back().position; }

double AtomicMeasure::moment(int n) const {
  if (n < 0) throw InputError("use inverse_moment for negative powers");
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.mass * std::pow(a.position, n);
  return sum;
}

ExtendedReal AtomicMeasure::inverse_moment(int k) const {
  if (k < 0) throw InputError("inverse moment order must be nonnegative");
  if (k > 0 && mass_at_zero() > 0.0) return ExtendedReal::infinity();
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.mass / std::pow(a.position, k);
  return {sum};
}

AtomicMeasure AtomicMeasure::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) throw InputError("scale factor must be finite and nonnegative");
  AtomicMeasure out;
  if (factor == 0.0) return out;
  out.atoms_ = atoms_;
  for (Atom& a : out.atoms_) a.mass *= factor;
  return out;
}

AtomicMeasure AtomicMeasure::power_weighted(int p) const {
  if (p < 0 && mass_at_zero() > 0.0)
    throw DomainError("s^p with p < 0 is not integrable against an atom at 0");
  AtomicMeasure out;
  for (const Atom& a : atoms_) {
    double w = a.mass * std::pow(a.position, p);
    if (w > 0.0) out.atoms_.push_back({a.position, w});
  }
  return out;
}

AtomicMeasure AtomicMeasure::restricted_upto(double c) const {
  AtomicMeasure out;
  for (const Atom& a : atoms_)
    if (a.position <= c) out.atoms_.push_back(a);
  return out;
}

AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::vector<Atom> all = a.atoms_;
  all.insert(all.end(), b.atoms_.begin(), b.atoms_.end());
  return AtomicMeasure(std::move(all));
}

MeasureDiscrepancy compare_measures(const AtomicMeasure& a, const AtomicMeasure& b) {
  MeasureDiscrepancy worst;
  const auto& x = a.atoms();
  const auto& y = b.atoms();
  std::size_t i = 0;
  std::size_t j = 0;
  auto note = [&](double diff, double pos) {
    if (diff > worst.mass) worst = {diff, pos};
  };
  while (i < x.size() || j < y.size()) {
    if (i < x.size() && j < y.size() && same_position(x[i].position, y[j].position)) {
      note(std::abs(x[i].mass - y[j].mass), x[i].position);
      ++i;
      ++j;
    } else if (j >= y.size() || (i < x.size() && x[i].position < y[j].position)) {
      note(x[i].mass, x[i].position);
      ++i;
    } else {
      note(y[j].mass, y[j].position);
      ++j;
    }
  }
  return worst;
}

}  // namespace treeshift

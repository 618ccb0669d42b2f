#pragma once

#include <map>
#include <random>
#include <vector>

#include "treeshift/treeshift.hpp"

namespace treeshift::testing {

using Rng = std::mt19937_64;

struct TreeOptions {
  int max_vertices = 40;
  int max_depth = 5;
  int max_children = 3;
};

/// Explicit random tree rooted at 0. Childless vertices are marked truncated,
/// so the tree is leafless and every frontier vertex carries data.
DirectedTree random_tree(Rng& rng, const TreeOptions& options = {});

/// k atoms with positions uniform in [lo, hi] and random masses summing to 1.
AtomicMeasure random_measure(Rng& rng, int k, double lo, double hi);

/// Weights with random moduli in [lo, hi] and random phases.
std::vector<Complex> random_weights(Rng& rng, const DirectedTree& tree, double lo = 0.2, double hi = 2.0);

struct SystemOptions {
  TreeOptions tree;
  int max_atoms = 3;
  double min_position = 0.1;
  double max_position = 10.0;
  /// Probability that a non-first child gets weight 0.
  double zero_weight_probability = 0.0;
};

struct RandomSystem {
  WeightedShift shift;
  MeasureSystem system;
  std::map<Vertex, AtomicMeasure> frontier;
};

/// Random frontier measures, weights scaled so that eps_v = 0 wherever a
/// nonzero weight enters v, and the system built bottom-up with
/// system_from_frontier. The root keeps a random eps in [0, 0.5].
RandomSystem random_system(Rng& rng, const SystemOptions& options = {});

/// T(eta, kappa) data with two-atom branch measures on [0.2, 4], the integral
/// equalities met by construction and the last trunk weight at a random
/// fraction in [0.3, 1.3] of its cap. `perturb` scales lambda_0 by 1.05.
BranchData random_branch_data(Rng& rng, int eta, int kappa, bool perturb);

}  // namespace treeshift::testing

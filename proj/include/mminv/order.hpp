#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mminv/invariants.hpp"
#include "mminv/metrics.hpp"
#include "mminv/types.hpp"

namespace mminv {

// Point map f : X -> Y with d_Y(f x, f x') <= d_X(x, x') and f_* mu_X = mu_Y.
struct DominationWitness {
  std::vector<int> map;           // per point of X (or of its refinement)
  double lipschitz_residual = 0.0;
  double mass_residual = 0.0;
  int refinement = 1;             // common denominator applied to X before mapping

  bool verify(const FiniteMMSpace& x, const FiniteMMSpace& y,
              double mass_tol = kMassTolerance) const;
};

struct DominationOptions {
  int max_source = 8;
  int max_target = 5;
  int refine_cap = 64;  // mass-splitting handled by refining X first
  std::uint64_t node_budget = 20'000'000;
  double mass_tol = kMassTolerance;
};

struct DominationResult {
  bool dominates = false;          // Y < X established by witness
  bool certified = true;           // refutations are certified by exhaustion
  std::optional<DominationWitness> witness;
  std::uint64_t nodes = 0;
};

// Decides whether X Lipschitz-dominates Y by enumerating point maps of
// (possibly refined) X into Y, pruning on pushforward feasibility and
// partial Lipschitz violations.
DominationResult dominates_exact(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                 const DominationOptions& options = {});

struct MonotonicityViolation {
  std::string invariant;  // "obs_diam" or "sep"
  double kappa = 0.0;
  double candidate_value = 0.0;  // dominating side
  double dominated_value = 0.0;
};

struct NecessaryConditionsReport {
  std::vector<MonotonicityViolation> violations;
  double tolerance = 0.0;

  // A strict violation certifies that X does NOT dominate Y;
  // no violation is inconclusive.
  bool refuted() const { return !violations.empty(); }
};

// Checks the monotonicity consequences of "X dominates Y" over the grid:
// the dominated side never exceeds the dominating side.
NecessaryConditionsReport necessary_conditions(const FiniteMMSpace& x,
                                               const FiniteMMSpace& y,
                                               const KappaGrid& grid,
                                               const ObsDiamOptions& options = {});

// Image space of X under a 1-Lipschitz point map into an ambient metric.
// Throws with the violating pair when the map is not 1-Lipschitz.
FiniteMMSpace pushforward_space(const FiniteMMSpace& x, const std::vector<int>& map,
                                const AmbientMetric& target);

}  // namespace mminv

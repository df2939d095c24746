#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mminv/core.hpp"
#include "mminv/types.hpp"

namespace mminv {

enum class SolverMode { exact, grid, heuristic };

const char* to_string(SolverMode mode);

struct ObsDiamOptions {
  // Grid step for the certified search; 0 selects max finite distance / 64.
  double resolution = 0.0;
  int exact_cap = 7;
  double mass_tol = kMassTolerance;
  // Seed the incumbent with heuristic candidates before the grid sweep.
  bool seed_with_heuristic = true;
};

struct ObsDiamResult {
  double value = 0.0;
  LipschitzFunction witness;
  double resolution = 0.0;  // certified accuracy is 2 * resolution
  std::uint64_t nodes = 0;
};

// Certified grid search: value v with |v - ObsDiam(X;-kappa)| <= 2*resolution.
// Requires finite distances (truncate first) and size <= exact_cap.
// kappa >= 1 returns 0 by definition.
ObsDiamResult obs_diam_exact(const FiniteMMSpace& space, double kappa,
                             const ObsDiamOptions& options = {});

struct HeuristicOptions {
  int max_anchors = 3;
  int restarts = 64;
  std::uint64_t seed = 1;
  bool local_search = true;
  int local_search_rounds = 40;
  double mass_tol = kMassTolerance;
};

// Best objective over a candidate family of 1-Lipschitz observables
// (anchor distances, distance-to-set splits, offset ladders, random
// multi-anchor functions, then coordinate-wise polish). The returned value
// is always a valid lower bound of ObsDiam(X;-kappa) and the witness
// reproduces it exactly through pushforward_to_line + partial_diameter_1d.
ObsDiamResult obs_diam_heuristic(const FiniteMMSpace& space, double kappa,
                                 const HeuristicOptions& options = {});

struct SepOptions {
  std::uint64_t node_budget = 50'000'000;
  double mass_tol = kMassTolerance;
};

struct SepResult {
  double value = 0.0;
  std::optional<SepWitness> witness;
  std::uint64_t nodes = 0;
};

// Exact separation distance by branch-and-bound over disjoint labelings.
// Infeasible mass targets give value 0 with no witness.
SepResult sep_exact(const FiniteMMSpace& space, const std::vector<double>& kappas,
                    const SepOptions& options = {});

// True iff N+1 sets of the prescribed masses can be placed pairwise >= r
// apart. Points closer than r are collapsed into conflict components first.
bool sep_threshold_feasible(const FiniteMMSpace& space, double r,
                            const std::vector<double>& kappas,
                            const SepOptions& options = {});

// Sep via the finite candidate set of pairwise distances:
// Sep = max{ r in candidates : sep_threshold_feasible(r) }.
SepResult sep_via_thresholds(const FiniteMMSpace& space,
                             const std::vector<double>& kappas,
                             const SepOptions& options = {});

struct ProfileOptions {
  ObsDiamOptions obs;
  HeuristicOptions heuristic;
  SepOptions sep;
};

// kappa |-> invariant table for one space. Missing entries mark solver
// errors (budget, domain) without aborting the profile.
struct InvariantProfile {
  KappaGrid kappa_grid;
  std::vector<std::optional<double>> obs_diam;
  std::vector<LipschitzFunction> obs_witness;   // aligned with obs_diam where present
  std::vector<std::vector<double>> sep_tuples;
  std::vector<std::optional<double>> sep_values;
  std::vector<std::string> errors;  // one message per missing entry
  SolverMode mode = SolverMode::exact;
  double resolution = 0.0;
  std::uint64_t seed = 0;
};

InvariantProfile invariant_profile(const FiniteMMSpace& space, const KappaGrid& grid,
                                   const std::vector<std::vector<double>>& sep_tuples,
                                   SolverMode mode, const ProfileOptions& options = {});

struct SandwichReport {
  double kappa = 0.0;
  double kappa_prime = 0.0;
  double obs_two_kappa = 0.0;   // ObsDiam(X;-2k)
  double sep_kappa = 0.0;       // Sep(X;k,k)
  double obs_kappa_prime = 0.0; // ObsDiam(X;-k')
  double tolerance = 0.0;       // 2 * resolution
  bool lower_holds = false;     // ObsDiam(X;-2k) <= Sep(X;k,k)
  bool upper_holds = false;     // Sep(X;k,k) <= ObsDiam(X;-k')
};

SandwichReport check_sandwich(const FiniteMMSpace& space, double kappa,
                              double kappa_prime, const ObsDiamOptions& options = {});

struct PhaseLemmaReport {
  std::vector<double> kappas;
  double kappa = 0.0;
  double sep_value = 0.0;
  double obs_value = 0.0;
  double tolerance = 0.0;
  bool holds = false;  // Sep(X;kappas) >= ObsDiam(X;-kappa)
};

// Requires 1 - (1 - sum kappas)/N <= kappa < 1; violations throw with the bound.
PhaseLemmaReport check_phase_lemma(const FiniteMMSpace& space,
                                   const std::vector<double>& kappas, double kappa,
                                   const ObsDiamOptions& options = {});

// Objective shared by both solvers: the (1-kappa)-partial diameter of the
// pushforward under f, evaluated through the canonical code path.
double obs_objective(const FiniteMMSpace& space, const LipschitzFunction& f,
                     double kappa, double mass_tol = kMassTolerance);

}  // namespace mminv

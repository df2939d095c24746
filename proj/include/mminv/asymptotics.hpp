#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mminv/invariants.hpp"
#include "mminv/types.hpp"

namespace mminv {

enum class Generator {
  complete_graph,
  hypercube_hamming,
  cycle,
  interval_discretization,
  gaussian_line,
  two_cluster,
  two_point,
  random_euclidean,
};

const char* to_string(Generator g);
Generator generator_from_string(const std::string& name);

// Per-index metric scale: t_n = scale, scale / n, or scale * n.
enum class ScalingRule { constant, inverse_index, linear_index };

const char* to_string(ScalingRule rule);
ScalingRule scaling_rule_from_string(const std::string& name);

struct FamilySpec {
  Generator generator = Generator::complete_graph;
  int n_min = 2;
  int n_max = 8;
  int stride = 1;
  double scale = 1.0;        // metric scale factor (see scaling)
  ScalingRule scaling = ScalingRule::constant;
  double gap = 1.0;          // two_cluster separation
  double lambda = 1.0;       // gaussian_line standard deviation
  int dimension = 3;         // random_euclidean ambient dimension
  int cluster_points = 2;    // two_cluster points per cluster
  std::uint64_t seed = 1;
  int max_points = 4096;
};

// One space of the family; deterministic in (spec, n).
FiniteMMSpace generate_space(const FamilySpec& spec, int n);

std::vector<std::pair<int, FiniteMMSpace>> generate_family(const FamilySpec& spec);

// Symmetric tuples (k,...,k) of N+1 entries over the canonical levels,
// filtered by the sum constraint.
std::vector<std::vector<double>> symmetric_sep_tuples(int num_sets,
                                                      const std::vector<double>& levels = {
                                                          0.1, 0.2, 0.3});

struct FamilyRun {
  FamilySpec spec;
  std::vector<int> indices;
  std::vector<FiniteMMSpace> spaces;
  std::vector<InvariantProfile> profiles;
  KappaGrid grid;
  std::vector<std::vector<double>> sep_tuples;
  SolverMode mode = SolverMode::heuristic;
};

FamilyRun run_family(const FamilySpec& spec, const KappaGrid& grid,
                     const std::vector<std::vector<double>>& sep_tuples, SolverMode mode,
                     const ProfileOptions& options = {});

struct TrendOptions {
  double levy_threshold = 0.05;     // final-value ceiling for a vanishing trend
  double positive_floor = 0.05;     // liminf-proxy floor for "bounded away from 0"
  double monotone_slack = 1e-9;
};

enum class VerdictKind { positive, negative, inconclusive };

struct TrendEvidence {
  std::string description;
  std::vector<double> values;  // by family index order
};

struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  std::string reason;
  std::vector<TrendEvidence> evidence;

  bool positive() const { return kind == VerdictKind::positive; }
};

// Levy family proxy: for every grid kappa the ObsDiam column decays below
// the threshold with a monotone trend.
Verdict levy_trend(const FamilyRun& run, const TrendOptions& options = {});

struct NLevyResult {
  std::optional<int> n;  // smallest N <= n_max that classifies, when any
  int n_max = 0;
  std::vector<std::string> notes;
  // per candidate N: (tuple label, liminf proxy) pairs
  std::map<int, std::vector<std::pair<std::string, double>>> proxies;
};

// Smallest N such that all tested (N+1)-tuples with mass sum < 1 trend to 0.
NLevyResult n_levy_classify(const std::vector<std::pair<int, FiniteMMSpace>>& family,
                            int n_max, const TrendOptions& options = {},
                            const SepOptions& sep_options = {});

// delta-dissipation proxy: liminf (last-quartile minimum) of Sep at every
// tested tuple stays >= delta; weak dissipation asks only for > 0.
struct DissipationVerdict {
  bool dissipates = false;
  bool weakly_dissipates = false;
  double delta = 0.0;
  std::vector<TrendEvidence> evidence;
};

DissipationVerdict dissipation_trend(const FamilyRun& run, double delta,
                                     const TrendOptions& options = {});

struct PhaseOptions {
  std::vector<double> kappa_refs = {0.5, 0.25, 0.75};
  double ratio_cap = 8.0;
};

struct PhaseResult {
  bool positive = false;
  std::string reason;
  double max_ratio = 0.0;
  std::vector<double> r_n;  // reference ObsDiam per index (first kappa_ref)
  std::vector<double> c_n;  // 1 / r_n on success
  std::vector<std::pair<int, double>> zero_witnesses;  // (index n, kappa) with ObsDiam = 0
  std::map<double, bool> per_ref_verdict;
};

// ObsDiam(X_n;-kappa) ~ r_n detector: positive iff every grid column stays
// within ratio_cap of the reference column, for every reference kappa.
PhaseResult phase_transition_detect(const FamilyRun& run, const PhaseOptions& options = {});

struct LimitCheckEntry {
  double kappa = 0.0;
  double target = 0.0;
  double extrapolated = 0.0;
  std::vector<double> tail_inf;  // per eps
  std::vector<double> tail_sup;  // per eps
  bool agrees = false;
};

struct LimitCheckReport {
  std::vector<LimitCheckEntry> obs_entries;
  std::vector<LimitCheckEntry> sep_entries;
  double tolerance = 0.05;
  std::string note;

  bool all_agree() const {
    for (const auto& e : obs_entries)
      if (!e.agrees) return false;
    for (const auto& e : sep_entries)
      if (!e.agrees) return false;
    return true;
  }
};

struct LimitCheckOptions {
  std::vector<double> eps_list = {0.04, 0.02, 0.01};
  double tolerance = 0.05;
  SolverMode mode = SolverMode::heuristic;
  ProfileOptions profile;
  std::vector<double> consistency_grid = {0.25, 0.75};  // n_levy_limit_consistency only
};

// Desk-scale limit formulas: the family tail at kappa + eps (Sep: kappa - eps)
// against the target profile, with a linear eps -> 0 extrapolation from the
// two smallest eps values.
LimitCheckReport limit_formula_check(const std::vector<std::pair<int, FiniteMMSpace>>& family,
                                     const std::vector<double>& obs_target,
                                     const std::vector<std::vector<double>>& sep_target_tuples,
                                     const std::vector<double>& sep_target,
                                     const KappaGrid& grid,
                                     const LimitCheckOptions& options = {});

struct ConsistencyReport {
  bool n_levy_ok = false;
  bool limits_ok = false;
  std::optional<int> classified_n;
  std::vector<std::pair<double, bool>> per_truncation;  // (D, agrees)
  std::vector<std::string> notes;

  bool consistent() const { return n_levy_ok && limits_ok; }
};

// Checks a candidate extended limit space against the family: the family
// classifies as <= N-Levy and the truncated profiles converge to the
// truncated candidate's profiles.
ConsistencyReport n_levy_limit_consistency(
    const std::vector<std::pair<int, FiniteMMSpace>>& family, const FiniteMMSpace& candidate,
    int n, const std::vector<double>& truncation_list = {0.5, 1.0, 2.0},
    const LimitCheckOptions& options = {});

}  // namespace mminv

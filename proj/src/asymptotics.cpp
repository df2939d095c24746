#include "mminv/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mminv/core.hpp"
#include "mminv/rng.hpp"
#include "normal.hpp"

namespace mminv {

const char* to_string(Generator g) {
  switch (g) {
    case Generator::complete_graph: return "complete_graph";
    case Generator::hypercube_hamming: return "hypercube_hamming";
    case Generator::cycle: return "cycle";
    case Generator::interval_discretization: return "interval_discretization";
    case Generator::gaussian_line: return "gaussian_line";
    case Generator::two_cluster: return "two_cluster";
    case Generator::two_point: return "two_point";
    case Generator::random_euclidean: return "random_euclidean";
  }
  return "unknown";
}

Generator generator_from_string(const std::string& name) {
  for (Generator g : {Generator::complete_graph, Generator::hypercube_hamming, Generator::cycle,
                      Generator::interval_discretization, Generator::gaussian_line,
                      Generator::two_cluster, Generator::two_point, Generator::random_euclidean})
    if (name == to_string(g)) return g;
  throw std::invalid_argument("unknown family generator: " + name);
}

const char* to_string(ScalingRule rule) {
  switch (rule) {
    case ScalingRule::constant: return "constant";
    case ScalingRule::inverse_index: return "inverse_index";
    case ScalingRule::linear_index: return "linear_index";
  }
  return "unknown";
}

ScalingRule scaling_rule_from_string(const std::string& name) {
  for (ScalingRule r :
       {ScalingRule::constant, ScalingRule::inverse_index, ScalingRule::linear_index})
    if (name == to_string(r)) return r;
  throw std::invalid_argument("unknown scaling rule: " + name);
}

namespace {

FiniteMMSpace make_space(int n, const std::function<double(int, int)>& metric) {
  FiniteMMSpace s;
  s.dist.assign(n, std::vector<double>(n, 0.0));
  s.mass.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    s.labels.push_back("p" + std::to_string(i));
    for (int j = 0; j < n; ++j) s.dist[i][j] = i == j ? 0.0 : metric(i, j);
  }
  return s;
}

}  // namespace

FiniteMMSpace generate_space(const FamilySpec& spec, int n) {
  if (n < 1) throw std::invalid_argument("family index must be >= 1");
  FiniteMMSpace s;

  switch (spec.generator) {
    case Generator::complete_graph: {
      if (n > spec.max_points) throw CapacityError("complete_graph size above max_points");
      s = make_space(n, [](int, int) { return 1.0; });
      break;
    }
    case Generator::hypercube_hamming: {
      if (n > 30 || (1 << n) > spec.max_points)
        throw CapacityError("hypercube_hamming size above max_points");
      const int count = 1 << n;
      s = make_space(count, [](int i, int j) {
        return static_cast<double>(std::popcount(static_cast<unsigned>(i ^ j)));
      });
      break;
    }
    case Generator::cycle: {
      if (n > spec.max_points) throw CapacityError("cycle size above max_points");
      s = make_space(n, [n](int i, int j) {
        const int gap = std::abs(i - j);
        return static_cast<double>(std::min(gap, n - gap));
      });
      break;
    }
    case Generator::interval_discretization: {
      if (n > spec.max_points) throw CapacityError("interval size above max_points");
      s = make_space(n, [n](int i, int j) {
        return n == 1 ? 0.0 : std::fabs(i - j) / static_cast<double>(n - 1);
      });
      break;
    }
    case Generator::gaussian_line: {
      if (n > spec.max_points) throw CapacityError("gaussian_line size above max_points");
      std::vector<double> q(n);
      for (int i = 0; i < n; ++i)
        q[i] = spec.lambda * detail::normal_quantile((i + 0.5) / static_cast<double>(n));
      s = make_space(n, [&q](int i, int j) { return std::fabs(q[i] - q[j]); });
      break;
    }
    case Generator::two_cluster: {
      const int c = std::max(1, spec.cluster_points);
      const double intra = spec.gap / static_cast<double>(n);
      s = make_space(2 * c, [&](int i, int j) {
        return (i / c == j / c) ? intra : spec.gap;
      });
      break;
    }
    case Generator::two_point: {
      s = make_space(2, [n](int, int) { return static_cast<double>(n); });
      break;
    }
    case Generator::random_euclidean: {
      if (n > spec.max_points) throw CapacityError("random_euclidean size above max_points");
      Rng rng(Rng::derive(spec.seed, "random_euclidean#" + std::to_string(n)));
      std::vector<std::vector<double>> pts(n, std::vector<double>(spec.dimension));
      for (auto& p : pts)
        for (double& c : p) c = rng.next_double();
      s = make_space(n, [&pts](int i, int j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < pts[i].size(); ++k) {
          const double d = pts[i][k] - pts[j][k];
          sum += d * d;
        }
        return std::sqrt(sum);
      });
      break;
    }
  }

  double factor = spec.scale;
  if (spec.scaling == ScalingRule::inverse_index) factor /= static_cast<double>(n);
  if (spec.scaling == ScalingRule::linear_index) factor *= static_cast<double>(n);
  if (factor != 1.0) s = scale_space(s, factor);
  return s;
}

std::vector<std::pair<int, FiniteMMSpace>> generate_family(const FamilySpec& spec) {
  if (spec.n_min < 1 || spec.n_max < spec.n_min || spec.stride < 1)
    throw std::invalid_argument("invalid family index range");
  std::vector<std::pair<int, FiniteMMSpace>> family;
  for (int n = spec.n_min; n <= spec.n_max; n += spec.stride)
    family.emplace_back(n, generate_space(spec, n));
  return family;
}

std::vector<std::vector<double>> symmetric_sep_tuples(int num_sets,
                                                      const std::vector<double>& levels) {
  std::vector<std::vector<double>> tuples;
  for (double level : levels)
    if (level * num_sets < 1.0) tuples.push_back(std::vector<double>(num_sets, level));
  return tuples;
}

FamilyRun run_family(const FamilySpec& spec, const KappaGrid& grid,
                     const std::vector<std::vector<double>>& sep_tuples, SolverMode mode,
                     const ProfileOptions& options) {
  FamilyRun run;
  run.spec = spec;
  run.grid = grid;
  run.sep_tuples = sep_tuples;
  run.mode = mode;
  for (auto& [n, space] : generate_family(spec)) {
    run.indices.push_back(n);
    run.profiles.push_back(invariant_profile(space, grid, sep_tuples, mode, options));
    run.spaces.push_back(std::move(space));
  }
  return run;
}

namespace {

double least_squares_slope(const std::vector<double>& values) {
  const int m = static_cast<int>(values.size());
  if (m < 2) return 0.0;
  const double xbar = (m - 1) / 2.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    num += (i - xbar) * values[i];
    den += (i - xbar) * (i - xbar);
  }
  return num / den;
}

// Desk-scale liminf proxy: the minimum over the last quartile of indices.
double last_quartile_min(const std::vector<double>& values) {
  const int m = static_cast<int>(values.size());
  const int start = m - std::max(1, m / 4);
  double v = values[start];
  for (int i = start; i < m; ++i) v = std::min(v, values[i]);
  return v;
}

std::string tuple_label(const std::vector<double>& tuple) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) os << (i ? "," : "") << tuple[i];
  os << ")";
  return os.str();
}

}  // namespace

Verdict levy_trend(const FamilyRun& run, const TrendOptions& options) {
  Verdict verdict;
  if (run.profiles.empty()) {
    verdict.reason = "empty family";
    return verdict;
  }

  bool all_vanish = true;
  for (int k = 0; k < run.grid.size(); ++k) {
    TrendEvidence evidence;
    evidence.description = "obs_diam at kappa=" + std::to_string(run.grid.values[k]);
    for (std::size_t idx = 0; idx < run.profiles.size(); ++idx) {
      const auto& v = run.profiles[idx].obs_diam[k];
      if (!v.has_value()) {
        verdict.kind = VerdictKind::inconclusive;
        verdict.reason = "missing obs_diam entries at kappa=" +
                         std::to_string(run.grid.values[k]) + ", index " +
                         std::to_string(run.indices[idx]);
        return verdict;
      }
      evidence.values.push_back(*v);
    }
    const double final_value = evidence.values.back();
    const double slope = least_squares_slope(evidence.values);
    if (final_value > options.levy_threshold || slope > options.monotone_slack)
      all_vanish = false;
    verdict.evidence.push_back(std::move(evidence));
  }

  verdict.kind = all_vanish ? VerdictKind::positive : VerdictKind::negative;
  verdict.reason = all_vanish ? "all observable diameters trend to zero"
                              : "some observable diameter stays above threshold";
  return verdict;
}

NLevyResult n_levy_classify(const std::vector<std::pair<int, FiniteMMSpace>>& family,
                            int n_max, const TrendOptions& options,
                            const SepOptions& sep_options) {
  NLevyResult result;
  result.n_max = n_max;
  if (family.empty()) {
    result.notes.push_back("empty family");
    return result;
  }

  for (int N = 1; N <= n_max; ++N) {
    const auto tuples = symmetric_sep_tuples(N + 1);
    bool all_vanish = true;
    for (const auto& tuple : tuples) {
      std::vector<double> values;
      values.reserve(family.size());
      for (const auto& [n, space] : family)
        values.push_back(sep_via_thresholds(space, tuple, sep_options).value);
      const double proxy = last_quartile_min(values);
      result.proxies[N].emplace_back(tuple_label(tuple), proxy);
      if (proxy > options.levy_threshold) all_vanish = false;
    }
    if (all_vanish && !result.n.has_value()) {
      result.n = N;
      if (N >= 2) {
        // Companion behavior one level down: some tuple stays bounded away.
        bool witnessed = false;
        for (const auto& [label, proxy] : result.proxies[N - 1])
          if (proxy >= options.positive_floor) {
            result.notes.push_back("at N=" + std::to_string(N - 1) + " tuple " + label +
                                   " stays >= " + std::to_string(proxy));
            witnessed = true;
          }
        if (!witnessed)
          result.notes.push_back("no bounded-away tuple recorded at N-1 (threshold gap)");
      }
    }
  }
  if (!result.n.has_value())
    result.notes.push_back("no N <= " + std::to_string(n_max) + " classifies the family");
  return result;
}

DissipationVerdict dissipation_trend(const FamilyRun& run, double delta,
                                     const TrendOptions& options) {
  DissipationVerdict verdict;
  verdict.delta = delta;
  if (run.profiles.empty() || run.sep_tuples.empty()) return verdict;

  bool all_at_delta = true;
  bool all_positive = true;
  for (std::size_t t = 0; t < run.sep_tuples.size(); ++t) {
    TrendEvidence evidence;
    evidence.description = "sep at " + tuple_label(run.sep_tuples[t]);
    for (const auto& profile : run.profiles) {
      if (!profile.sep_values[t].has_value()) {
        verdict.evidence.push_back(std::move(evidence));
        return verdict;  // missing entries: stay inconclusive (both flags false)
      }
      evidence.values.push_back(*profile.sep_values[t]);
    }
    const double proxy = last_quartile_min(evidence.values);
    if (proxy < delta) all_at_delta = false;
    if (proxy <= options.monotone_slack) all_positive = false;
    verdict.evidence.push_back(std::move(evidence));
  }
  verdict.dissipates = all_at_delta;
  verdict.weakly_dissipates = all_positive;
  return verdict;
}

PhaseResult phase_transition_detect(const FamilyRun& run, const PhaseOptions& options) {
  PhaseResult result;
  if (run.profiles.empty()) {
    result.reason = "empty family";
    return result;
  }

  const auto& grid = run.grid.values;
  auto grid_index = [&](double kappa) -> int {
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (std::fabs(grid[k] - kappa) <= 1e-9) return static_cast<int>(k);
    return -1;
  };

  bool any_ref = false;
  bool all_positive = true;
  std::ostringstream reasons;

  for (double ref : options.kappa_refs) {
    const int ref_idx = grid_index(ref);
    if (ref_idx < 0) {
      reasons << "kappa_ref " << ref << " not on the grid, skipped; ";
      continue;
    }
    any_ref = true;

    bool positive = true;
    std::vector<double> r_n;
    for (std::size_t idx = 0; idx < run.profiles.size(); ++idx) {
      const auto& profile = run.profiles[idx];
      const auto& rv = profile.obs_diam[ref_idx];
      if (!rv.has_value() || *rv <= 0.0) {
        positive = false;
        if (rv.has_value())
          result.zero_witnesses.emplace_back(run.indices[idx], ref);
        reasons << "r_n vanishes at n=" << run.indices[idx] << " (kappa_ref " << ref << "); ";
        r_n.push_back(0.0);
        continue;
      }
      r_n.push_back(*rv);
      for (int k = 0; k < run.grid.size(); ++k) {
        const auto& v = profile.obs_diam[k];
        if (!v.has_value()) {
          positive = false;
          reasons << "missing value at n=" << run.indices[idx] << ", kappa=" << grid[k] << "; ";
          continue;
        }
        if (*v <= 0.0) {
          positive = false;
          result.zero_witnesses.emplace_back(run.indices[idx], grid[k]);
          continue;
        }
        const double ratio = std::max(*v / *rv, *rv / *v);
        if (ratio > result.max_ratio) result.max_ratio = ratio;
        if (ratio > options.ratio_cap) positive = false;
      }
    }
    result.per_ref_verdict[ref] = positive;
    if (!positive) all_positive = false;
    if (result.r_n.empty()) result.r_n = std::move(r_n);
  }

  if (!any_ref) {
    result.reason = "no kappa_ref available on the grid";
    return result;
  }

  result.positive = all_positive;
  if (result.positive) {
    result.c_n.reserve(result.r_n.size());
    for (double r : result.r_n) result.c_n.push_back(1.0 / r);
    result.reason = "observable diameters share a single scale across the grid";
  } else {
    std::string r = reasons.str();
    result.reason = r.empty() ? "ratio cap exceeded" : r;
    if (!result.zero_witnesses.empty()) result.reason += "zero observable diameter witnessed";
  }
  return result;
}

namespace {

double family_obs_value(const FiniteMMSpace& space, double kappa, SolverMode mode,
                        const ProfileOptions& options) {
  if (kappa >= 1.0) return 0.0;
  if (mode == SolverMode::heuristic) return obs_diam_heuristic(space, kappa, options.heuristic).value;
  return obs_diam_exact(space, kappa, options.obs).value;
}

double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values) {
  // Linear from the two smallest eps values (lists are given largest first).
  const std::size_t m = eps.size();
  if (m == 1) return values[0];
  const double e1 = eps[m - 1], e2 = eps[m - 2];
  const double v1 = values[m - 1], v2 = values[m - 2];
  if (e2 == e1) return v1;
  return v1 + (v1 - v2) * e1 / (e2 - e1);
}

}  // namespace

LimitCheckReport limit_formula_check(const std::vector<std::pair<int, FiniteMMSpace>>& family,
                                     const std::vector<double>& obs_target,
                                     const std::vector<std::vector<double>>& sep_target_tuples,
                                     const std::vector<double>& sep_target,
                                     const KappaGrid& grid, const LimitCheckOptions& options) {
  if (family.empty()) throw std::invalid_argument("empty family");
  if (obs_target.size() != static_cast<std::size_t>(grid.size()))
    throw std::invalid_argument("obs target length does not match the grid");
  if (sep_target.size() != sep_target_tuples.size())
    throw std::invalid_argument("sep target length does not match the tuples");

  std::vector<double> eps_sorted = options.eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());

  LimitCheckReport report;
  report.tolerance = options.tolerance;
  report.note =
      "eps->0 realized by linear extrapolation from the two smallest eps values; "
      "liminf/limsup realized as last-quartile extrema";

  for (int k = 0; k < grid.size(); ++k) {
    LimitCheckEntry entry;
    entry.kappa = grid.values[k];
    entry.target = obs_target[k];
    std::vector<double> mids;
    for (double eps : eps_sorted) {
      std::vector<double> values;
      for (const auto& [n, space] : family)
        values.push_back(family_obs_value(space, grid.values[k] + eps, options.mode,
                                          options.profile));
      const int m = static_cast<int>(values.size());
      const int start = m - std::max(1, m / 4);
      double lo = values[start], hi = values[start];
      for (int i = start; i < m; ++i) {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
      }
      entry.tail_inf.push_back(lo);
      entry.tail_sup.push_back(hi);
      mids.push_back((lo + hi) / 2.0);
    }
    entry.extrapolated = extrapolate_to_zero(eps_sorted, mids);
    entry.agrees = std::fabs(entry.extrapolated - entry.target) <= options.tolerance;
    report.obs_entries.push_back(std::move(entry));
  }

  for (std::size_t t = 0; t < sep_target_tuples.size(); ++t) {
    LimitCheckEntry entry;
    entry.kappa = sep_target_tuples[t][0];
    entry.target = sep_target[t];
    std::vector<double> mids;
    for (double eps : eps_sorted) {
      std::vector<double> shifted = sep_target_tuples[t];
      bool valid = true;
      for (double& k : shifted) {
        k -= eps;
        if (k <= 0.0) valid = false;
      }
      if (!valid) continue;
      std::vector<double> values;
      for (const auto& [n, space] : family)
        values.push_back(sep_via_thresholds(space, shifted).value);
      const int m = static_cast<int>(values.size());
      const int start = m - std::max(1, m / 4);
      double lo = values[start], hi = values[start];
      for (int i = start; i < m; ++i) {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
      }
      entry.tail_inf.push_back(lo);
      entry.tail_sup.push_back(hi);
      mids.push_back((lo + hi) / 2.0);
    }
    if (mids.empty()) continue;
    entry.extrapolated = extrapolate_to_zero(eps_sorted, mids);
    entry.agrees = std::fabs(entry.extrapolated - entry.target) <= options.tolerance;
    report.sep_entries.push_back(std::move(entry));
  }
  return report;
}

ConsistencyReport n_levy_limit_consistency(
    const std::vector<std::pair<int, FiniteMMSpace>>& family, const FiniteMMSpace& candidate,
    int n, const std::vector<double>& truncation_list, const LimitCheckOptions& options) {
  if (candidate.size() > n)
    throw std::invalid_argument("candidate has more than N points");

  ConsistencyReport report;

  const NLevyResult classification = n_levy_classify(family, n);
  report.classified_n = classification.n;
  report.n_levy_ok = classification.n.has_value() && *classification.n <= n;
  if (!report.n_levy_ok)
    report.notes.push_back("family does not classify as <= " + std::to_string(n) + "-Levy");

  const KappaGrid grid{options.consistency_grid};
  const auto sep_tuples = symmetric_sep_tuples(2, {0.2, 0.3});

  report.limits_ok = true;
  for (double cap : truncation_list) {
    const FiniteMMSpace target = truncate_space(candidate, cap);

    std::vector<double> obs_target;
    for (double kappa : grid.values)
      obs_target.push_back(obs_diam_exact(target, kappa).value);
    std::vector<double> sep_target;
    for (const auto& tuple : sep_tuples) sep_target.push_back(sep_exact(target, tuple).value);

    std::vector<std::pair<int, FiniteMMSpace>> truncated;
    truncated.reserve(family.size());
    for (const auto& [idx, space] : family) truncated.emplace_back(idx, truncate_space(space, cap));

    const LimitCheckReport check =
        limit_formula_check(truncated, obs_target, sep_tuples, sep_target, grid, options);
    const bool agrees = check.all_agree();
    report.per_truncation.emplace_back(cap, agrees);
    if (!agrees) {
      report.limits_ok = false;
      report.notes.push_back("profile mismatch at truncation D=" + std::to_string(cap));
    }
  }
  return report;
}

}  // namespace mminv

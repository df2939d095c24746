#include "mminv/invariants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mminv/rng.hpp"

namespace mminv {

const char* to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::exact: return "exact";
    case SolverMode::grid: return "grid";
    case SolverMode::heuristic: return "heuristic";
  }
  return "unknown";
}

double obs_objective(const FiniteMMSpace& space, const LipschitzFunction& f,
                     double kappa, double mass_tol) {
  if (kappa >= 1.0) return 0.0;
  return partial_diameter_1d(pushforward_to_line(space, f), 1.0 - kappa, mass_tol);
}

namespace {

constexpr int kMaxExactPoints = 8;

// Minimal window of mass >= need over unmerged (value, mass) atoms.
// Matches partial_diameter_1d on the merged pushforward.
double window_objective(const double* values, const double* masses, int n, double need) {
  std::array<double, kMaxExactPoints> v{};
  std::array<double, kMaxExactPoints> w{};
  for (int i = 0; i < n; ++i) {
    double x = values[i], m = masses[i];
    int j = i;
    while (j > 0 && v[j - 1] > x) {
      v[j] = v[j - 1];
      w[j] = w[j - 1];
      --j;
    }
    v[j] = x;
    w[j] = m;
  }
  double best = kInfiniteDistance;
  double window = 0.0;
  int j = -1;
  for (int i = 0; i < n; ++i) {
    while (window < need && j + 1 < n) window += w[++j];
    if (window < need) break;
    const double len = v[j] - v[i];
    if (len < best) best = len;
    window -= w[i];
  }
  return best == kInfiniteDistance ? 0.0 : best;
}

struct ObsGridSearch {
  int n = 0;
  double res = 0.0;
  double need = 0.0;
  double ftol = 0.0;
  std::array<std::array<double, kMaxExactPoints>, kMaxExactPoints> d{};
  std::array<double, kMaxExactPoints> mass{};
  std::array<int, kMaxExactPoints> order{};
  std::array<double, kMaxExactPoints> value{};  // by point index

  double best = -1.0;
  std::array<double, kMaxExactPoints> best_value{};
  std::uint64_t nodes = 0;

  void search(int depth, const std::array<int, kMaxExactPoints>& lo,
              const std::array<int, kMaxExactPoints>& hi, double cur_min, double cur_max) {
    ++nodes;
    if (depth == n) {
      std::array<double, kMaxExactPoints> vals{};
      std::array<double, kMaxExactPoints> ws{};
      for (int i = 0; i < n; ++i) {
        vals[i] = value[i];
        ws[i] = mass[i];
      }
      const double obj = window_objective(vals.data(), ws.data(), n, need);
      if (obj > best) {
        best = obj;
        best_value = value;
      }
      return;
    }

    // Optimistic bound: the objective never exceeds the achievable range.
    double pmin = cur_min, pmax = cur_max;
    for (int k = depth; k < n; ++k) {
      const int p = order[k];
      const double plo = lo[p] * res, phi = hi[p] * res;
      if (plo < pmin) pmin = plo;
      if (phi > pmax) pmax = phi;
    }
    if (pmax - pmin <= best) return;

    const int p = order[depth];
    const int glo = (depth == 1 && lo[p] < 0) ? 0 : lo[p];  // f and -f are equivalent
    for (int g = glo; g <= hi[p]; ++g) {
      const double v = g * res;
      value[p] = v;
      auto nlo = lo;
      auto nhi = hi;
      bool ok = true;
      for (int k = depth + 1; k < n; ++k) {
        const int q = order[k];
        const double dq = d[p][q];
        const int l = static_cast<int>(std::ceil((v - dq - ftol) / res));
        const int h = static_cast<int>(std::floor((v + dq + ftol) / res));
        if (l > nlo[q]) nlo[q] = l;
        if (h < nhi[q]) nhi[q] = h;
        if (nlo[q] > nhi[q]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      search(depth + 1, nlo, nhi, std::min(cur_min, v), std::max(cur_max, v));
    }
  }
};

}  // namespace

ObsDiamResult obs_diam_exact(const FiniteMMSpace& space, double kappa,
                             const ObsDiamOptions& options) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  const int n = space.size();
  if (n > options.exact_cap) {
    std::ostringstream os;
    os << "obs_diam_exact is capped at " << options.exact_cap << " points; got " << n;
    throw CapacityError(os.str());
  }
  if (space.has_infinite_distance())
    throw DomainError("space contains infinite distances; apply truncate_space first");

  const double dmax = space.max_finite_distance();
  double res = options.resolution > 0.0 ? options.resolution : dmax / 64.0;

  ObsDiamResult result;
  result.witness.values.assign(n, 0.0);
  if (kappa >= 1.0 || n == 1 || dmax == 0.0) return result;  // exact zero, resolution 0
  result.resolution = res;

  ObsGridSearch search;
  search.n = n;
  search.res = res;
  search.need = (1.0 - kappa) - options.mass_tol;
  search.ftol = 1e-9 * std::max(1.0, dmax);
  for (int i = 0; i < n; ++i) {
    search.mass[i] = space.mass[i];
    for (int j = 0; j < n; ++j) search.d[i][j] = space.dist[i][j];
  }

  // Point 0 pinned at value 0; remaining coordinates widest-first.
  std::array<int, kMaxExactPoints> order{};
  order[0] = 0;
  std::vector<int> rest;
  for (int i = 1; i < n; ++i) rest.push_back(i);
  std::sort(rest.begin(), rest.end(), [&](int a, int b) {
    return space.dist[0][a] > space.dist[0][b] ||
           (space.dist[0][a] == space.dist[0][b] && a < b);
  });
  for (int k = 0; k < n - 1; ++k) order[k + 1] = rest[k];
  search.order = order;

  std::array<int, kMaxExactPoints> lo{}, hi{};
  lo[0] = hi[0] = 0;
  for (int i = 1; i < n; ++i) {
    const int g = static_cast<int>(std::floor((space.dist[0][i] + search.ftol) / res));
    lo[i] = -g;
    hi[i] = g;
  }

  if (options.seed_with_heuristic) {
    HeuristicOptions hopt;
    hopt.restarts = 16;
    hopt.seed = 0x5eedULL;
    hopt.local_search = false;
    hopt.mass_tol = options.mass_tol;
    const ObsDiamResult seed = obs_diam_heuristic(space, kappa, hopt);
    search.best = seed.value;
    for (int i = 0; i < n; ++i) search.best_value[i] = seed.witness.values[i];
  }

  search.value[0] = 0.0;
  search.search(1, lo, hi, 0.0, 0.0);

  result.nodes = search.nodes;
  result.witness.values.assign(search.best_value.begin(), search.best_value.begin() + n);
  // Settle the reported value through the canonical evaluation path.
  result.value = obs_objective(space, result.witness, kappa, options.mass_tol);
  return result;
}

namespace {

struct BestObservable {
  double value = -1.0;
  LipschitzFunction witness;

  void offer(const FiniteMMSpace& space, double kappa, double mass_tol,
             const LipschitzFunction& f) {
    const double obj = obs_objective(space, f, kappa, mass_tol);
    if (obj > value) {
      value = obj;
      witness = f;
    }
  }
};

LipschitzFunction distance_to_set(const FiniteMMSpace& space, const std::vector<int>& set) {
  const int n = space.size();
  LipschitzFunction f;
  f.values.assign(n, kInfiniteDistance);
  for (int i = 0; i < n; ++i)
    for (int s : set) f.values[i] = std::min(f.values[i], space.dist[i][s]);
  return f;
}

LipschitzFunction multi_anchor(const FiniteMMSpace& space, const std::vector<int>& anchors,
                               const std::vector<double>& offsets) {
  const int n = space.size();
  LipschitzFunction f;
  f.values.assign(n, kInfiniteDistance);
  for (int i = 0; i < n; ++i)
    for (std::size_t j = 0; j < anchors.size(); ++j)
      f.values[i] = std::min(f.values[i], space.dist[i][anchors[j]] + offsets[j]);
  return f;
}

}  // namespace

ObsDiamResult obs_diam_heuristic(const FiniteMMSpace& space, double kappa,
                                 const HeuristicOptions& options) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (space.has_infinite_distance())
    throw DomainError("space contains infinite distances; apply truncate_space first");

  const int n = space.size();
  ObsDiamResult result;
  result.witness.values.assign(n, 0.0);
  if (n == 1 || kappa >= 1.0) return result;

  const double dmax = space.max_finite_distance();
  if (dmax == 0.0) return result;

  BestObservable best;
  best.offer(space, kappa, options.mass_tol, result.witness);  // constant map

  // Single-anchor distance functions.
  for (int p = 0; p < n; ++p) {
    LipschitzFunction f;
    f.values.resize(n);
    for (int i = 0; i < n; ++i) f.values[i] = space.dist[i][p];
    best.offer(space, kappa, options.mass_tol, f);
  }

  // Seeds for the structured candidates: a spread of base points.
  std::vector<int> seeds;
  if (n <= 24) {
    for (int p = 0; p < n; ++p) seeds.push_back(p);
  } else {
    const int stride = (n + 23) / 24;
    for (int p = 0; p < n; p += stride) seeds.push_back(p);
    int ecc = 0;
    double ecc_sum = -1.0;
    for (int p = 0; p < n; ++p) {
      double s = std::accumulate(space.dist[p].begin(), space.dist[p].end(), 0.0);
      if (s > ecc_sum) {
        ecc_sum = s;
        ecc = p;
      }
    }
    if (std::find(seeds.begin(), seeds.end(), ecc) == seeds.end()) seeds.push_back(ecc);
  }

  for (int p : seeds) {
    std::vector<int> by_distance(n);
    std::iota(by_distance.begin(), by_distance.end(), 0);
    std::sort(by_distance.begin(), by_distance.end(), [&](int a, int b) {
      return space.dist[p][a] < space.dist[p][b] ||
             (space.dist[p][a] == space.dist[p][b] && a < b);
    });

    // Balanced mass splits: distance to the k points nearest the seed.
    for (int k : {n / 4, n / 2, (3 * n) / 4}) {
      if (k < 1 || k >= n) continue;
      std::vector<int> set(by_distance.begin(), by_distance.begin() + k);
      best.offer(space, kappa, options.mass_tol, distance_to_set(space, set));
    }

    // Offset ladders: evenly spaced offsets over the seed ordering.
    for (double span : {dmax, dmax / 2.0}) {
      std::vector<double> offsets(n);
      for (int j = 0; j < n; ++j) offsets[j] = span * j / (n - 1);
      best.offer(space, kappa, options.mass_tol, multi_anchor(space, by_distance, offsets));
    }
  }

  // Random multi-anchor candidates.
  Rng rng(Rng::derive(options.seed, "obs_heuristic"));
  for (int r = 0; r < options.restarts; ++r) {
    const int k = rng.next_int(1, std::max(1, std::min(options.max_anchors, n)));
    std::vector<int> anchors;
    while (static_cast<int>(anchors.size()) < k) {
      const int a = rng.next_int(0, n - 1);
      if (std::find(anchors.begin(), anchors.end(), a) == anchors.end()) anchors.push_back(a);
    }
    std::vector<double> offsets(anchors.size());
    for (double& c : offsets) c = rng.uniform(0.0, dmax);
    best.offer(space, kappa, options.mass_tol, multi_anchor(space, anchors, offsets));
  }

  // Coordinate-wise polish from the best candidate.
  if (options.local_search) {
    LipschitzFunction cur = best.witness;
    double cur_val = best.value;
    const double steps[3] = {dmax / 16.0, dmax / 64.0, dmax / 256.0};
    for (int round = 0; round < options.local_search_rounds; ++round) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        for (double step : steps) {
          for (double sign : {1.0, -1.0}) {
            LipschitzFunction trial = cur;
            trial.values[i] += sign * step;
            if (!trial.feasible(space, 1e-12 * std::max(1.0, dmax))) continue;
            const double obj = obs_objective(space, trial, kappa, options.mass_tol);
            if (obj > cur_val) {
              cur = trial;
              cur_val = obj;
              improved = true;
            }
          }
        }
      }
      if (!improved) break;
    }
    best.offer(space, kappa, options.mass_tol, cur);
  }

  result.value = best.value;
  result.witness = best.witness;
  return result;
}

namespace {

void validate_kappas(const std::vector<double>& kappas) {
  if (kappas.size() < 2)
    throw std::invalid_argument("separation distance needs at least two mass targets");
  for (double k : kappas)
    if (!(k > 0.0)) throw std::invalid_argument("mass targets must be positive");
}

struct SepSearch {
  const FiniteMMSpace& space;
  const std::vector<double>& kappas;
  double mass_tol;
  std::uint64_t budget;
  std::uint64_t nodes = 0;

  std::vector<int> order;       // points by descending mass
  std::vector<double> suffix;   // remaining assignable mass
  std::vector<int> assignment;  // by point index
  std::vector<double> label_mass;
  std::vector<int> label_count;
  std::vector<int> twin;        // previous interchangeable point (order position)

  double best = -1.0;
  std::vector<int> best_assignment;

  // Decision mode: stop as soon as a labeling with min distance >= threshold
  // and all mass targets met is found.
  bool decision = false;
  double threshold = 0.0;
  bool decision_found = false;

  SepSearch(const FiniteMMSpace& s, const std::vector<double>& k, const SepOptions& opt)
      : space(s), kappas(k), mass_tol(opt.mass_tol), budget(opt.node_budget) {
    const int n = s.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return s.mass[a] > s.mass[b] || (s.mass[a] == s.mass[b] && a < b);
    });
    suffix.assign(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + s.mass[order[i]];
    assignment.assign(n, SepWitness::kUnused);
    label_mass.assign(k.size(), 0.0);
    label_count.assign(k.size(), 0);

    // Points with equal mass and identical distance rows (off each other)
    // are interchangeable; forcing nondecreasing labels along such chains
    // collapses the search on symmetric spaces.
    twin.assign(n, -1);
    for (int a = 1; a < n; ++a) {
      const int p = order[a];
      for (int b = a - 1; b >= 0; --b) {
        const int q = order[b];
        if (s.mass[p] != s.mass[q]) break;  // order is sorted by mass
        bool same = true;
        for (int x = 0; x < n && same; ++x) {
          if (x == p || x == q) continue;
          if (s.dist[p][x] != s.dist[q][x]) same = false;
        }
        if (same) {
          twin[a] = b;
          break;
        }
      }
    }
  }

  double deficit() const {
    double d = 0.0;
    for (std::size_t i = 0; i < kappas.size(); ++i)
      d += std::max(0.0, kappas[i] - label_mass[i] - mass_tol);
    return d;
  }

  // A label may open only after every unused label of equal target before it;
  // labels with identical targets are interchangeable.
  bool label_openable(int l) const {
    if (label_count[l] > 0) return true;
    for (int m = 0; m < l; ++m)
      if (kappas[m] == kappas[l] && label_count[m] == 0) return false;
    return true;
  }

  void run(int k, double cur_min) {
    if (decision && decision_found) return;
    if (++nodes > budget)
      throw CapacityError(
          "sep_exact node budget exceeded; consider sep_threshold_feasible with a threshold list");
    if (!decision && cur_min <= best) return;
    if (deficit() > suffix[k] + mass_tol) return;

    if (k == static_cast<int>(order.size())) {
      if (deficit() > 0.0) return;
      if (decision) {
        decision_found = true;
        best_assignment = assignment;
        return;
      }
      best = cur_min;
      best_assignment = assignment;
      return;
    }

    const int p = order[k];
    const int labels = static_cast<int>(kappas.size());
    // Unused counts as the largest label for the twin-chain canonical order.
    const int floor_label =
        twin[k] >= 0 && assignment[order[twin[k]]] != SepWitness::kUnused
            ? assignment[order[twin[k]]]
            : (twin[k] >= 0 ? labels : 0);
    for (int l = floor_label; l < labels; ++l) {
      if (!label_openable(l)) continue;
      double new_min = cur_min;
      bool ok = true;
      for (int q = 0; q < space.size(); ++q) {
        const int a = assignment[q];
        if (a == SepWitness::kUnused || a == l || q == p) continue;
        const double d = space.dist[p][q];
        if (decision) {
          if (d < threshold) {
            ok = false;
            break;
          }
        } else if (d < new_min) {
          new_min = d;
        }
      }
      if (!ok) continue;
      if (!decision && new_min <= best) continue;
      assignment[p] = l;
      label_mass[l] += space.mass[p];
      ++label_count[l];
      run(k + 1, new_min);
      --label_count[l];
      label_mass[l] -= space.mass[p];
      assignment[p] = SepWitness::kUnused;
      if (decision && decision_found) return;
    }
    run(k + 1, cur_min);
  }
};

}  // namespace

SepResult sep_exact(const FiniteMMSpace& space, const std::vector<double>& kappas,
                    const SepOptions& options) {
  validate_kappas(kappas);
  SepResult result;

  double total = 0.0;
  for (double k : kappas) total += k;
  if (total > 1.0 + options.mass_tol * kappas.size()) return result;  // infeasible masses

  SepSearch search(space, kappas, options);
  search.run(0, kInfiniteDistance);
  result.nodes = search.nodes;
  if (search.best < 0.0) return result;  // no feasible disjoint labeling

  result.value = search.best;
  SepWitness w;
  w.assignment = search.best_assignment;
  w.kappas = kappas;
  result.witness = std::move(w);
  return result;
}

bool sep_threshold_feasible(const FiniteMMSpace& space, double r,
                            const std::vector<double>& kappas,
                            const SepOptions& options) {
  if (!(r > 0.0)) throw std::invalid_argument("threshold must be positive");
  validate_kappas(kappas);

  double total = 0.0;
  for (double k : kappas) total += k;
  if (total > 1.0 + options.mass_tol * kappas.size()) return false;

  SepSearch search(space, kappas, options);
  search.decision = true;
  search.threshold = r;
  search.run(0, kInfiniteDistance);
  return search.decision_found;
}

SepResult sep_via_thresholds(const FiniteMMSpace& space, const std::vector<double>& kappas,
                             const SepOptions& options) {
  validate_kappas(kappas);
  SepResult result;

  double total = 0.0;
  for (double k : kappas) total += k;
  if (total > 1.0 + options.mass_tol * kappas.size()) return result;

  std::vector<double> candidates;
  const int n = space.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (space.dist[i][j] > 0.0) candidates.push_back(space.dist[i][j]);
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (double r : candidates) {
    SepSearch search(space, kappas, options);
    search.decision = true;
    search.threshold = r;
    search.run(0, kInfiniteDistance);
    result.nodes += search.nodes;
    if (search.decision_found) {
      result.value = r;
      SepWitness w;
      w.assignment = search.best_assignment;
      w.kappas = kappas;
      result.witness = std::move(w);
      return result;
    }
  }

  // No positive threshold works; any mass-feasible labeling still gives 0.
  SepSearch search(space, kappas, options);
  search.decision = true;
  search.threshold = 0.0;
  search.run(0, kInfiniteDistance);
  result.nodes += search.nodes;
  if (search.decision_found) {
    SepWitness w;
    w.assignment = search.best_assignment;
    w.kappas = kappas;
    result.witness = std::move(w);
  }
  return result;
}

InvariantProfile invariant_profile(const FiniteMMSpace& space, const KappaGrid& grid,
                                   const std::vector<std::vector<double>>& sep_tuples,
                                   SolverMode mode, const ProfileOptions& options) {
  InvariantProfile profile;
  profile.kappa_grid = grid;
  profile.sep_tuples = sep_tuples;
  profile.mode = mode;
  profile.seed = options.heuristic.seed;

  const double dmax = space.max_finite_distance();
  profile.resolution = options.obs.resolution > 0.0 ? options.obs.resolution : dmax / 64.0;

  for (double kappa : grid.values) {
    try {
      ObsDiamResult r;
      if (mode == SolverMode::heuristic) {
        r = obs_diam_heuristic(space, kappa, options.heuristic);
      } else {
        r = obs_diam_exact(space, kappa, options.obs);
      }
      profile.obs_diam.push_back(r.value);
      profile.obs_witness.push_back(std::move(r.witness));
    } catch (const std::exception& e) {
      profile.obs_diam.push_back(std::nullopt);
      profile.obs_witness.push_back({});
      profile.errors.push_back(std::string("obs_diam at kappa=") + std::to_string(kappa) +
                               ": " + e.what());
    }
  }

  // A witness found at a larger kappa is also a witness at any smaller one,
  // so re-evaluating witnesses leftward enforces the monotone profile shape
  // without ever reporting a value no observable attains.
  const int m = grid.size();
  for (int i = 0; i < m; ++i) {
    if (!profile.obs_diam[i].has_value()) continue;
    for (int j = i + 1; j < m; ++j) {
      if (!profile.obs_diam[j].has_value() || profile.obs_witness[j].values.empty()) continue;
      const double v = obs_objective(space, profile.obs_witness[j], grid.values[i],
                                     options.obs.mass_tol);
      if (v > *profile.obs_diam[i]) {
        profile.obs_diam[i] = v;
        profile.obs_witness[i] = profile.obs_witness[j];
      }
    }
  }

  for (const auto& tuple : sep_tuples) {
    try {
      SepResult r = (mode == SolverMode::heuristic)
                        ? sep_via_thresholds(space, tuple, options.sep)
                        : sep_exact(space, tuple, options.sep);
      profile.sep_values.push_back(r.value);
    } catch (const std::exception& e) {
      profile.sep_values.push_back(std::nullopt);
      std::string label = "(";
      for (std::size_t i = 0; i < tuple.size(); ++i)
        label += (i ? "," : "") + std::to_string(tuple[i]);
      label += ")";
      profile.errors.push_back("sep at " + label + ": " + e.what());
    }
  }
  return profile;
}

SandwichReport check_sandwich(const FiniteMMSpace& space, double kappa, double kappa_prime,
                              const ObsDiamOptions& options) {
  if (!(kappa_prime > 0.0 && kappa_prime < kappa))
    throw std::invalid_argument("need 0 < kappa' < kappa");

  SandwichReport report;
  report.kappa = kappa;
  report.kappa_prime = kappa_prime;

  const ObsDiamResult lo = obs_diam_exact(space, 2.0 * kappa, options);
  const ObsDiamResult hi = obs_diam_exact(space, kappa_prime, options);
  const SepResult sep = sep_exact(space, {kappa, kappa}, {});

  report.obs_two_kappa = lo.value;
  report.obs_kappa_prime = hi.value;
  report.sep_kappa = sep.value;
  report.tolerance = 2.0 * std::max(lo.resolution, hi.resolution);
  report.lower_holds = report.obs_two_kappa <= report.sep_kappa + report.tolerance;
  report.upper_holds = report.sep_kappa <= report.obs_kappa_prime + report.tolerance;
  return report;
}

PhaseLemmaReport check_phase_lemma(const FiniteMMSpace& space,
                                   const std::vector<double>& kappas, double kappa,
                                   const ObsDiamOptions& options) {
  validate_kappas(kappas);
  const int N = static_cast<int>(kappas.size()) - 1;
  double sum = 0.0;
  for (double k : kappas) sum += k;
  const double bound = 1.0 - (1.0 - sum) / N;
  if (!(bound <= kappa && kappa < 1.0)) {
    std::ostringstream os;
    os << "hypothesis requires 1 - (1 - sum kappas)/N = " << bound << " <= kappa < 1; got kappa = "
       << kappa;
    throw std::invalid_argument(os.str());
  }

  PhaseLemmaReport report;
  report.kappas = kappas;
  report.kappa = kappa;

  const SepResult sep = sep_exact(space, kappas, {});
  const ObsDiamResult obs = obs_diam_exact(space, kappa, options);
  report.sep_value = sep.value;
  report.obs_value = obs.value;
  report.tolerance = 2.0 * obs.resolution;
  report.holds = sep.value + report.tolerance >= obs.value;
  return report;
}

}  // namespace mminv

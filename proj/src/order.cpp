#include "mminv/order.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mminv {

namespace {

// Smallest q <= cap with all masses integral multiples of 1/q, or 0.
long long common_denominator(const std::vector<double>& masses, int cap) {
  long long lcm = 1;
  for (double m : masses) {
    long long q = 0;
    for (long long cand = 1; cand <= cap; ++cand) {
      const double scaled = m * static_cast<double>(cand);
      if (std::fabs(scaled - std::round(scaled)) <= 1e-9 * static_cast<double>(cand) &&
          std::round(scaled) >= 1.0) {
        q = cand;
        break;
      }
    }
    if (q == 0) return 0;
    lcm = std::lcm(lcm, q);
    if (lcm > cap) return 0;
  }
  return lcm;
}

struct MapSearch {
  const FiniteMMSpace& x;
  const FiniteMMSpace& y;
  double mass_tol;
  std::uint64_t budget;
  std::uint64_t nodes = 0;

  std::vector<int> order;          // source points, heaviest first
  std::vector<double> suffix;      // unassigned source mass
  std::vector<int> map;            // by source index; -1 unassigned
  std::vector<double> remaining;   // target mass still to be covered
  std::vector<int> twin;           // previous identical source point, or -1

  bool found = false;
  std::vector<int> result;

  MapSearch(const FiniteMMSpace& sx, const FiniteMMSpace& sy, const DominationOptions& opt)
      : x(sx), y(sy), mass_tol(opt.mass_tol), budget(opt.node_budget) {
    const int n = sx.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return sx.mass[a] > sx.mass[b] || (sx.mass[a] == sx.mass[b] && a < b);
    });
    suffix.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] + sx.mass[order[k]];
    map.assign(n, -1);
    remaining = sy.mass;

    // Coincident source points with identical distance rows are
    // interchangeable; force nondecreasing images along each twin chain.
    twin.assign(n, -1);
    for (int k = 1; k < n; ++k) {
      const int p = order[k];
      for (int m = k - 1; m >= 0; --m) {
        const int q = order[m];
        if (sx.mass[p] != sx.mass[q] || sx.dist[p][q] != 0.0) continue;
        if (sx.dist[p] == sx.dist[q]) {
          twin[k] = m;
          break;
        }
      }
    }
  }

  bool run(int k) {
    if (++nodes > budget)
      throw CapacityError("dominates_exact node budget exceeded; try necessary_conditions");
    if (k == static_cast<int>(order.size())) {
      for (double r : remaining)
        if (std::fabs(r) > mass_tol) return false;
      result = map;
      found = true;
      return true;
    }
    const int p = order[k];
    const int from = twin[k] >= 0 ? map[order[twin[k]]] : 0;
    for (int t = from; t < y.size(); ++t) {
      if (remaining[t] < x.mass[p] - mass_tol) continue;
      bool ok = true;
      for (int m = 0; m < k; ++m) {
        const int q = order[m];
        const double dy = y.dist[t][map[q]];
        const double dx = x.dist[p][q];
        if (is_infinite(dy) && !is_infinite(dx)) {
          ok = false;
          break;
        }
        if (!is_infinite(dx) && dy > dx + 1e-12 * std::max(1.0, dx)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;

      map[p] = t;
      remaining[t] -= x.mass[p];
      // Bail early when some target can no longer be filled.
      double deficit = 0.0;
      for (double r : remaining) deficit += std::max(0.0, r);
      if (deficit <= suffix[k + 1] + mass_tol && run(k + 1)) return true;
      remaining[t] += x.mass[p];
      map[p] = -1;
    }
    return false;
  }
};

FiniteMMSpace refine_uniform(const FiniteMMSpace& s, long long q, std::vector<int>* origin) {
  FiniteMMSpace out;
  origin->clear();
  for (int i = 0; i < s.size(); ++i) {
    const long long copies = std::llround(s.mass[i] * static_cast<double>(q));
    for (long long c = 0; c < copies; ++c) origin->push_back(i);
  }
  const int m = static_cast<int>(origin->size());
  out.mass.assign(m, 1.0 / static_cast<double>(q));
  out.dist.assign(m, std::vector<double>(m, 0.0));
  for (int a = 0; a < m; ++a) {
    out.labels.push_back("r" + std::to_string(a));
    for (int b = 0; b < m; ++b)
      out.dist[a][b] = ((*origin)[a] == (*origin)[b]) ? 0.0 : s.dist[(*origin)[a]][(*origin)[b]];
  }
  return out;
}

}  // namespace

bool DominationWitness::verify(const FiniteMMSpace& x, const FiniteMMSpace& y,
                               double mass_tol) const {
  std::vector<int> origin;
  FiniteMMSpace source = x;
  if (refinement > 1) source = refine_uniform(x, refinement, &origin);
  if (map.size() != static_cast<std::size_t>(source.size())) return false;

  std::vector<double> pushed(y.size(), 0.0);
  for (int i = 0; i < source.size(); ++i) {
    if (map[i] < 0 || map[i] >= y.size()) return false;
    pushed[map[i]] += source.mass[i];
  }
  for (int t = 0; t < y.size(); ++t)
    if (std::fabs(pushed[t] - y.mass[t]) > mass_tol * std::max<double>(1, source.size()))
      return false;
  for (int i = 0; i < source.size(); ++i)
    for (int j = i + 1; j < source.size(); ++j) {
      const double dx = source.dist[i][j];
      const double dy = y.dist[map[i]][map[j]];
      if (is_infinite(dx)) continue;
      if (is_infinite(dy) || dy > dx + 1e-9 * std::max(1.0, dx)) return false;
    }
  return true;
}

DominationResult dominates_exact(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                 const DominationOptions& options) {
  if (x.has_infinite_distance() || y.has_infinite_distance())
    throw DomainError("domination search requires finite distances; truncate first");
  if (x.size() > options.max_source || y.size() > options.max_target) {
    std::ostringstream os;
    os << "dominates_exact budget is " << options.max_source << "x" << options.max_target
       << " points; got " << x.size() << "x" << y.size() << "; try necessary_conditions";
    throw CapacityError(os.str());
  }

  DominationResult result;

  // Plain point maps first.
  {
    MapSearch search(x, y, options);
    const bool ok = search.run(0);
    result.nodes += search.nodes;
    if (ok) {
      DominationWitness w;
      w.map = search.result;
      w.refinement = 1;
      result.dominates = true;
      result.witness = std::move(w);
      return result;
    }
  }

  // Mass splitting through a refinement of X. For a genuine metric target
  // this cannot find anything new (coincident copies must share an image),
  // so it only runs, and only matters, when Y has zero-distance pairs.
  bool y_has_coincident = false;
  for (int i = 0; i < y.size() && !y_has_coincident; ++i)
    for (int j = i + 1; j < y.size(); ++j)
      if (y.dist[i][j] == 0.0) {
        y_has_coincident = true;
        break;
      }

  std::vector<double> all = x.mass;
  all.insert(all.end(), y.mass.begin(), y.mass.end());
  const long long q = common_denominator(all, options.refine_cap);
  constexpr long long kRefinedSearchCap = 24;

  if (y_has_coincident && q > 1 && q <= kRefinedSearchCap) {
    std::vector<int> origin;
    const FiniteMMSpace rx = refine_uniform(x, q, &origin);
    MapSearch search(rx, y, options);
    const bool ok = search.run(0);
    result.nodes += search.nodes;
    if (ok) {
      DominationWitness w;
      w.map = search.result;
      w.refinement = static_cast<int>(q);
      result.dominates = true;
      result.witness = std::move(w);
      return result;
    }
  }

  result.dominates = false;
  // Refutation is exhaustive unless a helpful refinement was out of reach.
  result.certified = !(y_has_coincident && (q == 0 || q > kRefinedSearchCap));
  return result;
}

NecessaryConditionsReport necessary_conditions(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                               const KappaGrid& grid,
                                               const ObsDiamOptions& options) {
  NecessaryConditionsReport report;

  for (double kappa : grid.values) {
    const ObsDiamResult vx = obs_diam_exact(x, kappa, options);
    const ObsDiamResult vy = obs_diam_exact(y, kappa, options);
    report.tolerance = 2.0 * std::max(vx.resolution, vy.resolution);
    // If X dominates Y then ObsDiam(Y) <= ObsDiam(X); a certified excess of
    // the dominated side refutes domination.
    if (vy.value > vx.value + report.tolerance)
      report.violations.push_back({"obs_diam", kappa, vx.value, vy.value});

    const SepResult sx = sep_exact(x, {kappa, kappa});
    const SepResult sy = sep_exact(y, {kappa, kappa});
    if (sy.value > sx.value + 1e-9)
      report.violations.push_back({"sep", kappa, sx.value, sy.value});
  }
  return report;
}

FiniteMMSpace pushforward_space(const FiniteMMSpace& x, const std::vector<int>& map,
                                const AmbientMetric& target) {
  if (map.size() != static_cast<std::size_t>(x.size()))
    throw std::invalid_argument("map length does not match point count");
  for (int t : map)
    if (t < 0 || t >= target.size()) throw std::invalid_argument("map value outside the target");

  for (int i = 0; i < x.size(); ++i)
    for (int j = i + 1; j < x.size(); ++j) {
      const double dx = x.dist[i][j];
      if (is_infinite(dx)) continue;
      if (target.dist[map[i]][map[j]] > dx + 1e-12 * std::max(1.0, dx)) {
        std::ostringstream os;
        os << "map is not 1-Lipschitz at pair (" << i << "," << j << ")";
        throw std::invalid_argument(os.str());
      }
    }

  std::vector<double> pushed(target.size(), 0.0);
  for (int i = 0; i < x.size(); ++i) pushed[map[i]] += x.mass[i];

  FiniteMMSpace out;
  std::vector<int> kept;
  for (int t = 0; t < target.size(); ++t)
    if (pushed[t] > 0.0) kept.push_back(t);
  const int m = static_cast<int>(kept.size());
  out.dist.assign(m, std::vector<double>(m, 0.0));
  for (int a = 0; a < m; ++a) {
    out.labels.push_back("q" + std::to_string(kept[a]));
    out.mass.push_back(pushed[kept[a]]);
    for (int b = 0; b < m; ++b) out.dist[a][b] = target.dist[kept[a]][kept[b]];
  }
  return out;
}

}  // namespace mminv

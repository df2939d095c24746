#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "mminv/core.hpp"
#include "mminv/metrics.hpp"
#include "mminv/rng.hpp"
#include "mminv/types.hpp"

namespace testutil {

using mminv::FiniteMMSpace;
using mminv::RealMeasure;

inline FiniteMMSpace make_space(std::vector<std::vector<double>> dist,
                                std::vector<double> mass) {
  FiniteMMSpace s;
  s.dist = std::move(dist);
  s.mass = std::move(mass);
  for (std::size_t i = 0; i < s.mass.size(); ++i) s.labels.push_back("p" + std::to_string(i));
  return s;
}

inline FiniteMMSpace one_point() { return make_space({{0.0}}, {1.0}); }

inline FiniteMMSpace two_point(double d, double m0 = 0.5, double m1 = 0.5) {
  return make_space({{0.0, d}, {d, 0.0}}, {m0, m1});
}

inline FiniteMMSpace complete_graph(int n) {
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 1.0));
  for (int i = 0; i < n; ++i) dist[i][i] = 0.0;
  return make_space(std::move(dist), std::vector<double>(n, 1.0 / n));
}

// Random points in the unit cube with Euclidean distances; masses normalized
// from uniform draws. Triangle inequality holds by construction.
inline FiniteMMSpace random_euclidean_space(int n, std::uint64_t seed, int dim = 3,
                                            bool uniform_mass = false) {
  mminv::Rng rng(seed);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (double& c : p) c = rng.next_double();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (int k = 0; k < dim; ++k) sum += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      dist[i][j] = dist[j][i] = std::sqrt(sum);
    }
  std::vector<double> mass(n);
  if (uniform_mass) {
    std::fill(mass.begin(), mass.end(), 1.0 / n);
  } else {
    double total = 0.0;
    for (double& m : mass) {
      m = rng.uniform(0.2, 1.0);
      total += m;
    }
    for (double& m : mass) m /= total;
  }
  return make_space(std::move(dist), std::move(mass));
}

// Random masses over a small common denominator (exact rationals).
inline FiniteMMSpace random_rational_space(int n, std::uint64_t seed, int denominator) {
  FiniteMMSpace s = random_euclidean_space(n, seed, 3, true);
  mminv::Rng rng(seed ^ 0x9e3779b9ULL);
  std::vector<int> units(n, 1);
  int left = denominator - n;
  while (left > 0) {
    ++units[rng.next_int(0, n - 1)];
    --left;
  }
  for (int i = 0; i < n; ++i) s.mass[i] = static_cast<double>(units[i]) / denominator;
  return s;
}

inline RealMeasure random_measure(int atoms, std::uint64_t seed) {
  mminv::Rng rng(seed);
  std::vector<std::pair<double, double>> list;
  double total = 0.0;
  for (int i = 0; i < atoms; ++i) {
    list.emplace_back(rng.uniform(-2.0, 2.0), rng.uniform(0.1, 1.0));
    total += list.back().second;
  }
  for (auto& [p, w] : list) w /= total;
  return RealMeasure::from_atoms(std::move(list));
}

// ---- independent oracles (test-only, no shared code path) ----

// Partial diameter by full subset enumeration.
inline double partial_diam_brute(const RealMeasure& m, double alpha,
                                 double mass_tol = 1e-12) {
  const int n = m.size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double mass = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1u) {
        mass += m.weight[i];
        lo = std::min(lo, m.position[i]);
        hi = std::max(hi, m.position[i]);
      }
    if (mass >= alpha - mass_tol) best = std::min(best, hi - lo);
  }
  return best;
}

// Separation distance by unrestricted (possibly overlapping) subset triples.
inline double sep_brute_nondisjoint(const FiniteMMSpace& space,
                                    const std::vector<double>& kappas,
                                    double mass_tol = 1e-12) {
  const int n = space.size();
  const int sets = static_cast<int>(kappas.size());
  const unsigned limit = 1u << n;

  std::vector<double> subset_mass(limit, 0.0);
  for (unsigned mask = 1; mask < limit; ++mask) {
    const int low = std::countr_zero(mask);
    subset_mass[mask] = subset_mass[mask & (mask - 1)] + space.mass[low];
  }
  std::vector<std::vector<unsigned>> feasible(sets);
  for (int s = 0; s < sets; ++s)
    for (unsigned mask = 1; mask < limit; ++mask)
      if (subset_mass[mask] >= kappas[s] - mass_tol) feasible[s].push_back(mask);
  for (int s = 0; s < sets; ++s)
    if (feasible[s].empty()) return 0.0;

  std::vector<std::vector<double>> setdist(limit, std::vector<double>(limit, 0.0));
  for (unsigned a = 1; a < limit; ++a)
    for (unsigned b = 1; b < limit; ++b) {
      double d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        if ((a >> i) & 1u)
          for (int j = 0; j < n; ++j)
            if ((b >> j) & 1u) d = std::min(d, space.dist[i][j]);
      setdist[a][b] = d;
    }

  double best = 0.0;
  std::vector<unsigned> pick(sets);
  std::function<void(int, double)> rec = [&](int s, double cur) {
    if (cur <= best) return;
    if (s == sets) {
      best = std::max(best, cur);
      return;
    }
    for (unsigned mask : feasible[s]) {
      double next = cur;
      for (int t = 0; t < s; ++t) next = std::min(next, setdist[pick[t]][mask]);
      if (next <= best) continue;
      pick[s] = mask;
      rec(s + 1, next);
    }
  };
  rec(0, std::numeric_limits<double>::infinity());
  return best;
}

// Direct check of the Prokhorov condition at one eps, straight from the
// definition with strict neighborhoods.
inline bool prokhorov_eps_feasible(const mminv::AmbientMetric& ambient,
                                   const std::vector<double>& mu,
                                   const std::vector<double>& nu, double eps) {
  const int n = ambient.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double nu_mass = 0.0;
    double mu_nbhd = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) nu_mass += nu[i];
      double to_set = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if ((mask >> j) & 1u) to_set = std::min(to_set, ambient.dist[i][j]);
      if (to_set < eps) mu_nbhd += mu[i];
    }
    if (mu_nbhd < nu_mass - eps - 1e-15) return false;
  }
  return true;
}

}  // namespace testutil

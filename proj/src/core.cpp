#include "mminv/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mminv {

RealMeasure RealMeasure::from_atoms(std::vector<std::pair<double, double>> atoms) {
  for (const auto& [pos, w] : atoms) {
    if (!(w > 0.0)) throw std::invalid_argument("measure atom with nonpositive mass");
    if (!std::isfinite(pos)) throw std::invalid_argument("measure atom at non-finite position");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  RealMeasure m;
  for (const auto& [pos, w] : atoms) {
    if (!m.position.empty() && m.position.back() == pos) {
      m.weight.back() += w;
    } else {
      m.position.push_back(pos);
      m.weight.push_back(w);
    }
  }
  return m;
}

namespace {

std::string index_pair(int i, int j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

}  // namespace

ValidationReport validate_space(const FiniteMMSpace& space, double mass_tol) {
  ValidationReport report;
  const int n = space.size();

  if (n == 0) {
    report.violations.push_back({"nonempty", {}, "space has no points"});
    return report;
  }
  if (static_cast<int>(space.dist.size()) != n) {
    report.violations.push_back({"shape", {}, "distance matrix row count != point count"});
    return report;
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(space.dist[i].size()) != n) {
      report.violations.push_back({"shape", {i}, "distance matrix is not square"});
      return report;
    }
  }
  if (!space.labels.empty() && static_cast<int>(space.labels.size()) != n)
    report.violations.push_back({"shape", {}, "label count != point count"});

  double mass_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(space.mass[i] > 0.0)) {
      std::ostringstream os;
      os << "mass[" << i << "] = " << space.mass[i] << " is not strictly positive";
      report.violations.push_back({"positive mass", {i}, os.str()});
    }
    mass_sum += space.mass[i];
  }
  if (std::fabs(mass_sum - 1.0) > mass_tol) {
    std::ostringstream os;
    os << "mass sum " << mass_sum << " != 1";
    report.violations.push_back({"mass sum", {}, os.str()});
  }

  for (int i = 0; i < n; ++i) {
    const double dii = space.dist[i][i];
    if (!(dii == 0.0)) {
      std::ostringstream os;
      os << "dist[" << i << "][" << i << "] = " << dii << " != 0";
      report.violations.push_back({"zero diagonal", {i}, os.str()});
    }
    for (int j = i + 1; j < n; ++j) {
      const double dij = space.dist[i][j];
      const double dji = space.dist[j][i];
      const bool both_inf = is_infinite(dij) && is_infinite(dji);
      if (!both_inf && std::fabs(dij - dji) > 1e-12 * std::max(1.0, std::fabs(dij))) {
        report.violations.push_back({"symmetry", {i, j}, "dist" + index_pair(i, j) + " != dist" + index_pair(j, i)});
      }
      if (!is_infinite(dij) && dij < 0.0)
        report.violations.push_back({"nonnegative", {i, j}, "negative distance at " + index_pair(i, j)});
    }
  }

  // Triangle inequality with infinity absorbing. Tolerance scales with the
  // magnitudes involved so Euclidean inputs survive rounding.
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      const double dik = space.dist[i][k];
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double lhs_gap = space.dist[i][j];
        const double rhs_gap = space.dist[j][k];
        if (is_infinite(lhs_gap) || is_infinite(rhs_gap)) continue;  // rhs infinite, holds
        const double bound = lhs_gap + rhs_gap;
        const double tol = 1e-12 * std::max(1.0, bound);
        if (is_infinite(dik) || dik > bound + tol) {
          std::ostringstream os;
          os << "triangle (" << i << "," << j << "," << k << ")";
          report.violations.push_back({"triangle", {i, j, k}, os.str()});
        }
      }
    }
  }
  return report;
}

FiniteMMSpace scale_space(const FiniteMMSpace& space, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("scale factor must be a positive real");
  FiniteMMSpace out = space;
  for (auto& row : out.dist)
    for (double& d : row) d *= t;  // inf * t == inf
  return out;
}

FiniteMMSpace truncate_space(const FiniteMMSpace& space, double cap) {
  if (!(cap > 0.0) || !std::isfinite(cap))
    throw std::invalid_argument("truncation level must be a positive real");
  FiniteMMSpace out = space;
  const int n = out.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && out.dist[i][j] > cap) out.dist[i][j] = cap;
  return out;
}

RealMeasure pushforward_to_line(const FiniteMMSpace& space, const LipschitzFunction& f) {
  if (static_cast<int>(f.values.size()) != space.size())
    throw std::invalid_argument("observable length does not match point count");
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(space.size());
  for (int i = 0; i < space.size(); ++i) atoms.emplace_back(f.values[i], space.mass[i]);
  return RealMeasure::from_atoms(std::move(atoms));
}

double partial_diameter_1d(const RealMeasure& m, double alpha, double mass_tol) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0,1]");
  const int n = m.size();
  if (n == 0) throw std::invalid_argument("empty measure");

  const double need = alpha - mass_tol;
  double best = kInfiniteDistance;
  double window = 0.0;
  int j = -1;
  for (int i = 0; i < n; ++i) {
    if (j < i - 1) {
      j = i - 1;
      window = 0.0;
    }
    while (window < need && j + 1 < n) window += m.weight[++j];
    if (window < need) break;  // no window starting at i or beyond can reach alpha
    const double len = m.position[j] - m.position[i];
    if (len < best) best = len;  // strict: leftmost witness wins ties
    window -= m.weight[i];
  }
  if (is_infinite(best)) {
    // Total mass below alpha beyond tolerance; for probability measures this
    // cannot happen with alpha <= 1.
    throw std::invalid_argument("measure has total mass below alpha");
  }
  return best;
}

namespace {

struct SubsetDiamSearch {
  const FiniteMMSpace& space;
  double need;
  double best = kInfiniteDistance;
  std::vector<int> order;        // points by descending mass
  std::vector<double> suffix;    // total mass of order[k..]
  std::vector<int> chosen;

  explicit SubsetDiamSearch(const FiniteMMSpace& s, double alpha, double mass_tol)
      : space(s), need(alpha - mass_tol) {
    const int n = s.size();
    order.resize(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return s.mass[a] > s.mass[b] || (s.mass[a] == s.mass[b] && a < b); });
    suffix.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] + s.mass[order[k]];
  }

  void run(int k, double chosen_mass, double chosen_diam) {
    if (chosen_diam >= best) return;
    if (chosen_mass >= need) {
      best = chosen_diam;
      return;
    }
    if (k == static_cast<int>(order.size())) return;
    if (chosen_mass + suffix[k] < need) return;

    const int p = order[k];
    double diam_with = chosen_diam;
    for (int q : chosen) {
      const double d = space.dist[p][q];
      if (d > diam_with) diam_with = d;
    }
    chosen.push_back(p);
    run(k + 1, chosen_mass + space.mass[p], diam_with);
    chosen.pop_back();
    run(k + 1, chosen_mass, chosen_diam);
  }
};

}  // namespace

double partial_diameter_space(const FiniteMMSpace& space, double alpha,
                              const PartialDiamOptions& options) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0,1]");
  if (space.size() > options.exact_cap) {
    std::ostringstream os;
    os << "partial_diameter_space exact mode is capped at " << options.exact_cap
       << " points; got " << space.size();
    throw CapacityError(os.str());
  }
  SubsetDiamSearch search(space, alpha, options.mass_tol);
  search.run(0, 0.0, 0.0);
  return search.best;
}

}  // namespace mminv

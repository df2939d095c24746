#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mminv {

// Extended distances use the IEEE infinity directly, never large sentinels,
// so truncation min(d, D) is exact.
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

// Absolute tolerance for all mass comparisons.
inline constexpr double kMassTolerance = 1e-12;

inline bool is_infinite(double d) { return std::isinf(d); }

// A solver was asked for more than its configured exhaustive budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input is outside the mathematical domain of the operation
// (e.g. infinite distances fed to a solver that requires truncation first).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite (possibly extended) metric measure space: points with a symmetric
// extended distance matrix, zero diagonal, and strictly positive masses
// summing to one. Zero off-diagonal distances are allowed (needed for
// refinements that split a point into coincident copies).
struct FiniteMMSpace {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> dist;
  std::vector<double> mass;

  int size() const { return static_cast<int>(mass.size()); }

  double distance(int i, int j) const { return dist[i][j]; }

  bool has_infinite_distance() const {
    for (const auto& row : dist)
      for (double d : row)
        if (is_infinite(d)) return true;
    return false;
  }

  // Largest finite entry of the distance matrix (0 for a one-point space).
  double max_finite_distance() const {
    double m = 0.0;
    for (const auto& row : dist)
      for (double d : row)
        if (!is_infinite(d) && d > m) m = d;
    return m;
  }

  static FiniteMMSpace uniform(std::vector<std::vector<double>> distances) {
    FiniteMMSpace s;
    const int n = static_cast<int>(distances.size());
    s.dist = std::move(distances);
    s.mass.assign(n, 1.0 / n);
    s.labels.reserve(n);
    for (int i = 0; i < n; ++i) s.labels.push_back("p" + std::to_string(i));
    return s;
  }
};

// Finite atomic measure on the real line. Atoms are kept sorted with
// strictly increasing positions; duplicates are merged on construction
// (mass added exactly, no renormalization).
struct RealMeasure {
  std::vector<double> position;
  std::vector<double> weight;

  int size() const { return static_cast<int>(position.size()); }

  double total_mass() const {
    double s = 0.0;
    for (double w : weight) s += w;
    return s;
  }

  static RealMeasure from_atoms(std::vector<std::pair<double, double>> atoms);
};

// Strictly increasing sampling points in (0,1).
struct KappaGrid {
  std::vector<double> values;

  KappaGrid() = default;
  explicit KappaGrid(std::vector<double> v) : values(std::move(v)) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0 && values[i] < 1.0))
        throw std::invalid_argument("kappa grid entry outside (0,1)");
      if (i > 0 && !(values[i] > values[i - 1]))
        throw std::invalid_argument("kappa grid not strictly increasing");
    }
  }

  int size() const { return static_cast<int>(values.size()); }
};

// Real values on the points of a space, feasible for the 1-Lipschitz
// constraint |v_i - v_j| <= d(i,j) on finite-distance pairs.
struct LipschitzFunction {
  std::vector<double> values;

  // Largest constraint violation over finite-distance pairs (0 when feasible).
  double max_violation(const FiniteMMSpace& space) const {
    double worst = 0.0;
    const int n = space.size();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = space.dist[i][j];
        if (is_infinite(d)) continue;
        const double gap = std::fabs(values[i] - values[j]) - d;
        if (gap > worst) worst = gap;
      }
    return worst;
  }

  bool feasible(const FiniteMMSpace& space, double tol = 1e-9) const {
    return max_violation(space) <= tol;
  }
};

// Assignment of points to N+1 labeled sets plus "unused".
struct SepWitness {
  static constexpr int kUnused = -1;

  std::vector<int> assignment;
  std::vector<double> kappas;

  // Smallest distance between two differently labeled points
  // (infinity when some label pair has no finite cross distance).
  double min_pairwise_distance(const FiniteMMSpace& space) const {
    double best = kInfiniteDistance;
    const int n = space.size();
    for (int i = 0; i < n; ++i) {
      if (assignment[i] == kUnused) continue;
      for (int j = i + 1; j < n; ++j) {
        if (assignment[j] == kUnused || assignment[j] == assignment[i]) continue;
        if (space.dist[i][j] < best) best = space.dist[i][j];
      }
    }
    return best;
  }

  std::vector<double> label_masses(const FiniteMMSpace& space) const {
    std::vector<double> m(kappas.size(), 0.0);
    for (int i = 0; i < space.size(); ++i)
      if (assignment[i] != kUnused) m[assignment[i]] += space.mass[i];
    return m;
  }

  bool sound(const FiniteMMSpace& space, double value, double mass_tol = kMassTolerance) const {
    const auto m = label_masses(space);
    for (std::size_t i = 0; i < kappas.size(); ++i)
      if (m[i] < kappas[i] - mass_tol) return false;
    return min_pairwise_distance(space) >= value;
  }
};

struct Violation {
  std::string axiom;
  std::vector<int> indices;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

}  // namespace mminv

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mminv/types.hpp"

namespace mminv {

// Finite ambient metric: the distance matrix alone, finite entries.
struct AmbientMetric {
  std::vector<std::vector<double>> dist;

  int size() const { return static_cast<int>(dist.size()); }

  static AmbientMetric from_space(const FiniteMMSpace& space) { return {space.dist}; }

  static AmbientMetric line(const std::vector<double>& positions);
};

enum class ProkhorovMethod { automatic, subset, flow };

// Prokhorov distance between two probability vectors on a common ambient.
// Symmetric by construction (max of the two one-sided infima).
double prokhorov(const AmbientMetric& ambient, const std::vector<double>& mu,
                 const std::vector<double>& nu,
                 ProkhorovMethod method = ProkhorovMethod::automatic);

// Prokhorov distance between two measures on the real line.
double prokhorov_line(const RealMeasure& mu, const RealMeasure& nu,
                      ProkhorovMethod method = ProkhorovMethod::automatic);

// Smallest eps >= 0 with mass{ x : d(f(x), g(x)) > eps } <= eps, where f, g
// are point maps from a common base into the ambient.
double me_distance(const std::vector<double>& base_mass, const std::vector<int>& f,
                   const std::vector<int>& g, const AmbientMetric& target);

struct BoxOptions {
  int refinement_cap = 64;   // largest admissible common mass denominator
  int exhaustive_cap = 8;    // refined size searched by full permutation sweep
  int restarts = 32;         // local-search restarts beyond the cap
  int swap_rounds = 200;
  std::uint64_t seed = 1;
  double mass_tol = kMassTolerance;
};

struct BoxResult {
  double upper_bound = 0.0;
  bool exhaustive = false;      // exact over the refined-permutation class
  double rounding_error = 0.0;  // mass rationalization slack added to the bound
  int refinement = 1;           // common denominator used
  std::vector<int> permutation; // refined index alignment witness
  std::string caveat;
};

// Upper bound on the box distance via permutations of common-denominator
// refinements with an eps-fraction discard.
BoxResult box_upper(const FiniteMMSpace& x, const FiniteMMSpace& y,
                    const BoxOptions& options = {});

// Atomic measure on R^N, atoms under the l-infinity metric.
struct PointMeasureND {
  std::vector<std::vector<double>> position;
  std::vector<double> weight;

  int size() const { return static_cast<int>(weight.size()); }
};

struct MeasurementSample {
  int dimension = 1;
  double radius = 0.0;  // infinity = no clamping
  std::uint64_t seed = 0;
  std::vector<PointMeasureND> measures;
};

// `count` pushforwards of the space measure under sampled 1-Lipschitz maps
// into (R^N, l-inf), re-centered and clamped into the R-box. The sample
// stream is prefix-stable in `count` and always starts with the constant map
// and the single-anchor distance maps.
MeasurementSample measurement_sample(const FiniteMMSpace& space, int dimension,
                                     double radius, int count, std::uint64_t seed);

// Hausdorff distance (over the Prokhorov metric on merged finite ambients)
// between two sets of measures on R^N. The measurement classes are closed
// under translation, so the directed infima also scan shifted candidates;
// shifts that would leave the radius box are skipped.
double hausdorff_prokhorov(const std::vector<PointMeasureND>& a,
                           const std::vector<PointMeasureND>& b,
                           double radius = kInfiniteDistance);

struct HausdorffEstimate {
  double value = 0.0;
  std::string kind;  // "lower_bound" | "upper_bound" | "estimate"
  std::vector<std::string> caveats;
  int dimension = 1;
  int count = 0;
  std::uint64_t seed = 0;
};

// Sampled d_H(M(X;N), M(Y;N)) / N, a sampling-underestimated lower-bound
// proxy for the observable distance. Monotone nondecreasing in `count`
// (running maximum over sample prefixes).
HausdorffEstimate dconc_lower_estimate(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                       int dimension, int count, std::uint64_t seed);

struct RhoREstimate {
  double value = 0.0;
  double truncation_bound = 0.0;  // bound on the discarded series tail
  int n_max = 3;
  std::string kind = "estimate";
  std::vector<std::string> caveats;
};

// Truncated weighted series of sampled (N, NR)-measurement Hausdorff gaps.
RhoREstimate rho_R_estimate(const FiniteMMSpace& x, const FiniteMMSpace& y, double radius,
                            int n_max, int count, std::uint64_t seed);

struct DPDiamReport {
  bool precondition_ok = false;  // d_P(mu, nu) < eps
  double dp = 0.0;
  double lhs = 0.0;  // diam(mu; 1-(kappa+eps))
  double rhs = 0.0;  // diam(nu; 1-kappa) + 2 eps
  bool holds = false;
};

DPDiamReport check_dP_diam(const RealMeasure& mu, const RealMeasure& nu, double kappa,
                           double eps);

}  // namespace mminv

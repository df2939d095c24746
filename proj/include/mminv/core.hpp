#pragma once

#include "mminv/types.hpp"

namespace mminv {

// Checks the space axioms; an empty report means all of them hold.
// Each violation names the axiom and the witnessing indices.
ValidationReport validate_space(const FiniteMMSpace& space,
                                double mass_tol = kMassTolerance);

// Metric scaled by t > 0, masses unchanged. Infinity stays infinity.
FiniteMMSpace scale_space(const FiniteMMSpace& space, double t);

// Distances capped at D > 0; the result is a genuine (finite) metric.
FiniteMMSpace truncate_space(const FiniteMMSpace& space, double cap);

// Pushforward of the space measure under a real observable: one atom per
// distinct value, carrying the summed mass of its preimage.
RealMeasure pushforward_to_line(const FiniteMMSpace& space,
                                const LipschitzFunction& f);

// Smallest length of a closed interval of m-mass >= alpha, alpha in (0,1].
// Sliding window over the sorted atoms; ties resolved by the leftmost window.
double partial_diameter_1d(const RealMeasure& m, double alpha,
                           double mass_tol = kMassTolerance);

struct PartialDiamOptions {
  int exact_cap = 20;  // max point count for subset enumeration
  double mass_tol = kMassTolerance;
};

// Smallest diameter of a subset of mass >= alpha inside the space itself,
// by subset enumeration with branch-and-bound pruning on the incumbent.
// May return infinity for extended spaces.
double partial_diameter_space(const FiniteMMSpace& space, double alpha,
                              const PartialDiamOptions& options = {});

}  // namespace mminv

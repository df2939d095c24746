#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "mminv/asymptotics.hpp"
#include "mminv/invariants.hpp"
#include "mminv/metrics.hpp"
#include "mminv/order.hpp"
#include "mminv/types.hpp"

namespace mminv {

// Space file format: {"labels":[...],"dist":[[...]],"mass":[...]},
// with the string token "inf" for infinite distances.
nlohmann::json space_to_json(const FiniteMMSpace& space);
FiniteMMSpace space_from_json(const nlohmann::json& j);
FiniteMMSpace load_space(const std::string& path);

// RealMeasure format: {"atoms":[[pos,mass],...]}.
nlohmann::json measure_to_json(const RealMeasure& m);
RealMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json validation_report_to_json(const ValidationReport& report);
nlohmann::json obs_result_to_json(const ObsDiamResult& result, SolverMode mode,
                                  std::uint64_t seed);
nlohmann::json sep_result_to_json(const SepResult& result);
nlohmann::json profile_to_json(const InvariantProfile& profile);
nlohmann::json witness_to_json(const DominationWitness& witness);
nlohmann::json measurement_sample_to_json(const MeasurementSample& sample);
nlohmann::json box_result_to_json(const BoxResult& result);
nlohmann::json hausdorff_estimate_to_json(const HausdorffEstimate& estimate);
nlohmann::json family_run_to_json(const FamilyRun& run);

// CSV schema: family,n,kappa,obs_diam,sep_symmetric,mode
std::string family_run_to_csv(const FamilyRun& run);

nlohmann::json phase_result_to_json(const PhaseResult& result);
nlohmann::json verdict_to_json(const Verdict& verdict);

}  // namespace mminv

#include "mminv/serialize.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace mminv {

using nlohmann::json;

namespace {

json distance_to_json(double d) {
  if (is_infinite(d)) return json("inf");
  return json(d);
}

double distance_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfiniteDistance;
    throw ParseError("unknown distance token: " + j.get<std::string>());
  }
  if (!j.is_number()) throw ParseError("distance entry is neither a number nor \"inf\"");
  return j.get<double>();
}

}  // namespace

json space_to_json(const FiniteMMSpace& space) {
  json dist = json::array();
  for (const auto& row : space.dist) {
    json r = json::array();
    for (double d : row) r.push_back(distance_to_json(d));
    dist.push_back(std::move(r));
  }
  return json{{"labels", space.labels}, {"dist", std::move(dist)}, {"mass", space.mass}};
}

FiniteMMSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dist") || !j.contains("mass"))
    throw ParseError("space file needs \"dist\" and \"mass\"");
  FiniteMMSpace space;
  if (j.contains("labels")) space.labels = j.at("labels").get<std::vector<std::string>>();
  space.mass = j.at("mass").get<std::vector<double>>();
  for (const auto& row : j.at("dist")) {
    std::vector<double> r;
    for (const auto& entry : row) r.push_back(distance_from_json(entry));
    space.dist.push_back(std::move(r));
  }
  if (space.labels.empty())
    for (std::size_t i = 0; i < space.mass.size(); ++i)
      space.labels.push_back("p" + std::to_string(i));
  return space;
}

FiniteMMSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open space file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what());
  }
  return space_from_json(j);
}

json measure_to_json(const RealMeasure& m) {
  json atoms = json::array();
  for (int i = 0; i < m.size(); ++i) atoms.push_back(json::array({m.position[i], m.weight[i]}));
  return json{{"atoms", std::move(atoms)}};
}

RealMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms")) throw ParseError("measure file needs \"atoms\"");
  std::vector<std::pair<double, double>> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != 2) throw ParseError("measure atom must be [pos, mass]");
    atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
  }
  return RealMeasure::from_atoms(std::move(atoms));
}

json validation_report_to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations)
    violations.push_back(json{{"axiom", v.axiom}, {"indices", v.indices}, {"detail", v.detail}});
  return json{{"valid", report.ok()}, {"violations", std::move(violations)}};
}

json obs_result_to_json(const ObsDiamResult& result, SolverMode mode, std::uint64_t seed) {
  return json{{"value", result.value},
              {"witness", result.witness.values},
              {"mode", to_string(mode)},
              {"resolution", result.resolution},
              {"nodes", result.nodes},
              {"seed", seed}};
}

json sep_result_to_json(const SepResult& result) {
  json j{{"value", result.value}, {"nodes", result.nodes}};
  if (result.witness.has_value()) {
    j["witness"] = json{{"assignment", result.witness->assignment},
                        {"kappas", result.witness->kappas}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json profile_to_json(const InvariantProfile& profile) {
  json obs = json::array();
  for (int k = 0; k < profile.kappa_grid.size(); ++k) {
    json entry{{"kappa", profile.kappa_grid.values[k]}};
    if (profile.obs_diam[k].has_value())
      entry["obs_diam"] = *profile.obs_diam[k];
    else
      entry["obs_diam"] = nullptr;
    obs.push_back(std::move(entry));
  }
  json sep = json::array();
  for (std::size_t t = 0; t < profile.sep_tuples.size(); ++t) {
    json entry{{"kappas", profile.sep_tuples[t]}};
    if (profile.sep_values[t].has_value())
      entry["sep"] = *profile.sep_values[t];
    else
      entry["sep"] = nullptr;
    sep.push_back(std::move(entry));
  }
  return json{{"obs_diam", std::move(obs)},
              {"sep", std::move(sep)},
              {"mode", to_string(profile.mode)},
              {"resolution", profile.resolution},
              {"seed", profile.seed},
              {"errors", profile.errors}};
}

json witness_to_json(const DominationWitness& witness) {
  return json{{"map", witness.map},
              {"refinement", witness.refinement},
              {"lipschitz_residual", witness.lipschitz_residual},
              {"mass_residual", witness.mass_residual}};
}

json measurement_sample_to_json(const MeasurementSample& sample) {
  json measures = json::array();
  for (const auto& m : sample.measures) {
    json atoms = json::array();
    for (int i = 0; i < m.size(); ++i)
      atoms.push_back(json{{"position", m.position[i]}, {"mass", m.weight[i]}});
    measures.push_back(std::move(atoms));
  }
  return json{{"dimension", sample.dimension},
              {"radius", std::isfinite(sample.radius) ? json(sample.radius) : json("inf")},
              {"seed", sample.seed},
              {"measures", std::move(measures)}};
}

json box_result_to_json(const BoxResult& result) {
  return json{{"value", result.upper_bound},
              {"kind", "upper_bound"},
              {"exhaustive", result.exhaustive},
              {"refinement", result.refinement},
              {"rounding_error", result.rounding_error},
              {"caveat", result.caveat}};
}

json hausdorff_estimate_to_json(const HausdorffEstimate& estimate) {
  return json{{"value", estimate.value},
              {"kind", estimate.kind},
              {"dimension", estimate.dimension},
              {"count", estimate.count},
              {"seed", estimate.seed},
              {"caveats", estimate.caveats}};
}

json family_run_to_json(const FamilyRun& run) {
  json profiles = json::array();
  for (std::size_t i = 0; i < run.profiles.size(); ++i) {
    json entry = profile_to_json(run.profiles[i]);
    entry["n"] = run.indices[i];
    profiles.push_back(std::move(entry));
  }
  return json{{"generator", to_string(run.spec.generator)},
              {"n_min", run.spec.n_min},
              {"n_max", run.spec.n_max},
              {"stride", run.spec.stride},
              {"scale", run.spec.scale},
              {"seed", run.spec.seed},
              {"mode", to_string(run.mode)},
              {"grid", run.grid.values},
              {"profiles", std::move(profiles)}};
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const int written = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, buf + written);
}

}  // namespace

std::string family_run_to_csv(const FamilyRun& run) {
  std::string csv = "family,n,kappa,obs_diam,sep_symmetric,mode\n";
  const std::string family = to_string(run.spec.generator);
  const std::string mode = to_string(run.mode);

  // The symmetric pair column reports Sep(X;k,k) when that tuple was run.
  auto symmetric_index = [&](double kappa) -> int {
    for (std::size_t t = 0; t < run.sep_tuples.size(); ++t) {
      const auto& tuple = run.sep_tuples[t];
      if (tuple.size() == 2 && std::fabs(tuple[0] - kappa) <= 1e-12 &&
          std::fabs(tuple[1] - kappa) <= 1e-12)
        return static_cast<int>(t);
    }
    return -1;
  };

  for (std::size_t i = 0; i < run.profiles.size(); ++i) {
    const auto& profile = run.profiles[i];
    for (int k = 0; k < run.grid.size(); ++k) {
      const double kappa = run.grid.values[k];
      csv += family + "," + std::to_string(run.indices[i]) + "," + format_double(kappa) + ",";
      csv += profile.obs_diam[k].has_value() ? format_double(*profile.obs_diam[k]) : "";
      csv += ",";
      const int t = symmetric_index(kappa);
      if (t >= 0 && profile.sep_values[t].has_value())
        csv += format_double(*profile.sep_values[t]);
      csv += "," + mode + "\n";
    }
  }
  return csv;
}

json phase_result_to_json(const PhaseResult& result) {
  json zero = json::array();
  for (const auto& [n, kappa] : result.zero_witnesses)
    zero.push_back(json{{"n", n}, {"kappa", kappa}});
  json refs = json::object();
  for (const auto& [ref, ok] : result.per_ref_verdict) refs[format_double(ref)] = ok;
  return json{{"positive", result.positive},
              {"reason", result.reason},
              {"max_ratio", result.max_ratio},
              {"r_n", result.r_n},
              {"c_n", result.c_n},
              {"zero_witnesses", std::move(zero)},
              {"per_ref", std::move(refs)}};
}

json verdict_to_json(const Verdict& verdict) {
  const char* kind = verdict.kind == VerdictKind::positive
                         ? "positive"
                         : (verdict.kind == VerdictKind::negative ? "negative" : "inconclusive");
  json evidence = json::array();
  for (const auto& e : verdict.evidence)
    evidence.push_back(json{{"description", e.description}, {"values", e.values}});
  return json{{"verdict", kind}, {"reason", verdict.reason}, {"evidence", std::move(evidence)}};
}

}  // namespace mminv

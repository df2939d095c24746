#include "mminv/mminv.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "mminv/asymptotics.hpp"
#include "mminv/core.hpp"
#include "mminv/invariants.hpp"
#include "mminv/metrics.hpp"
#include "mminv/order.hpp"
#include "mminv/rng.hpp"
#include "mminv/serialize.hpp"

using nlohmann::json;

struct mminv_space {
  mminv::FiniteMMSpace value;
};

namespace {

thread_local std::string g_last_error;

char* alloc_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
mminv_status guard(Fn&& fn) {
  try {
    fn();
    return MMINV_OK;
  } catch (const mminv::ParseError& e) {
    g_last_error = e.what();
    return MMINV_ERR_PARSE;
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return MMINV_ERR_PARSE;
  } catch (const mminv::CapacityError& e) {
    g_last_error = e.what();
    return MMINV_ERR_CAPACITY;
  } catch (const mminv::DomainError& e) {
    g_last_error = e.what();
    return MMINV_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return MMINV_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MMINV_ERR_INTERNAL;
  }
}

json parse_options(const char* options_json) {
  if (options_json == nullptr || *options_json == '\0') return json::object();
  return json::parse(options_json);
}

mminv::SolverMode mode_from_json(const json& options, mminv::SolverMode fallback) {
  if (!options.contains("mode")) return fallback;
  const std::string mode = options.at("mode").get<std::string>();
  if (mode == "exact") return mminv::SolverMode::exact;
  if (mode == "grid") return mminv::SolverMode::grid;
  if (mode == "heuristic") return mminv::SolverMode::heuristic;
  throw std::invalid_argument("unknown solver mode: " + mode);
}

mminv::ProfileOptions profile_options_from_json(const json& options) {
  mminv::ProfileOptions opts;
  if (options.contains("resolution")) opts.obs.resolution = options.at("resolution").get<double>();
  if (options.contains("exact_cap")) opts.obs.exact_cap = options.at("exact_cap").get<int>();
  if (options.contains("seed")) opts.heuristic.seed = options.at("seed").get<std::uint64_t>();
  if (options.contains("restarts")) opts.heuristic.restarts = options.at("restarts").get<int>();
  if (options.contains("max_anchors"))
    opts.heuristic.max_anchors = options.at("max_anchors").get<int>();
  if (options.contains("budget")) opts.sep.node_budget = options.at("budget").get<std::uint64_t>();
  return opts;
}

}  // namespace

extern "C" {

const char* mminv_version(void) { return "0.1.0"; }

const char* mminv_last_error(void) { return g_last_error.c_str(); }

void mminv_string_free(char* s) { std::free(s); }

void mminv_space_free(mminv_space* space) { delete space; }

mminv_status mminv_space_from_json(const char* text, mminv_space** out) {
  if (text == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    json j = json::parse(text);
    auto space = std::make_unique<mminv_space>();
    space->value = mminv::space_from_json(j);
    *out = space.release();
  });
}

mminv_status mminv_space_to_json(const mminv_space* space, char** out_json) {
  if (space == nullptr || out_json == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] { *out_json = alloc_string(mminv::space_to_json(space->value).dump()); });
}

int mminv_space_size(const mminv_space* space) {
  return space == nullptr ? -1 : space->value.size();
}

mminv_status mminv_space_validate(const mminv_space* space, int* valid, char** report_json) {
  if (space == nullptr || valid == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    const mminv::ValidationReport report = mminv::validate_space(space->value);
    *valid = report.ok() ? 1 : 0;
    if (report_json != nullptr)
      *report_json = alloc_string(mminv::validation_report_to_json(report).dump());
  });
}

mminv_status mminv_space_scale(const mminv_space* space, double factor, mminv_space** out) {
  if (space == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    auto scaled = std::make_unique<mminv_space>();
    scaled->value = mminv::scale_space(space->value, factor);
    *out = scaled.release();
  });
}

mminv_status mminv_space_truncate(const mminv_space* space, double cap, mminv_space** out) {
  if (space == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    auto truncated = std::make_unique<mminv_space>();
    truncated->value = mminv::truncate_space(space->value, cap);
    *out = truncated.release();
  });
}

mminv_status mminv_obs_diam(const mminv_space* space, double kappa, const char* options_json,
                            double* value, char** report_json) {
  if (space == nullptr || value == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    const json options = parse_options(options_json);
    const mminv::SolverMode mode = mode_from_json(options, mminv::SolverMode::exact);
    const mminv::ProfileOptions opts = profile_options_from_json(options);
    mminv::ObsDiamResult result;
    if (mode == mminv::SolverMode::heuristic)
      result = mminv::obs_diam_heuristic(space->value, kappa, opts.heuristic);
    else
      result = mminv::obs_diam_exact(space->value, kappa, opts.obs);
    *value = result.value;
    if (report_json != nullptr)
      *report_json =
          alloc_string(mminv::obs_result_to_json(result, mode, opts.heuristic.seed).dump());
  });
}

mminv_status mminv_sep(const mminv_space* space, const double* kappas, int num_kappas,
                       const char* options_json, double* value, char** report_json) {
  if (space == nullptr || kappas == nullptr || value == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    const json options = parse_options(options_json);
    const mminv::ProfileOptions opts = profile_options_from_json(options);
    const std::vector<double> targets(kappas, kappas + num_kappas);
    const bool thresholds = options.value("method", std::string("exact")) == "thresholds";
    const mminv::SepResult result = thresholds
                                        ? mminv::sep_via_thresholds(space->value, targets, opts.sep)
                                        : mminv::sep_exact(space->value, targets, opts.sep);
    *value = result.value;
    if (report_json != nullptr)
      *report_json = alloc_string(mminv::sep_result_to_json(result).dump());
  });
}

mminv_status mminv_profile(const mminv_space* space, const char* options_json,
                           char** report_json) {
  if (space == nullptr || report_json == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    const json options = parse_options(options_json);
    std::vector<double> grid_values =
        options.value("grid", std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    std::vector<double> levels = options.value("sep_levels", std::vector<double>{0.1, 0.2, 0.3});
    const mminv::KappaGrid grid{grid_values};
    auto tuples = mminv::symmetric_sep_tuples(2, levels);
    for (auto& t : mminv::symmetric_sep_tuples(3, levels)) tuples.push_back(t);

    const mminv::SolverMode mode = mode_from_json(options, mminv::SolverMode::exact);
    const mminv::ProfileOptions opts = profile_options_from_json(options);
    const mminv::InvariantProfile profile =
        mminv::invariant_profile(space->value, grid, tuples, mode, opts);
    *report_json = alloc_string(mminv::profile_to_json(profile).dump());
  });
}

mminv_status mminv_prokhorov(const mminv_space* ambient, const double* mu, const double* nu,
                             int length, double* value) {
  if (ambient == nullptr || mu == nullptr || nu == nullptr || value == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    if (length != ambient->value.size())
      throw std::invalid_argument("mass vector length does not match the ambient");
    const std::vector<double> m(mu, mu + length), n(nu, nu + length);
    *value = mminv::prokhorov(mminv::AmbientMetric::from_space(ambient->value), m, n);
  });
}

namespace {

bool same_ambient(const mminv::FiniteMMSpace& x, const mminv::FiniteMMSpace& y) {
  if (x.size() != y.size()) return false;
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j) {
      const double a = x.dist[i][j], b = y.dist[i][j];
      if (mminv::is_infinite(a) != mminv::is_infinite(b)) return false;
      if (!mminv::is_infinite(a) && std::fabs(a - b) > 1e-12) return false;
    }
  return true;
}

json compare_report(const mminv::FiniteMMSpace& x, const mminv::FiniteMMSpace& y,
                    const json& options) {
  json report;
  const std::uint64_t seed = options.value("seed", std::uint64_t{1});
  const int count = options.value("count", 12);
  const int dimension = options.value("dimension", 1);
  report["seed"] = seed;
  report["options"] = options;

  if (same_ambient(x, y)) {
    report["prokhorov"] = mminv::prokhorov(mminv::AmbientMetric::from_space(x), x.mass, y.mass);
  } else {
    report["prokhorov"] = nullptr;
  }

  try {
    mminv::BoxOptions box_options;
    box_options.seed = seed;
    if (options.contains("refinement_cap"))
      box_options.refinement_cap = options.at("refinement_cap").get<int>();
    report["box_upper"] = mminv::box_result_to_json(mminv::box_upper(x, y, box_options));
  } catch (const std::exception& e) {
    report["box_upper"] = json{{"skipped", e.what()}};
  }

  auto domination_entry = [](const mminv::FiniteMMSpace& from, const mminv::FiniteMMSpace& to) {
    try {
      const mminv::DominationResult result = mminv::dominates_exact(from, to);
      json entry{{"dominates", result.dominates}, {"certified", result.certified}};
      if (result.witness.has_value()) entry["witness"] = mminv::witness_to_json(*result.witness);
      return entry;
    } catch (const std::exception& e) {
      return json{{"skipped", e.what()}};
    }
  };
  report["x_dominates_y"] = domination_entry(x, y);
  report["y_dominates_x"] = domination_entry(y, x);

  try {
    report["dconc_lower"] = mminv::hausdorff_estimate_to_json(
        mminv::dconc_lower_estimate(x, y, dimension, count, seed));
  } catch (const std::exception& e) {
    report["dconc_lower"] = json{{"skipped", e.what()}};
  }
  return report;
}

}  // namespace

mminv_status mminv_compare(const mminv_space* x, const mminv_space* y, const char* options_json,
                           char** report_json) {
  if (x == nullptr || y == nullptr || report_json == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    const json options = parse_options(options_json);
    *report_json = alloc_string(compare_report(x->value, y->value, options).dump());
  });
}

mminv_status mminv_family_run(const char* config_json, char** report_json, char** csv_out) {
  if (config_json == nullptr || report_json == nullptr) {
    g_last_error = "null argument";
    return MMINV_ERR_INVALID_ARGUMENT;
  }
  return guard([&] {
    const json config = json::parse(config_json);

    mminv::FamilySpec spec;
    spec.generator = mminv::generator_from_string(config.value("generator", std::string("complete_graph")));
    spec.n_min = config.value("n_min", 2);
    spec.n_max = config.value("n_max", 8);
    spec.stride = config.value("stride", 1);
    spec.scale = config.value("scale", 1.0);
    spec.gap = config.value("gap", 1.0);
    spec.lambda = config.value("lambda", 1.0);
    spec.dimension = config.value("dimension", 3);
    spec.cluster_points = config.value("cluster_points", 2);
    spec.seed = config.value("seed", std::uint64_t{1});
    spec.max_points = config.value("max_points", 4096);

    const mminv::KappaGrid grid{config.value(
        "grid", std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9})};
    const std::vector<double> levels =
        config.value("sep_levels", std::vector<double>{0.1, 0.2, 0.3});
    auto tuples = mminv::symmetric_sep_tuples(2, levels);
    for (auto& t : mminv::symmetric_sep_tuples(3, levels)) tuples.push_back(t);

    const mminv::SolverMode mode = mode_from_json(config, mminv::SolverMode::heuristic);
    mminv::ProfileOptions opts = profile_options_from_json(config);
    opts.heuristic.seed = mminv::Rng::derive(spec.seed, "family_profile");

    const mminv::FamilyRun run = mminv::run_family(spec, grid, tuples, mode, opts);
    json report = mminv::family_run_to_json(run);

    const json detectors = config.value("detectors", json::object());
    if (detectors.value("levy", false))
      report["levy"] = mminv::verdict_to_json(mminv::levy_trend(run));
    if (detectors.contains("dissipation")) {
      json entries = json::object();
      for (double delta : detectors.at("dissipation").get<std::vector<double>>()) {
        const mminv::DissipationVerdict v = mminv::dissipation_trend(run, delta);
        entries[std::to_string(delta)] =
            json{{"dissipates", v.dissipates}, {"weakly_dissipates", v.weakly_dissipates}};
      }
      report["dissipation"] = std::move(entries);
    }
    if (detectors.contains("phase")) {
      mminv::PhaseOptions phase;
      const json& p = detectors.at("phase");
      if (p.contains("kappa_refs"))
        phase.kappa_refs = p.at("kappa_refs").get<std::vector<double>>();
      if (p.contains("ratio_cap")) phase.ratio_cap = p.at("ratio_cap").get<double>();
      report["phase"] = mminv::phase_result_to_json(mminv::phase_transition_detect(run, phase));
    }
    if (detectors.contains("n_levy_max")) {
      std::vector<std::pair<int, mminv::FiniteMMSpace>> family;
      for (std::size_t i = 0; i < run.spaces.size(); ++i)
        family.emplace_back(run.indices[i], run.spaces[i]);
      const mminv::NLevyResult r =
          mminv::n_levy_classify(family, detectors.at("n_levy_max").get<int>());
      json entry{{"n_max", r.n_max}, {"notes", r.notes}};
      entry["n"] = r.n.has_value() ? json(*r.n) : json(nullptr);
      report["n_levy"] = std::move(entry);
    }

    *report_json = alloc_string(report.dump());
    if (csv_out != nullptr) *csv_out = alloc_string(mminv::family_run_to_csv(run));
  });
}

}  // extern "C"

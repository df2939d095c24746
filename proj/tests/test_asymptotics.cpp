#include <doctest.h>

#include "helpers.hpp"
#include "mminv/asymptotics.hpp"
#include "mminv/serialize.hpp"

#include <nlohmann/json.hpp>

using namespace mminv;
using namespace testutil;

namespace {

std::vector<std::pair<int, FiniteMMSpace>> constant_family(const FiniteMMSpace& space,
                                                           int count) {
  std::vector<std::pair<int, FiniteMMSpace>> family;
  for (int n = 1; n <= count; ++n) family.emplace_back(n, space);
  return family;
}

FamilyRun manual_run(const std::vector<std::pair<int, FiniteMMSpace>>& family,
                     const KappaGrid& grid, SolverMode mode,
                     const std::vector<std::vector<double>>& tuples = {}) {
  FamilyRun run;
  run.grid = grid;
  run.sep_tuples = tuples;
  run.mode = mode;
  for (const auto& [n, space] : family) {
    run.indices.push_back(n);
    run.spaces.push_back(space);
    run.profiles.push_back(invariant_profile(space, grid, tuples, mode));
  }
  return run;
}

}  // namespace

TEST_CASE("generators match their definitions and validate") {
  FamilySpec spec;

  spec.generator = Generator::complete_graph;
  const auto k4 = generate_space(spec, 4);
  CHECK(k4.size() == 4);
  CHECK(k4.dist[0][3] == 1.0);
  CHECK(k4.mass[0] == doctest::Approx(0.25));

  spec.generator = Generator::two_point;
  const auto pair = generate_space(spec, 7);
  CHECK(pair.size() == 2);
  CHECK(pair.dist[0][1] == 7.0);
  CHECK(pair.mass[0] == doctest::Approx(0.5));

  spec.generator = Generator::hypercube_hamming;
  const auto cube = generate_space(spec, 3);
  CHECK(cube.size() == 8);
  CHECK(cube.dist[0][7] == 3.0);

  spec.generator = Generator::cycle;
  const auto ring = generate_space(spec, 6);
  CHECK(ring.dist[0][3] == 3.0);
  CHECK(ring.dist[0][5] == 1.0);

  spec.generator = Generator::two_cluster;
  const auto clusters = generate_space(spec, 10);
  CHECK(clusters.size() == 4);
  CHECK(clusters.dist[0][1] == doctest::Approx(0.1));
  CHECK(clusters.dist[0][2] == doctest::Approx(1.0));

  for (Generator g : {Generator::complete_graph, Generator::hypercube_hamming, Generator::cycle,
                      Generator::interval_discretization, Generator::gaussian_line,
                      Generator::two_cluster, Generator::two_point,
                      Generator::random_euclidean}) {
    spec.generator = g;
    const auto space = generate_space(spec, 4);
    CHECK(validate_space(space).ok());
  }

  spec.generator = Generator::hypercube_hamming;
  spec.max_points = 64;
  CHECK_THROWS_AS(generate_space(spec, 12), CapacityError);
}

TEST_CASE("generators are deterministic in the spec") {
  FamilySpec spec;
  spec.generator = Generator::random_euclidean;
  spec.seed = 42;
  const auto a = generate_space(spec, 6);
  const auto b = generate_space(spec, 6);
  CHECK(a.dist == b.dist);
  spec.seed = 43;
  CHECK(generate_space(spec, 6).dist != a.dist);
}

TEST_CASE("gaussian_line reproduces the normal profile") {
  FamilySpec spec;
  spec.generator = Generator::gaussian_line;
  spec.lambda = 1.0;
  const auto gauss = generate_space(spec, 2001);

  LipschitzFunction identity;
  identity.values.resize(gauss.size());
  for (int i = 0; i < gauss.size(); ++i) identity.values[i] = gauss.dist[0][i];
  const auto measure = pushforward_to_line(gauss, identity);

  // Frozen targets: 2 * Phi^{-1}(1 - kappa/2) at kappa = 0.2, 0.5, 0.8.
  CHECK(partial_diameter_1d(measure, 0.8) == doctest::Approx(2.563).epsilon(0.01));
  CHECK(partial_diameter_1d(measure, 0.5) == doctest::Approx(1.349).epsilon(0.01));
  CHECK(partial_diameter_1d(measure, 0.2) == doctest::Approx(0.507).epsilon(0.04));
}

TEST_CASE("levy_trend on the spec examples") {
  const KappaGrid grid{{0.1, 0.3, 0.5, 0.7}};

  FamilySpec shrinking;
  shrinking.generator = Generator::complete_graph;
  shrinking.scaling = ScalingRule::inverse_index;
  shrinking.n_min = 4;
  shrinking.n_max = 32;
  shrinking.stride = 4;
  const auto levy = levy_trend(run_family(shrinking, grid, {}, SolverMode::heuristic));
  CHECK(levy.positive());

  const auto fixed = manual_run(constant_family(two_point(1.0), 8), grid, SolverMode::exact);
  CHECK_FALSE(levy_trend(fixed).positive());

  const auto single = manual_run(constant_family(one_point(), 8), grid, SolverMode::exact);
  CHECK(levy_trend(single).positive());
}

TEST_CASE("levy verdict is stable under joint rescaling") {
  const KappaGrid grid{{0.2, 0.5}};
  FamilySpec spec;
  spec.generator = Generator::complete_graph;
  spec.scaling = ScalingRule::inverse_index;
  spec.n_min = 4;
  spec.n_max = 24;
  spec.stride = 4;
  const auto base = run_family(spec, grid, {}, SolverMode::heuristic);

  FamilySpec scaled = spec;
  scaled.scale = 10.0;
  const auto big = run_family(scaled, grid, {}, SolverMode::heuristic);

  TrendOptions base_options;
  TrendOptions scaled_options;
  scaled_options.levy_threshold = base_options.levy_threshold * 10.0;
  CHECK(levy_trend(base, base_options).positive() ==
        levy_trend(big, scaled_options).positive());
}

TEST_CASE("n_levy_classify on the spec examples") {
  FamilySpec clusters;
  clusters.generator = Generator::two_cluster;
  clusters.n_min = 4;
  clusters.n_max = 40;
  clusters.stride = 4;
  const auto family = generate_family(clusters);
  const auto result = n_levy_classify(family, 3);
  REQUIRE(result.n.has_value());
  CHECK(*result.n == 2);

  const auto single = n_levy_classify(constant_family(one_point(), 8), 3);
  REQUIRE(single.n.has_value());
  CHECK(*single.n == 1);

  FamilySpec complete;
  complete.generator = Generator::complete_graph;
  complete.n_min = 4;
  complete.n_max = 40;
  complete.stride = 4;
  const auto unscaled = n_levy_classify(generate_family(complete), 3);
  CHECK_FALSE(unscaled.n.has_value());
}

TEST_CASE("dissipation_trend on the spec examples") {
  const KappaGrid grid{{0.5}};
  const auto tuples = symmetric_sep_tuples(2);

  FamilySpec complete;
  complete.generator = Generator::complete_graph;
  complete.n_min = 4;
  complete.n_max = 32;
  complete.stride = 4;
  const auto run = run_family(complete, grid, tuples, SolverMode::heuristic);
  const auto at_one = dissipation_trend(run, 1.0);
  CHECK(at_one.dissipates);
  CHECK(at_one.weakly_dissipates);

  FamilySpec blowup = complete;
  blowup.scaling = ScalingRule::linear_index;
  const auto grow = run_family(blowup, grid, tuples, SolverMode::heuristic);
  for (double delta : {0.5, 1.0, 5.0, 20.0}) CHECK(dissipation_trend(grow, delta).dissipates);

  // Three sets never fit on two points.
  FamilySpec pairs;
  pairs.generator = Generator::two_point;
  pairs.n_min = 1;
  pairs.n_max = 8;
  const auto triples = symmetric_sep_tuples(3);
  const auto pair_run = run_family(pairs, grid, triples, SolverMode::exact);
  CHECK_FALSE(dissipation_trend(pair_run, 0.5).weakly_dissipates);
}

TEST_CASE("phase_transition_detect is positive for complete graphs") {
  FamilySpec spec;
  spec.generator = Generator::complete_graph;
  spec.n_min = 4;
  spec.n_max = 32;
  const KappaGrid grid{{0.1, 0.2, 0.25, 0.3}};
  const auto run = run_family(spec, grid, {}, SolverMode::heuristic);

  PhaseOptions options;
  options.kappa_refs = {0.2, 0.25, 0.3};
  options.ratio_cap = 2.0 + 1e-9;
  const auto result = phase_transition_detect(run, options);
  CHECK(result.positive);
  CHECK(result.max_ratio <= 2.0 + 1e-9);
  for (double c : result.c_n) {
    CHECK(c >= 1.0 - 1e-9);
    CHECK(c <= 1.5 + 1e-9);
  }
}

TEST_CASE("phase_transition_detect rejects the two-point family") {
  FamilySpec spec;
  spec.generator = Generator::two_point;
  spec.n_min = 1;
  spec.n_max = 16;
  const KappaGrid grid{{0.25, 0.5, 0.75}};
  const auto run = run_family(spec, grid, {}, SolverMode::exact);

  PhaseOptions options;
  options.kappa_refs = {0.25};
  const auto result = phase_transition_detect(run, options);
  CHECK_FALSE(result.positive);
  bool witness_at_three_quarters = false;
  for (const auto& [n, kappa] : result.zero_witnesses)
    if (kappa == 0.75) witness_at_three_quarters = true;
  CHECK(witness_at_three_quarters);
}

TEST_CASE("phase_transition_detect rejects a Levy family via r_n = 0") {
  const KappaGrid grid{{0.25, 0.5}};
  const auto run = manual_run(constant_family(one_point(), 8), grid, SolverMode::exact);
  PhaseOptions options;
  options.kappa_refs = {0.25};
  const auto result = phase_transition_detect(run, options);
  CHECK_FALSE(result.positive);
}

TEST_CASE("positive phase verdict implies Levy and dissipation for rescalings") {
  FamilySpec spec;
  spec.generator = Generator::complete_graph;
  spec.n_min = 4;
  spec.n_max = 32;
  spec.stride = 4;
  const KappaGrid grid{{0.1, 0.2, 0.25, 0.3}};
  PhaseOptions options;
  options.kappa_refs = {0.25};
  const auto detect = phase_transition_detect(run_family(spec, grid, {}, SolverMode::heuristic),
                                              options);
  REQUIRE(detect.positive);
  const double c = detect.c_n.front();  // constant 1 for complete graphs

  FamilySpec shrink = spec;
  shrink.scale = c;
  shrink.scaling = ScalingRule::inverse_index;
  CHECK(levy_trend(run_family(shrink, grid, {}, SolverMode::heuristic)).positive());

  FamilySpec grow = spec;
  grow.scale = c;
  grow.scaling = ScalingRule::linear_index;
  const auto grow_run = run_family(grow, grid, symmetric_sep_tuples(2), SolverMode::heuristic);
  for (double delta : {0.5, 1.0, 5.0}) CHECK(dissipation_trend(grow_run, delta).dissipates);
}

TEST_CASE("limit_formula_check accepts the interval family") {
  FamilySpec spec;
  spec.generator = Generator::interval_discretization;
  std::vector<std::pair<int, FiniteMMSpace>> family;
  for (int n : {8, 16, 32, 64}) family.emplace_back(n, generate_space(spec, n));

  const KappaGrid grid{{0.25, 0.5}};
  std::vector<double> target{0.75, 0.5};  // ObsDiam of [0,1] is 1 - kappa
  const auto report = limit_formula_check(family, target, {}, {}, grid);
  CHECK(report.all_agree());
}

TEST_CASE("limit_formula_check accepts the gaussian family") {
  FamilySpec spec;
  spec.generator = Generator::gaussian_line;
  std::vector<std::pair<int, FiniteMMSpace>> family;
  for (int n : {101, 201, 401, 801}) family.emplace_back(n, generate_space(spec, n));

  const KappaGrid grid{{0.2, 0.5, 0.8}};
  // 2 * Phi^{-1}(1 - kappa/2), frozen from normal quantiles.
  std::vector<double> target{2.563, 1.349, 0.507};
  LimitCheckOptions options;
  options.tolerance = 0.08;  // quantile discretization plus eps extrapolation
  const auto report = limit_formula_check(family, target, {}, {}, grid, options);
  CHECK(report.all_agree());
}

TEST_CASE("limit_formula_check accepts a constant family against itself") {
  // Uniform masses keep the grid away from cumulative-mass boundaries.
  const auto space = random_euclidean_space(5, 97, 3, true);
  const auto family = constant_family(space, 6);
  const KappaGrid grid{{0.3, 0.6}};
  LimitCheckOptions options;
  options.mode = SolverMode::exact;
  options.profile.obs.resolution = space.max_finite_distance() / 256.0;
  std::vector<double> target;
  for (double kappa : grid.values)
    target.push_back(obs_diam_exact(space, kappa, options.profile.obs).value);
  const auto tuples = symmetric_sep_tuples(2, {0.2});
  std::vector<double> sep_target{sep_exact(space, tuples[0]).value};
  const auto report = limit_formula_check(family, target, tuples, sep_target, grid, options);
  CHECK(report.all_agree());
}

TEST_CASE("n_levy_limit_consistency on the spec examples") {
  FamilySpec clusters;
  clusters.generator = Generator::two_cluster;
  clusters.n_min = 4;
  clusters.n_max = 40;
  clusters.stride = 4;
  const auto family = generate_family(clusters);

  const auto limit = two_point(1.0);
  const auto good = n_levy_limit_consistency(family, limit, 2);
  CHECK(good.consistent());

  const auto bad = n_levy_limit_consistency(family, one_point(), 2);
  CHECK_FALSE(bad.consistent());

  const auto trivial =
      n_levy_limit_consistency(constant_family(one_point(), 8), one_point(), 1);
  CHECK(trivial.consistent());

  CHECK_THROWS_AS(n_levy_limit_consistency(family, complete_graph(3), 2),
                  std::invalid_argument);
}

TEST_CASE("n_levy_limit_consistency accepts extended candidates") {
  // Clusters separated by an infinite distance; truncation makes them finite.
  FamilySpec clusters;
  clusters.generator = Generator::two_cluster;
  clusters.gap = 1.0;
  clusters.n_min = 4;
  clusters.n_max = 40;
  clusters.stride = 4;
  auto family = generate_family(clusters);

  auto candidate = two_point(kInfiniteDistance);
  // Truncations at D <= 1 agree with the gap-1 family.
  const auto report = n_levy_limit_consistency(family, candidate, 2, {0.5, 1.0});
  CHECK(report.consistent());
}

TEST_CASE("family run serializes to the fixed CSV schema") {
  FamilySpec spec;
  spec.generator = Generator::two_point;
  spec.n_min = 1;
  spec.n_max = 3;
  const KappaGrid grid{{0.25, 0.5}};
  const auto run = run_family(spec, grid, symmetric_sep_tuples(2, {0.25}), SolverMode::exact);
  const std::string csv = family_run_to_csv(run);
  CHECK(csv.rfind("family,n,kappa,obs_diam,sep_symmetric,mode\n", 0) == 0);
  CHECK(csv.find("two_point,1,0.25,1,") != std::string::npos);
  const auto j = family_run_to_json(run);
  CHECK(j.at("profiles").size() == 3);
}

#include <doctest.h>

#include "helpers.hpp"
#include "mminv/asymptotics.hpp"
#include "mminv/invariants.hpp"

using namespace mminv;
using namespace testutil;

TEST_CASE("obs_diam_exact on the spec examples") {
  CHECK(obs_diam_exact(one_point(), 0.4).value == doctest::Approx(0.0));

  const auto pair = two_point(3.0);
  CHECK(obs_diam_exact(pair, 0.3).value == doctest::Approx(3.0));
  CHECK(obs_diam_exact(pair, 0.6).value == doctest::Approx(0.0));
  CHECK(obs_diam_exact(pair, 1.0).value == doctest::Approx(0.0));
  CHECK(obs_diam_exact(pair, 1.7).value == doctest::Approx(0.0));

  CHECK_THROWS_AS(obs_diam_exact(pair, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(obs_diam_exact(two_point(kInfiniteDistance), 0.3), DomainError);
  CHECK_THROWS_AS(obs_diam_exact(random_euclidean_space(8, 3), 0.3), CapacityError);
}

TEST_CASE("obs_diam_exact splits the complete graph into two clusters") {
  // Half the mass at each of two values achieves the full diameter for
  // kappa < 1/2; above 1/2 a single heavy atom collapses small windows.
  CHECK(obs_diam_exact(complete_graph(4), 0.3).value == doctest::Approx(1.0));
  CHECK(obs_diam_exact(complete_graph(4), 0.5).value == doctest::Approx(1.0 / 3.0));
  CHECK(obs_diam_exact(complete_graph(4), 0.8).value == doctest::Approx(0.0));
}

TEST_CASE("obs_diam exact witness reproduces the value and is feasible") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto space = random_euclidean_space(5, seed);
    Rng rng(seed * 3);
    const double kappa = rng.uniform(0.1, 0.9);
    const auto result = obs_diam_exact(space, kappa);
    CHECK(result.witness.feasible(space, 1e-9));
    CHECK(obs_objective(space, result.witness, kappa) == doctest::Approx(result.value));
  }
}

TEST_CASE("obs_diam_heuristic attains the exact value on a two-point space") {
  const auto result = obs_diam_heuristic(two_point(3.0), 0.3);
  CHECK(result.value == doctest::Approx(3.0));
  CHECK(result.witness.feasible(two_point(3.0), 1e-9));
}

TEST_CASE("obs_diam_heuristic reaches the interval bound") {
  // 64 uniform atoms on [0,1]; the identity observable gives 47/63.
  std::vector<std::vector<double>> dist(64, std::vector<double>(64, 0.0));
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) dist[i][j] = std::fabs(i - j) / 63.0;
  const auto interval = make_space(std::move(dist), std::vector<double>(64, 1.0 / 64));
  const auto result = obs_diam_heuristic(interval, 0.25);
  CHECK(result.value >= 0.70);
  // Certificate: the witness re-evaluates to the returned value exactly.
  CHECK(obs_objective(interval, result.witness, 0.25) == result.value);
}

TEST_CASE("heuristic stays below exact plus tolerance") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto space = random_euclidean_space(5, seed ^ 0x77ULL);
    Rng rng(seed * 131);
    const double kappa = rng.uniform(0.1, 0.9);
    const auto exact = obs_diam_exact(space, kappa);
    const auto heur = obs_diam_heuristic(space, kappa);
    CHECK(heur.value <= exact.value + 2.0 * exact.resolution + 1e-12);
  }
}

TEST_CASE("obs_diam_exact scales linearly") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto space = random_euclidean_space(4, seed ^ 0x1234ULL);
    const double kappa = 0.3;
    const auto base = obs_diam_exact(space, kappa);
    for (double t : {0.5, 2.0, 10.0}) {
      ObsDiamOptions options;
      options.resolution = base.resolution * t;
      const auto scaled = obs_diam_exact(scale_space(space, t), kappa, options);
      CHECK(std::fabs(scaled.value - t * base.value) <= 2.0 * base.resolution * t + 1e-12);
    }
  }
}

TEST_CASE("sep_exact on the spec examples") {
  const auto pair = two_point(3.0);

  const auto both = sep_exact(pair, {0.5, 0.5});
  CHECK(both.value == doctest::Approx(3.0));
  REQUIRE(both.witness.has_value());
  CHECK(both.witness->sound(pair, both.value));

  const auto triple = sep_exact(pair, {0.4, 0.4, 0.1});
  CHECK(triple.value == doctest::Approx(0.0));
  CHECK_FALSE(triple.witness.has_value());

  const auto impossible = sep_exact(pair, {1.5, 0.1});
  CHECK(impossible.value == doctest::Approx(0.0));
  CHECK_FALSE(impossible.witness.has_value());

  CHECK_THROWS_AS(sep_exact(pair, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(sep_exact(pair, {0.5, -0.1}), std::invalid_argument);
}

TEST_CASE("sep_exact equals the non-disjoint brute force") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int n = 3 + static_cast<int>(seed % 4);
    const auto space = random_euclidean_space(n, seed ^ 0xbeefULL);
    Rng rng(seed * 7919);
    std::vector<double> kappas;
    const int sets = 2 + static_cast<int>(seed % 2);
    for (int s = 0; s < sets; ++s) kappas.push_back(rng.uniform(0.05, 0.45));
    const double mine = sep_exact(space, kappas).value;
    const double brute = sep_brute_nondisjoint(space, kappas);
    CHECK(mine == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("sep_via_thresholds agrees with sep_exact") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto space = random_euclidean_space(5, seed ^ 0xfeedULL);
    Rng rng(seed * 17);
    const std::vector<double> kappas{rng.uniform(0.05, 0.4), rng.uniform(0.05, 0.4)};
    CHECK(sep_via_thresholds(space, kappas).value ==
          doctest::Approx(sep_exact(space, kappas).value).epsilon(1e-12));
  }
}

TEST_CASE("sep_threshold_feasible on the spec examples") {
  const auto pair = two_point(3.0);
  CHECK(sep_threshold_feasible(pair, 3.0, {0.5, 0.5}));
  CHECK_FALSE(sep_threshold_feasible(pair, 3.1, {0.5, 0.5}));
  CHECK(sep_threshold_feasible(complete_graph(4), 1.0, {0.25, 0.25, 0.25}));
}

TEST_CASE("sep_exact is monotone nonincreasing in each target") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto space = random_euclidean_space(5, seed ^ 0x5151ULL);
    const double base = sep_exact(space, {0.2, 0.2}).value;
    CHECK(sep_exact(space, {0.3, 0.2}).value <= base + 1e-12);
    CHECK(sep_exact(space, {0.2, 0.3}).value <= base + 1e-12);
  }
}

TEST_CASE("sep_exact scales exactly") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto space = random_euclidean_space(5, seed ^ 0xa5a5ULL);
    const std::vector<double> kappas{0.25, 0.25};
    const double base = sep_exact(space, kappas).value;
    for (double t : {0.5, 2.0, 10.0})
      CHECK(sep_exact(scale_space(space, t), kappas).value ==
            doctest::Approx(t * base).epsilon(1e-9));
  }
}

TEST_CASE("sep left-continuity sampling") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto space = random_euclidean_space(5, seed ^ 0x9999ULL);
    Rng rng(seed * 41);
    const double kappa = rng.uniform(0.1, 0.4);
    const double at = sep_exact(space, {kappa, kappa}).value;
    double prev = kInfiniteDistance;
    for (double delta : {1e-2, 1e-4, 1e-6}) {
      const double v = sep_exact(space, {kappa - delta, kappa - delta}).value;
      CHECK(v >= at - 1e-12);    // from above
      CHECK(v <= prev + 1e-12);  // decreasing as delta shrinks
      prev = v;
    }
    CHECK(sep_exact(space, {kappa - 1e-9, kappa - 1e-9}).value ==
          doctest::Approx(at).epsilon(1e-12));
  }
}

TEST_CASE("Sep vanishes exactly when the space has too few points") {
  // #X <= N: every tuple with mass sum < 1 gives zero.
  for (int n = 1; n <= 5; ++n) {
    const auto space = random_euclidean_space(n, 100 + n);
    for (int N = n; N <= 4; ++N) {
      std::vector<double> kappas(N + 1, 0.9 / (N + 1));
      CHECK(sep_exact(space, kappas).value == doctest::Approx(0.0));
    }
  }
  // #X >= N+1: targets below the smallest atom give a positive value.
  for (int n = 2; n <= 5; ++n) {
    const auto space = random_euclidean_space(n, 200 + n);
    const int N = n - 1;
    const double min_mass = *std::min_element(space.mass.begin(), space.mass.end());
    std::vector<double> kappas(N + 1, min_mass / 2.0);
    CHECK(sep_exact(space, kappas).value > 0.0);
  }
}

TEST_CASE("invariant_profile on the spec examples") {
  const KappaGrid grid{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}};
  const auto tuples = symmetric_sep_tuples(2);

  const auto zeros = invariant_profile(one_point(), grid, tuples, SolverMode::exact);
  for (const auto& v : zeros.obs_diam) CHECK(*v == doctest::Approx(0.0));
  for (const auto& v : zeros.sep_values) CHECK(*v == doctest::Approx(0.0));

  const auto pair = invariant_profile(two_point(1.0), grid, tuples, SolverMode::exact);
  for (int k = 0; k < grid.size(); ++k) {
    const double expected = grid.values[k] < 0.5 ? 1.0 : 0.0;
    CHECK(*pair.obs_diam[k] == doctest::Approx(expected));
  }

  // Scaling proposition, entrywise.
  const auto base = invariant_profile(two_point(1.0), grid, tuples, SolverMode::exact);
  ProfileOptions opt2;
  opt2.obs.resolution = 2.0 / 64.0;
  const auto doubled =
      invariant_profile(scale_space(two_point(1.0), 2.0), grid, tuples, SolverMode::exact, opt2);
  for (int k = 0; k < grid.size(); ++k)
    CHECK(*doubled.obs_diam[k] == doctest::Approx(2.0 * *base.obs_diam[k]).epsilon(1e-9));
  for (std::size_t t = 0; t < tuples.size(); ++t)
    CHECK(*doubled.sep_values[t] == doctest::Approx(2.0 * *base.sep_values[t]).epsilon(1e-9));
}

TEST_CASE("invariant_profile records capacity errors as missing entries") {
  const KappaGrid grid{{0.3, 0.6}};
  const auto big = random_euclidean_space(9, 42);
  const auto profile = invariant_profile(big, grid, {}, SolverMode::exact);
  CHECK_FALSE(profile.obs_diam[0].has_value());
  CHECK_FALSE(profile.errors.empty());
}

TEST_CASE("profile obs column is monotone nonincreasing") {
  const KappaGrid grid{{0.1, 0.3, 0.5, 0.7, 0.9}};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto space = random_euclidean_space(5, seed ^ 0x8080ULL);
    for (SolverMode mode : {SolverMode::exact, SolverMode::heuristic}) {
      const auto profile = invariant_profile(space, grid, {}, mode);
      for (int k = 1; k < grid.size(); ++k)
        CHECK(*profile.obs_diam[k] <= *profile.obs_diam[k - 1] + 1e-12);
    }
  }
}

TEST_CASE("check_sandwich on the spec examples") {
  const auto pair = two_point(3.0);
  const auto report = check_sandwich(pair, 0.3, 0.15);
  CHECK(report.obs_two_kappa == doctest::Approx(0.0));
  CHECK(report.sep_kappa == doctest::Approx(3.0));
  CHECK(report.obs_kappa_prime == doctest::Approx(3.0));
  CHECK(report.lower_holds);
  CHECK(report.upper_holds);

  const auto trivial = check_sandwich(one_point(), 0.3, 0.15);
  CHECK(trivial.lower_holds);
  CHECK(trivial.upper_holds);

  CHECK_THROWS_AS(check_sandwich(pair, 0.1, 0.2), std::invalid_argument);
}

TEST_CASE("sandwich inequalities hold on random spaces") {
  ObsDiamOptions options;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto space = random_euclidean_space(6, seed ^ 0x3333ULL);
    options.resolution = space.max_finite_distance() / 16.0;
    for (double kappa : {0.1, 0.2, 0.3}) {
      const auto report = check_sandwich(space, kappa, kappa / 2.0, options);
      CHECK(report.lower_holds);
      CHECK(report.upper_holds);
    }
  }
}

TEST_CASE("check_phase_lemma on the spec examples") {
  const auto pair = two_point(3.0);
  const auto report = check_phase_lemma(pair, {0.3, 0.3}, 0.6);
  CHECK(report.sep_value == doctest::Approx(3.0));
  CHECK(report.obs_value == doctest::Approx(0.0));
  CHECK(report.holds);

  const auto trivial = check_phase_lemma(one_point(), {0.3, 0.3}, 0.6);
  CHECK(trivial.holds);

  CHECK_THROWS_WITH_AS(check_phase_lemma(pair, {0.3, 0.3}, 0.5),
                       doctest::Contains("hypothesis"), std::invalid_argument);
}

TEST_CASE("phase lemma inequality holds on random spaces") {
  ObsDiamOptions options;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto space = random_euclidean_space(6, seed ^ 0x2222ULL);
    options.resolution = space.max_finite_distance() / 16.0;
    Rng rng(seed * 101);
    const double k0 = rng.uniform(0.05, 0.3);
    const double k1 = rng.uniform(0.05, 0.3);
    const double bound = 1.0 - (1.0 - (k0 + k1));  // N = 1
    const double kappa = rng.uniform(bound + 1e-6, 0.999);
    const auto report = check_phase_lemma(space, {k0, k1}, kappa, options);
    CHECK(report.holds);
  }
}

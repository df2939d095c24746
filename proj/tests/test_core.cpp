#include <doctest.h>

#include "helpers.hpp"
#include "mminv/core.hpp"

using namespace mminv;
using namespace testutil;

TEST_CASE("validate_space accepts the smallest valid space") {
  CHECK(validate_space(one_point()).ok());
}

TEST_CASE("validate_space flags a mass-sum failure") {
  const auto space = make_space({{0.0, 1.0}, {1.0, 0.0}}, {0.5, 0.6});
  const auto report = validate_space(space);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.axiom == "mass sum") found = true;
  CHECK(found);
}

TEST_CASE("validate_space flags a triangle violation with its indices") {
  const auto space =
      make_space({{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}}, {0.4, 0.3, 0.3});
  const auto report = validate_space(space);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.axiom == "triangle" && v.indices == std::vector<int>{0, 1, 2}) found = true;
  CHECK(found);
}

TEST_CASE("validate_space flags nonpositive masses and asymmetric entries") {
  auto space = make_space({{0.0, 1.0}, {2.0, 0.0}}, {1.0, 0.0});
  const auto report = validate_space(space);
  bool positive = false, symmetric = false;
  for (const auto& v : report.violations) {
    if (v.axiom == "positive mass") positive = true;
    if (v.axiom == "symmetry") symmetric = true;
  }
  CHECK(positive);
  CHECK(symmetric);
}

TEST_CASE("scale_space multiplies distances and keeps masses") {
  const auto space = two_point(3.0);
  const auto scaled = scale_space(space, 2.0);
  CHECK(scaled.dist[0][1] == doctest::Approx(6.0));
  CHECK(scaled.mass == space.mass);

  const auto same = scale_space(space, 1.0);
  CHECK(same.dist == space.dist);

  const auto inf_pair = two_point(kInfiniteDistance);
  CHECK(is_infinite(scale_space(inf_pair, 0.5).dist[0][1]));

  CHECK_THROWS_AS(scale_space(space, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_space(space, -1.0), std::invalid_argument);
}

TEST_CASE("truncate_space caps distances and yields a valid metric") {
  const auto inf_pair = two_point(kInfiniteDistance);
  const auto capped = truncate_space(inf_pair, 1.0);
  CHECK(capped.dist[0][1] == doctest::Approx(1.0));
  CHECK_FALSE(capped.has_infinite_distance());

  const auto small = two_point(0.3);
  CHECK(truncate_space(small, 1.0).dist == small.dist);

  const auto tri =
      make_space({{0.0, 2.0, 3.0}, {2.0, 0.0, 4.0}, {3.0, 4.0, 0.0}}, {0.3, 0.3, 0.4});
  const auto cut = truncate_space(tri, 2.5);
  CHECK(cut.dist[0][1] == doctest::Approx(2.0));
  CHECK(cut.dist[0][2] == doctest::Approx(2.5));
  CHECK(cut.dist[1][2] == doctest::Approx(2.5));
  CHECK(validate_space(cut).ok());

  CHECK_THROWS_AS(truncate_space(tri, 0.0), std::invalid_argument);
}

TEST_CASE("truncate_space output always validates") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto space = random_euclidean_space(6, seed);
    Rng rng(seed * 31);
    const auto cut = truncate_space(space, rng.uniform(0.05, 1.5));
    CHECK(validate_space(cut).ok());
  }
}

TEST_CASE("pushforward_to_line merges preimages") {
  const auto constant = pushforward_to_line(complete_graph(4), {{2.0, 2.0, 2.0, 2.0}});
  REQUIRE(constant.size() == 1);
  CHECK(constant.weight[0] == doctest::Approx(1.0));

  const auto ident = pushforward_to_line(two_point(1.0), {{0.0, 1.0}});
  REQUIRE(ident.size() == 2);
  CHECK(ident.position[0] == 0.0);
  CHECK(ident.weight[0] == doctest::Approx(0.5));

  const auto merged = pushforward_to_line(complete_graph(3), {{0.0, 0.0, 2.0}});
  REQUIRE(merged.size() == 2);
  CHECK(merged.weight[0] == doctest::Approx(2.0 / 3.0));
  CHECK(merged.weight[1] == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(pushforward_to_line(two_point(1.0), {{0.0}}), std::invalid_argument);
}

TEST_CASE("partial_diameter_1d matches the spec examples") {
  const auto pair = RealMeasure::from_atoms({{0.0, 0.5}, {1.0, 0.5}});
  CHECK(partial_diameter_1d(pair, 0.5) == doctest::Approx(0.0));
  CHECK(partial_diameter_1d(pair, 0.8) == doctest::Approx(1.0));

  std::vector<std::pair<double, double>> atoms;
  for (int i = 0; i <= 10; ++i) atoms.emplace_back(i / 10.0, 1.0 / 11.0);
  const auto uniform = RealMeasure::from_atoms(atoms);
  // Frozen from the subset oracle: 7 consecutive atoms are needed.
  CHECK(partial_diameter_1d(uniform, 0.6) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(partial_diam_brute(uniform, 0.6) == doctest::Approx(0.6).epsilon(1e-12));

  CHECK_THROWS_AS(partial_diameter_1d(pair, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(partial_diameter_1d(pair, 1.5), std::invalid_argument);
}

TEST_CASE("partial_diameter_1d equals the subset oracle") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto m = random_measure(2 + static_cast<int>(seed % 11), seed);
    Rng rng(seed * 977);
    const double alpha = rng.uniform(0.05, 1.0);
    const double fast = partial_diameter_1d(m, alpha);
    const double brute = partial_diam_brute(m, alpha);
    CHECK(fast == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("partial_diameter_1d is monotone in alpha") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto m = random_measure(2 + static_cast<int>(seed % 9), seed ^ 0xabcULL);
    double prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const double alpha = k / 10.0;
      const double v = partial_diameter_1d(m, alpha);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("partial_diameter_1d right-continuity sampling") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto m = random_measure(3 + static_cast<int>(seed % 8), seed ^ 0xf00ULL);
    Rng rng(seed * 13);
    const double kappa = rng.uniform(0.05, 0.9);
    const double at = partial_diameter_1d(m, 1.0 - kappa);
    double prev = 0.0;
    for (double delta : {1e-2, 1e-4, 1e-6}) {
      const double v = partial_diameter_1d(m, 1.0 - (kappa + delta));
      CHECK(v <= at + 1e-15);   // from below
      CHECK(v >= prev - 1e-15); // monotone as delta decreases
      prev = v;
    }
  }
}

TEST_CASE("partial_diameter_space matches the spec examples") {
  CHECK(partial_diameter_space(one_point(), 1.0) == doctest::Approx(0.0));

  const auto pair = two_point(3.0);
  CHECK(partial_diameter_space(pair, 0.5) == doctest::Approx(0.0));
  CHECK(partial_diameter_space(pair, 0.6) == doctest::Approx(3.0));

  // K_4: singleton mass 0.25 < 0.3, so two points are forced.
  CHECK(partial_diameter_space(complete_graph(4), 0.3) == doctest::Approx(1.0));

  PartialDiamOptions options;
  options.exact_cap = 4;
  CHECK_THROWS_AS(partial_diameter_space(random_euclidean_space(5, 7), 0.5, options),
                  CapacityError);
  CHECK_THROWS_WITH_AS(partial_diameter_space(random_euclidean_space(5, 7), 0.5, options),
                       doctest::Contains("capped at 4"), CapacityError);
}

TEST_CASE("partial_diameter_space scales linearly") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto space = random_euclidean_space(6, seed);
    Rng rng(seed * 7);
    const double alpha = rng.uniform(0.2, 1.0);
    for (double t : {0.5, 2.0, 10.0}) {
      const double direct = partial_diameter_space(scale_space(space, t), alpha);
      const double scaled = t * partial_diameter_space(space, alpha);
      CHECK(direct == doctest::Approx(scaled).epsilon(1e-9));
    }
  }
}

TEST_CASE("RealMeasure merges duplicates exactly") {
  const auto m = RealMeasure::from_atoms({{1.0, 0.25}, {1.0, 0.25}, {0.0, 0.5}});
  REQUIRE(m.size() == 2);
  CHECK(m.position[0] == 0.0);
  CHECK(m.weight[1] == doctest::Approx(0.5));
  CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(RealMeasure::from_atoms({{0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("KappaGrid validates its entries") {
  CHECK_THROWS_AS(KappaGrid({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(KappaGrid({0.0, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(KappaGrid({0.4, 1.0}), std::invalid_argument);
  CHECK(KappaGrid({0.1, 0.5, 0.9}).size() == 3);
}

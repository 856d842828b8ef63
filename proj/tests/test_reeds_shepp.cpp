#include <doctest.h>

#include <cmath>

#include "fwis/reeds_shepp.hpp"
#include "fwis/scenario.hpp"
#include "oracles.hpp"

using namespace fwis;

TEST_CASE("identical poses give a zero-length path") {
  const Pose2 p{3, 4, 0.7};
  const ReedsSheppPath path = reeds_shepp_shortest(p, p, 2.0);
  CHECK(path.length(2.0) == doctest::Approx(0.0));
}

TEST_CASE("aligned poses connect by a straight word") {
  const Pose2 a{0, 0, 0};
  const Pose2 b{7.5, 0, 0};
  const ReedsSheppPath path = reeds_shepp_shortest(a, b, 2.0);
  CHECK(path.length(2.0) == doctest::Approx(7.5));
  const RSSample mid = reeds_shepp_sample(a, path, 2.0, 3.75);
  CHECK(mid.pose.x == doctest::Approx(3.75));
  CHECK(std::abs(mid.pose.y) < 1e-9);

  // Anti-aligned chord: straight reverse word.
  const Pose2 c{-4.0, 0, 0};
  const ReedsSheppPath rev = reeds_shepp_shortest(a, c, 2.0);
  CHECK(rev.length(2.0) == doctest::Approx(4.0));
}

TEST_CASE("sampling reaches the target pose") {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const Pose2 a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-M_PI, M_PI)};
    const Pose2 b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-M_PI, M_PI)};
    const double radius = rng.uniform(1.0, 5.0);
    const ReedsSheppPath path = reeds_shepp_shortest(a, b, radius);
    const RSSample end = reeds_shepp_sample(a, path, radius, path.length(radius));
    CHECK(distance(end.pose.position(), b.position()) < 1e-6);
    CHECK(std::abs(angle_diff(end.pose.theta, b.theta)) < 1e-6);
  }
}

TEST_CASE("length matches the 48-word enumeration oracle") {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    const Pose2 a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-M_PI, M_PI)};
    const Pose2 b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-M_PI, M_PI)};
    const double radius = rng.uniform(1.0, 4.0);
    const double mine = reeds_shepp_shortest(a, b, radius).length(radius);
    const double ref = oracle::rs48::shortest_length(a, b, radius);
    CHECK(mine <= ref + 1e-6);
    // Both enumerations claim optimality, so they must agree.
    CHECK(mine >= ref - 1e-6);
  }
}

TEST_CASE("discretization is monotone in arc length and dense") {
  const Pose2 a{0, 0, 0};
  const Pose2 b{3, 5, 2.0};
  const double radius = 2.0;
  const ReedsSheppPath path = reeds_shepp_shortest(a, b, radius);
  const auto samples = reeds_shepp_discretize(a, path, radius, 0.05);
  REQUIRE(samples.size() >= 2);
  for (size_t i = 1; i < samples.size(); ++i) {
    CHECK(distance(samples[i - 1].pose.position(), samples[i].pose.position()) <= 0.06);
  }
  CHECK(distance(samples.back().pose.position(), b.position()) < 1e-6);
}

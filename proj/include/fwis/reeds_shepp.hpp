#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fwis/geometry.hpp"

namespace fwis {

enum class RSSegment : uint8_t { None = 0, Left, Straight, Right };

// Shortest bidirectional curvature-bounded path, stored as up to five
// typed segments with signed radius-normalized lengths (negative length
// means reverse travel).
struct ReedsSheppPath {
  std::array<RSSegment, 5> types{RSSegment::None, RSSegment::None, RSSegment::None,
                                 RSSegment::None, RSSegment::None};
  std::array<double, 5> lengths{0, 0, 0, 0, 0};
  double total = 0.0;  // sum of absolute normalized lengths

  double length(double radius) const { return total * radius; }
};

// Minimum over all word families; always exists.
ReedsSheppPath reeds_shepp_shortest(const Pose2& from, const Pose2& to, double radius);

struct RSSample {
  Pose2 pose;
  double direction = 1.0;  // +1 forward, -1 reverse
  double kappa = 0.0;      // signed curvature (1/radius on arcs)
};

// Pose and motion annotation at arc position s in [0, length].
RSSample reeds_shepp_sample(const Pose2& from, const ReedsSheppPath& path, double radius, double s);

// Samples spaced at most ds apart, both endpoints included.
std::vector<RSSample> reeds_shepp_discretize(const Pose2& from, const ReedsSheppPath& path,
                                             double radius, double ds);

}  // namespace fwis

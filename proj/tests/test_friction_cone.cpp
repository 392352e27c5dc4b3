#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "pgs/friction_cone.hpp"

using namespace pgs;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGamma = kPi / 2.0;

double sec(double x) { return 1.0 / std::cos(x); }

// Direct product evaluation, independent of the recurrence used internally.
double length_oracle(int p, double gamma, int q_max) {
  double v = 1.0;
  for (int r = p; r <= q_max + 1; ++r) v *= sec(gamma / std::exp2(r));
  return v;
}

}  // namespace

TEST_CASE("edge length closed form") {
  SUBCASE("single-factor tail") {
    for (int q = 0; q <= 9; ++q) {
      CHECK(edge_length(q + 1, kGamma, q) ==
            doctest::Approx(sec(kGamma / std::exp2(q + 1))).epsilon(1e-14));
    }
  }
  SUBCASE("frozen values") {
    CHECK(edge_length(1, kGamma, 0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(edge_length(1, kGamma, 2) ==
          doctest::Approx(1.5607225761290261).epsilon(1e-12));
    CHECK(edge_length(1, kGamma, 3) ==
          doctest::Approx(1.5682742452729696).epsilon(1e-12));
  }
  SUBCASE("recurrence l_p = l_{p+1} sec(gamma/2^p)") {
    const int q = 9;
    for (int p = 1; p <= q; ++p) {
      CHECK(edge_length(p, kGamma, q) ==
            doctest::Approx(edge_length(p + 1, kGamma, q) *
                            sec(kGamma / std::exp2(p)))
                .epsilon(1e-12));
    }
  }
  SUBCASE("strictly decreasing in depth") {
    for (int p = 1; p <= 9; ++p) {
      CHECK(edge_length(p, kGamma, 9) > edge_length(p + 1, kGamma, 9));
    }
  }
  SUBCASE("depth out of range") {
    CHECK_THROWS_AS(edge_length(0, kGamma, 3), std::out_of_range);
    CHECK_THROWS_AS(edge_length(5, kGamma, 3), std::out_of_range);
  }
  SUBCASE("matches the independent product oracle") {
    for (int q = 0; q <= 10; ++q) {
      for (int p = 1; p <= q + 1; ++p) {
        CHECK(edge_length(p, kGamma, q) ==
              doctest::Approx(length_oracle(p, kGamma, q)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("initial cone") {
  SUBCASE("gamma = pi/2 gives four edges at the axes") {
    const auto cone = FrictionCone::initial(kGamma, 2);
    REQUIRE(cone.edge_count() == 4);
    for (int e = 0; e < 4; ++e) {
      CHECK(cone.edge_angle(e) == doctest::Approx(e * kGamma));
      CHECK(cone.edge_depth(e) == 1);
      CHECK(cone.edge_len(e) ==
            doctest::Approx(1.5607225761290261).epsilon(1e-12));
      CHECK(cone.sector_depth(e) == 1);
    }
  }
  SUBCASE("q_max = 0 gives sqrt(2) edges") {
    const auto cone = FrictionCone::initial(kGamma, 0);
    CHECK(cone.edge_len(0) == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("gamma must divide the circle") {
    CHECK_THROWS_AS(FrictionCone::initial(1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(FrictionCone::initial(kPi, 3), std::invalid_argument);
  }
}

// Chord containment: the segment between adjacent scaled edge tips stays on
// or outside the unit circle, so the sticking polygon always contains the
// exact friction disc.
static void check_containment(const FrictionCone& cone) {
  const int k = cone.edge_count();
  for (int s = 0; s < k; ++s) {
    const int e2 = (s + 1) % k;
    const Eigen::Vector2d a = cone.edge_len(s) * cone.edge_direction(s);
    const Eigen::Vector2d b = cone.edge_len(e2) * cone.edge_direction(e2);
    for (double t = 0.0; t <= 1.0; t += 0.05) {
      CHECK((a + t * (b - a)).norm() >= 1.0 - 1e-12);
    }
  }
}

TEST_CASE("containment holds at construction and across refinement") {
  auto cone = FrictionCone::initial(kGamma, 4);
  check_containment(cone);
  cone.refine_sector(0);
  check_containment(cone);
  cone.refine_sector(0);
  cone.refine_sector(3);
  check_containment(cone);
}

TEST_CASE("refining a sector creates the bisecting edge at child depth") {
  auto cone = FrictionCone::initial(kGamma, 2);
  REQUIRE(cone.refine_sector(0) == FrictionCone::RefineStatus::kRefined);
  REQUIRE(cone.edge_count() == 5);
  const double expect_angles[5] = {0.0, kPi / 4.0, kPi / 2.0, kPi,
                                   1.5 * kPi};
  // The bisecting edge carries the child depth; the bounding edges keep the
  // shallower neighbor's length so the neighbor sectors stay valid outer
  // approximations.
  const int expect_depths[5] = {1, 2, 1, 1, 1};
  for (int e = 0; e < 5; ++e) {
    CHECK(cone.edge_angle(e) == doctest::Approx(expect_angles[e]));
    CHECK(cone.edge_depth(e) == expect_depths[e]);
  }
  CHECK(cone.sector_depth(0) == 2);
  CHECK(cone.sector_depth(1) == 2);
  CHECK(cone.sector_depth(2) == 1);
  // Once both neighbors are refined, the shared bounding edge shortens too.
  auto both = FrictionCone::initial(kGamma, 2);
  both.refine_sector(0);
  both.refine_sector(2);  // [90, 180) after the first insert
  CHECK(both.edge_depth(both.sector_containing(kGamma) /* edge at 90 */) == 2);
}

TEST_CASE("refining a max-depth sector is a distinct no-op") {
  auto cone = FrictionCone::initial(kGamma, 1);
  CHECK(cone.refine_sector(0) == FrictionCone::RefineStatus::kRefined);
  // Sector 0 now spans gamma/2 = the finest angle.
  CHECK(cone.sector_at_max_depth(0));
  const int edges_before = cone.edge_count();
  CHECK(cone.refine_sector(0) == FrictionCone::RefineStatus::kAtMaxDepth);
  CHECK(cone.edge_count() == edges_before);
}

TEST_CASE("refinement is confluent on disjoint sectors") {
  auto a = FrictionCone::initial(kGamma, 3);
  auto b = FrictionCone::initial(kGamma, 3);
  a.refine_sector(0);
  a.refine_sector(3);  // sector [180, 270) shifted by the insert
  b.refine_sector(2);  // refine [180, 270) first
  b.refine_sector(0);
  REQUIRE(a.edge_count() == b.edge_count());
  for (int e = 0; e < a.edge_count(); ++e) {
    CHECK(a.edge_angle(e) == doctest::Approx(b.edge_angle(e)));
    CHECK(a.edge_depth(e) == b.edge_depth(e));
  }
}

TEST_CASE("nesting: refined feasible region is contained in the parent") {
  // Vertex membership: every vertex of the child polygon lies inside the
  // parent polygon (scaled edge tips, plus the origin rays).
  auto parent = FrictionCone::initial(kGamma, 3);
  auto child = parent;
  child.refine_sector(0);
  // The parent polygon in half-plane form: for each sector, the chord
  // through the two scaled tips bounds the feasible set from outside.
  const auto inside_parent = [&](const Eigen::Vector2d& pt) {
    const int k = parent.edge_count();
    for (int s = 0; s < k; ++s) {
      const Eigen::Vector2d a = parent.edge_len(s) * parent.edge_direction(s);
      const Eigen::Vector2d b =
          parent.edge_len((s + 1) % k) * parent.edge_direction((s + 1) % k);
      const Eigen::Vector2d edge = b - a;
      const Eigen::Vector2d outward(edge.y(), -edge.x());
      if ((pt - a).dot(outward) > 1e-9 * outward.norm()) return false;
    }
    return true;
  };
  for (int e = 0; e < child.edge_count(); ++e) {
    CHECK(inside_parent(child.edge_len(e) * child.edge_direction(e)));
  }
}

TEST_CASE("active sector identification") {
  auto cone = FrictionCone::initial(kGamma, 2);
  SUBCASE("two adjacent nonzero weights give their sector") {
    VecX w = VecX::Zero(4);
    w[0] = 0.4;
    w[1] = 0.6;
    const auto res = active_sector(cone, w);
    REQUIRE(res.has_value());
    CHECK(res->sector == 0);
    CHECK(res->delta == doctest::Approx(kGamma));
  }
  SUBCASE("wrap-around pair selects the last sector") {
    VecX w = VecX::Zero(4);
    w[3] = 0.5;
    w[0] = 0.1;
    const auto res = active_sector(cone, w);
    REQUIRE(res.has_value());
    CHECK(res->sector == 3);
  }
  SUBCASE("all zero reports none") {
    CHECK_FALSE(active_sector(cone, VecX::Zero(4)).has_value());
  }
  SUBCASE("single weight ties toward the lower start angle") {
    cone.refine_sector(0);  // edges 0,45,90,180,270
    VecX w = VecX::Zero(5);
    w[1] = 1.0;  // edge at 45 degrees
    const auto res = active_sector(cone, w);
    REQUIRE(res.has_value());
    CHECK(res->sector == 0);  // [0,45) starts lower than [45,90)
    CHECK(res->delta == doctest::Approx(kGamma / 2.0));
  }
  SUBCASE("non-adjacent support is rejected") {
    VecX w = VecX::Zero(4);
    w[0] = 0.5;
    w[2] = 0.5;
    CHECK_THROWS_AS(active_sector(cone, w), std::invalid_argument);
  }
  SUBCASE("three nonzero weights are rejected") {
    VecX w = VecX::Zero(4);
    w[0] = w[1] = w[2] = 0.5;
    CHECK_THROWS_AS(active_sector(cone, w), std::invalid_argument);
  }
}

TEST_CASE("target depth follows the bisection schedule") {
  CHECK(target_depth(kGamma, kGamma) == 2);
  CHECK(target_depth(kGamma / 2.0, kGamma) == 3);
  CHECK(target_depth(kGamma / 256.0, kGamma) == 10);
  CHECK_THROWS_AS(target_depth(kGamma / 3.0, kGamma), std::invalid_argument);
  CHECK_THROWS_AS(target_depth(0.0, kGamma), std::invalid_argument);
}

TEST_CASE("dump lists ordered angle,length,depth triples") {
  auto cone = FrictionCone::initial(kGamma, 1);
  cone.refine_sector(1);
  const std::string dump = cone.dump();
  CHECK(dump.find("0,") == 0);
  CHECK(dump.find("135,") != std::string::npos);
  // One line per edge.
  CHECK(std::count(dump.begin(), dump.end(), '\n') == cone.edge_count());
}

TEST_CASE("uniform cone reaches the requested depth everywhere") {
  const auto cone = FrictionCone::uniform(kGamma, 3, 3);
  CHECK(cone.edge_count() == 16);
  for (int s = 0; s < cone.sector_count(); ++s) {
    CHECK(cone.sector_depth(s) == 3);
  }
}

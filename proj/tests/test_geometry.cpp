#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gazedepth/geometry.hpp"
#include "support.hpp"

using namespace gazedepth;
using Eigen::Vector3d;

TEST_CASE("symmetric convergence at 1 m recovers the depth") {
  const auto est = estimate_depth(testing::aim_at({0, 0, 1.0}), EyeGeometry{});
  REQUIRE(est.valid());
  CHECK(*est.raw_depth == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parallel rays are divergent") {
  GazeSample s = testing::aim_at({0, 0, 1});
  s.left_dir = s.right_dir = Vector3d::UnitZ();
  const auto est = estimate_depth(s, EyeGeometry{});
  CHECK(est.status == DepthStatus::divergent);
  CHECK_FALSE(est.raw_depth);
}

TEST_CASE("vertical offset is ignored by the projection") {
  const auto est = estimate_depth(testing::aim_at({0.3, 0.2, 2.0}), EyeGeometry{});
  REQUIRE(est.valid());
  const auto s = testing::aim_at({0.3, 0.2, 2.0});
  const auto hit = testing::intersect_xz(s.left_origin, s.left_dir, s.right_origin, s.right_dir);
  REQUIRE(hit);
  const double oracle = hit->norm();
  CHECK(oracle == doctest::Approx(std::sqrt(0.3 * 0.3 + 2.0 * 2.0)).epsilon(1e-12));
  CHECK(*est.raw_depth == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(*est.raw_depth == doctest::Approx(2.02237).epsilon(1e-5));
}

TEST_CASE("status classification") {
  const EyeGeometry g;
  SUBCASE("invalid flag") {
    auto s = testing::aim_at({0, 0, 1});
    s.right_valid = false;
    CHECK(estimate_depth(s, g).status == DepthStatus::invalid_sample);
  }
  SUBCASE("straight up has no planar direction") {
    auto s = testing::aim_at({0, 0, 1});
    s.left_dir = Vector3d::UnitY();
    CHECK(estimate_depth(s, g).status == DepthStatus::invalid_sample);
  }
  SUBCASE("outward rays") {
    auto s = testing::aim_at({0, 0, 1});
    s.left_dir = Vector3d(-0.1, 0, 1).normalized();
    s.right_dir = Vector3d(0.1, 0, 1).normalized();
    CHECK(estimate_depth(s, g).status == DepthStatus::divergent);
  }
  SUBCASE("converging behind the eyes") {
    auto s = testing::aim_at({0, 0, -1});
    CHECK(estimate_depth(s, g).status == DepthStatus::behind);
  }
  SUBCASE("beyond max_depth") {
    const auto s = testing::aim_at({0, 0, 30});
    CHECK(estimate_depth(s, g).status == DepthStatus::divergent);
    CHECK(estimate_depth(s, EyeGeometry{0.064, 50}).valid());
  }
}

TEST_CASE("random convergent pairs match the 2-D intersection oracle") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ux(-2, 2), uy(-1, 1), uz(0.2, 15), uipd(0.05, 0.075);
  for (int i = 0; i < 1000; ++i) {
    const double ipd = uipd(rng);
    const Vector3d p(ux(rng), uy(rng), uz(rng));
    const auto s = testing::aim_at(p, 0, ipd);
    const auto hit = testing::intersect_xz(s.left_origin, s.left_dir, s.right_origin, s.right_dir);
    REQUIRE(hit);
    const auto est = estimate_depth(s, EyeGeometry{ipd, 100});
    REQUIRE(est.valid());
    CHECK(std::abs(*est.raw_depth - hit->norm()) <= 1e-9 * hit->norm());
  }
}

TEST_CASE("swapping the eyes leaves the depth unchanged") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-1, 1), uz(0.3, 8);
  for (int i = 0; i < 200; ++i) {
    auto s = testing::aim_at({ux(rng), ux(rng), uz(rng)});
    auto swapped = s;
    std::swap(swapped.left_origin, swapped.right_origin);
    std::swap(swapped.left_dir, swapped.right_dir);
    const auto a = estimate_depth(s, EyeGeometry{});
    const auto b = estimate_depth(swapped, EyeGeometry{});
    REQUIRE(a.valid());
    REQUIRE(b.valid());
    CHECK(std::abs(*a.raw_depth - *b.raw_depth) <= 1e-12);
  }
}

TEST_CASE("noiseless fixations on the midline are exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uy(-2, 2), uz(0.1, 19.9);
  for (int i = 0; i < 500; ++i) {
    const double z = uz(rng);
    const auto est = estimate_depth(testing::aim_at({0, uy(rng), z}), EyeGeometry{});
    REQUIRE(est.valid());
    CHECK(std::abs(*est.raw_depth - z) <= 1e-9);
  }
}

TEST_CASE("vergence angle") {
  const EyeGeometry g;
  CHECK(vergence_angle_for_depth(1.0, g) == doctest::Approx(testing::half_angle(1.0)).epsilon(1e-14));
  CHECK(vergence_angle_for_depth(1.0, g) == doctest::Approx(0.031983).epsilon(1e-5));
  CHECK(vergence_angle_for_depth(0.032, g) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
  CHECK(vergence_angle_for_depth(1e9, g) < 1e-9);
  CHECK_THROWS_AS(vergence_angle_for_depth(0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(vergence_angle_for_depth(-1.0, g), std::invalid_argument);
  CHECK(depth_for_vergence_angle(vergence_angle_for_depth(3.3, g), g) == doctest::Approx(3.3).epsilon(1e-13));
}

TEST_CASE("depth sensitivity matches finite differences of the inverse mapping") {
  const EyeGeometry g;
  auto fd = [](double depth) {
    const double th = testing::half_angle(depth);
    const double h = 1e-6;
    return std::abs(testing::depth_of_angle(th + h) - testing::depth_of_angle(th - h)) / (2 * h);
  };
  CHECK(fd(0.5) == doctest::Approx(7.85).epsilon(2e-3));
  CHECK(fd(2.0) == doctest::Approx(125.1).epsilon(2e-3));
  CHECK(depth_sensitivity(0.5, g) == doctest::Approx(fd(0.5)).epsilon(1e-6));
  CHECK(depth_sensitivity(2.0, g) == doctest::Approx(fd(2.0)).epsilon(1e-6));
  double prev = 0;
  for (double d = 0.2; d <= 10.0 + 1e-12; d += 0.05) {
    const double s = depth_sensitivity(d, g);
    CHECK(std::abs(s - fd(d)) <= 1e-6 * fd(d));
    CHECK(s > prev);
    prev = s;
  }
  CHECK(depth_sensitivity(2.0, EyeGeometry{0.07, 20}) > depth_sensitivity(0.5, EyeGeometry{0.07, 20}));
  CHECK_THROWS_AS(depth_sensitivity(0.0, g), std::invalid_argument);
}

TEST_CASE("geometry is usable in single precision") {
  GazeSampleT<float> s;
  s.left_origin = {-0.032f, 0, 0};
  s.right_origin = {0.032f, 0, 0};
  s.left_dir = (Vec3<float>(0, 0, 1) - s.left_origin).normalized();
  s.right_dir = (Vec3<float>(0, 0, 1) - s.right_origin).normalized();
  s.left_valid = s.right_valid = true;
  const auto est = estimate_depth(s, EyeGeometryT<float>{});
  REQUIRE(est.valid());
  CHECK(*est.raw_depth == doctest::Approx(1.0f).epsilon(1e-5));
}

TEST_CASE("cyclopean ray") {
  const auto ray = cyclopean_ray(testing::aim_at({0, 0, 4}));
  REQUIRE(ray);
  CHECK(ray->origin.norm() < 1e-15);
  CHECK((ray->dir - Vector3d::UnitZ()).norm() < 1e-12);
  auto one_eye = testing::aim_at({0, 0, 4});
  one_eye.left_valid = false;
  const auto fallback = cyclopean_ray(one_eye);
  REQUIRE(fallback);
  CHECK(fallback->origin == one_eye.right_origin);
  one_eye.right_valid = false;
  CHECK_FALSE(cyclopean_ray(one_eye));
}

TEST_CASE("geometry validation") {
  CHECK_THROWS(EyeGeometry{0, 20}.validate());
  CHECK_THROWS(EyeGeometry{0.064, -1}.validate());
  CHECK_NOTHROW(EyeGeometry{}.validate());
  CHECK(std::string(to_string(DepthStatus::behind)) == "behind");
}

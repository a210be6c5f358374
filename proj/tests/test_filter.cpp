#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gazedepth/depth_filter.hpp"
#include "gazedepth/stats.hpp"
#include "support.hpp"

using namespace gazedepth;

namespace {

DepthEstimate valid_at(double t, double d) { return {t, d, DepthStatus::valid}; }
DepthEstimate divergent_at(double t) { return {t, std::nullopt, DepthStatus::divergent}; }

}  // namespace

TEST_CASE("constant input passes through") {
  DepthFilter f;
  for (int k = 0; k < 300; ++k) {
    const auto out = f.push(valid_at(k / 120.0, 1.0));
    REQUIRE(out.depth);
    CHECK(*out.depth == 1.0);
  }
}

TEST_CASE("step response settles once pre-step samples age out") {
  // Windowed-mean oracle over the synthetic sequence.
  const double rate = 120;
  const int pre = 120;
  std::vector<double> ts;
  std::vector<std::optional<double>> xs;
  DepthFilter f(0.2);
  int first_clean = -1;
  int oracle_first_clean = -1;
  for (int k = 0; k < pre + 60; ++k) {
    const double t = k / rate;
    const double d = k < pre ? 2.0 : 0.5;
    ts.push_back(t);
    xs.push_back(d);
    const auto out = f.push(valid_at(t, d));
    const auto ref = testing::windowed_mean(ts, xs, t, 0.2);
    REQUIRE(out.depth);
    REQUIRE(ref);
    CHECK(*out.depth == doctest::Approx(*ref).epsilon(1e-12));
    const int post = k - pre + 1;
    if (post >= 1 && first_clean < 0 && std::abs(*out.depth - 0.5) <= 1e-9) first_clean = post;
    if (post >= 1 && oracle_first_clean < 0 && std::abs(*ref - 0.5) <= 1e-9) oracle_first_clean = post;
  }
  CHECK(first_clean == oracle_first_clean);
  CHECK(first_clean == 25);
}

TEST_CASE("white noise is reduced by about the square root of the window count") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0, 0.1);
  DepthFilter f;
  std::vector<double> raw, smooth;
  for (int k = 0; k < 10000; ++k) {
    const double d = 2.0 + noise(rng);
    raw.push_back(d);
    const auto out = f.push(valid_at(k / 120.0, d));
    if (k >= 30) smooth.push_back(*out.depth);
  }
  const double sigma = stats::stddev(raw);
  const double predicted = sigma / std::sqrt(24.0);
  CHECK(stats::stddev(smooth) == doctest::Approx(predicted).epsilon(0.15));
  CHECK(f.size() == 25);
}

TEST_CASE("output is a convex combination of the buffered samples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 10);
  std::bernoulli_distribution drop(0.2);
  std::vector<double> ts;
  std::vector<std::optional<double>> xs;
  DepthFilter f;
  for (int k = 0; k < 2000; ++k) {
    const double t = k / 120.0;
    std::optional<double> d;
    if (!drop(rng)) d = u(rng);
    ts.push_back(t);
    xs.push_back(d);
    const auto out = f.push(d ? valid_at(t, *d) : divergent_at(t));
    const auto ref = testing::windowed_mean(ts, xs, t, 0.2);
    REQUIRE(out.depth.has_value() == ref.has_value());
    REQUIRE(out.depth.has_value() == (out.sample_count >= 1));
    if (!ref) continue;
    CHECK(*out.depth == doctest::Approx(*ref).epsilon(1e-12));
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (xs[i] && ts[i] >= t - 0.2 - 1e-9) {
        lo = std::min(lo, *xs[i]);
        hi = std::max(hi, *xs[i]);
      }
    CHECK(*out.depth >= lo);
    CHECK(*out.depth <= hi);
  }
}

TEST_CASE("variance does not grow for stationary input") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 3);
    DepthFilter f;
    std::vector<double> raw, smooth;
    for (int k = 0; k < 4000; ++k) {
      const double d = u(rng);
      raw.push_back(d);
      smooth.push_back(*f.push(valid_at(k / 120.0, d)).depth);
    }
    CHECK(stats::stddev(smooth) <= stats::stddev(raw));
  }
}

TEST_CASE("invalid samples leave the output unchanged") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 3);
  std::bernoulli_distribution div(0.3);
  DepthFilter with, without;
  for (int k = 0; k < 1000; ++k) {
    const double t = k / 120.0;
    if (div(rng)) {
      with.push(divergent_at(t));
      continue;
    }
    const double d = u(rng);
    const auto a = with.push(valid_at(t, d));
    const auto b = without.push(valid_at(t, d));
    CHECK(a == b);
  }
}

TEST_CASE("the window is measured in time, not samples") {
  DepthFilter fast, slow;
  for (int k = 0; k < 240; ++k) fast.push(valid_at(k / 120.0, 1.0));
  for (int k = 0; k < 120; ++k) slow.push(valid_at(k / 60.0, 1.0));
  CHECK(fast.size() == 25);
  CHECK(slow.size() == 13);
}

TEST_CASE("a gap longer than the window yields no depth") {
  DepthFilter f;
  f.push(valid_at(0.0, 1.0));
  CHECK(f.push(divergent_at(0.1)).depth);
  CHECK(f.push(divergent_at(0.2)).depth);
  const auto out = f.push(divergent_at(0.21));
  CHECK_FALSE(out.depth);
  CHECK(out.sample_count == 0);
}

TEST_CASE("reset") {
  DepthFilter f;
  f.reset();
  CHECK(f.empty());
  f.push(valid_at(0, 5.0));
  f.push(valid_at(0.01, 3.0));
  f.reset();
  CHECK(f.empty());
  CHECK_FALSE(f.last_output());
  const auto out = f.push(valid_at(0.0, 1.0));
  CHECK(*out.depth == 1.0);
  CHECK(out.sample_count == 1);

  // A reset filter behaves exactly like a fresh one.
  DepthFilter fresh;
  f.reset();
  for (int k = 0; k < 100; ++k) {
    const double d = 1 + 0.01 * k;
    CHECK(f.push(valid_at(k / 120.0, d)) == fresh.push(valid_at(k / 120.0, d)));
  }
}

TEST_CASE("out-of-order and bad inputs are rejected") {
  DepthFilter f;
  f.push(valid_at(1.0, 1.0));
  CHECK_THROWS_AS(f.push(valid_at(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(f.push(valid_at(0.5, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(f.push(valid_at(NAN, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(DepthFilter(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DepthFilter(-1.0), std::invalid_argument);
}

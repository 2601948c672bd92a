#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfed/error.hpp"
#include "mfed/signal.hpp"
#include "oracles/poi_oracle.hpp"
#include "support.hpp"

using namespace mfed;

namespace {

AccelSeries constant_series(double seconds, double ax, double rate = 25.0) {
  AccelSeries s;
  s.rate = rate;
  const int n = static_cast<int>(std::lround(seconds * rate));
  for (int i = 0; i < n; ++i) s.samples.push_back({i / rate, ax, 0.0, 9.81});
  return s;
}

// ax dips (Gaussian, sigma seconds wide) at each center; ay is a 1 Hz sine.
AccelSeries dips(double seconds, std::vector<std::pair<double, double>> centers_depths, double ay_amp,
                 double sigma = 0.3) {
  AccelSeries s = constant_series(seconds, 0.0);
  for (auto& p : s.samples) {
    p.az = 0.0;
    p.ay = ay_amp * std::sin(2 * std::numbers::pi * p.t);
    for (auto [c, d] : centers_depths) {
      const double k = (p.t - c) / sigma;
      p.ax += d * std::exp(-0.5 * k * k);
    }
  }
  return s;
}

std::vector<std::size_t> indices(const std::vector<Poi>& pois) {
  std::vector<std::size_t> out;
  for (const auto& p : pois) out.push_back(p.index);
  return out;
}

}  // namespace

TEST_SUITE("signal") {
  TEST_CASE("smoothing a constant leaves it unchanged") {
    const auto s = constant_series(10, -9.81);
    const auto out = smooth(s, 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(out.samples[i].ax == doctest::Approx(-9.81).epsilon(1e-12));
  }

  TEST_CASE("smooth_len 0 is the identity") {
    std::mt19937_64 rng(3);
    const auto s = testing::random_trace(rng);
    const auto out = smooth(s, 0.0);
    REQUIRE(out.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(out.samples[i].ax == s.samples[i].ax);
  }

  TEST_CASE("unit impulse spreads 1/25 over k-12..k+12") {
    AccelSeries s = constant_series(10, 0.0);
    const std::size_t k = 100;
    s.samples[k].ax = 1.0;
    const auto out = smooth(s, 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool inside = i + 12 >= k && i <= k + 12;
      CHECK(out.samples[i].ax == doctest::Approx(inside ? 0.04 : 0.0));
    }
  }

  TEST_CASE("smoothing matches the naive moving average") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = testing::random_trace(rng);
      const double len = 0.2 + 0.1 * trial;
      const auto a = smooth(s, len);
      const auto b = oracle::smooth_naive(s, len);
      for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(a.samples[i].ax == doctest::Approx(b.samples[i].ax).epsilon(1e-9).scale(1.0));
        REQUIRE(a.samples[i].az == doctest::Approx(b.samples[i].az).epsilon(1e-9).scale(1.0));
      }
    }
  }

  TEST_CASE("constant signal has no PoIs") {
    CHECK(detect_pois(constant_series(60, -9.81), {}).empty());
  }

  TEST_CASE("single Gaussian dip with summed variance 2.0 gives one PoI at the minimum") {
    // ay amplitude chosen so ax variance + ay variance over the 6 s window is 2.0.
    AccelSeries probe = dips(20, {{10.0, -6.0}}, 0.0, 0.2);
    double var_ax = 0;
    oracle::variance_ok(probe, oracle::segment_ids(probe), 250, {}, &var_ax);
    REQUIRE(var_ax < 2.0);
    const double amp = std::sqrt(2.0 * (2.0 - var_ax));
    const auto s = dips(20, {{10.0, -6.0}}, amp, 0.2);

    const auto pois = detect_pois(s, {});
    REQUIRE(pois.size() == 1);
    CHECK(pois[0].index == 250);
    CHECK(pois[0].t == doctest::Approx(10.0));
    CHECK(pois[0].ax_value == doctest::Approx(-6.0));
    CHECK(pois[0].variance_sum == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(indices(pois) == oracle::pois_brute(s, {}));
  }

  TEST_CASE("of two dips 1 s apart only the deeper survives") {
    const auto s = dips(30, {{10.0, -4.0}, {11.0, -5.0}}, 2.0);
    const auto pois = detect_pois(s, {});
    REQUIRE(pois.size() == 1);
    CHECK(pois[0].t == doctest::Approx(11.0));
    CHECK(indices(pois) == oracle::pois_brute(s, {}));
  }

  TEST_CASE("suppression keeps the earlier peak on a tie") {
    const auto s = dips(30, {{10.0, -5.0}, {11.0, -5.0}}, 2.0);
    const auto pois = detect_pois(s, {});
    REQUIRE(pois.size() == 1);
    CHECK(pois[0].t == doctest::Approx(10.0));
  }

  TEST_CASE("shipped thresholds") {
    DetectorConfig c;
    CHECK(c.x_th == -3.0);
    CHECK(c.v_th == 1.0);
    CHECK(c.peak_min_gap == 2.0);
    CHECK(c.window_len == 6.0);
  }

  TEST_CASE("invalid configs are rejected") {
    const auto s = constant_series(10, 0.0);
    DetectorConfig c;
    c.x_th = 0.5;
    CHECK_THROWS_AS(detect_pois(s, c), ConfigError);
    c = {};
    c.v_th = -1;
    CHECK_THROWS_AS(detect_pois(s, c), ConfigError);
    c = {};
    c.peak_min_gap = 0;
    CHECK_THROWS_AS(detect_pois(s, c), ConfigError);
    c = {};
    c.window_len = 0;
    CHECK_THROWS_AS(detect_pois(s, c), ConfigError);
  }

  TEST_CASE("plateaus are not peaks") {
    AccelSeries s = constant_series(10, 0.0);
    s.samples[100].ax = -5;
    s.samples[101].ax = -5;
    CHECK(find_negative_peaks(s).empty());
  }

  TEST_CASE("gaps split segments and windows may not cross them") {
    AccelSeries s = dips(20, {{10.0, -6.0}}, 2.0);
    for (std::size_t i = 260; i < s.size(); ++i) s.samples[i].t += 1.0;  // dropout 0.4 s after the dip
    CHECK(split_segments(s).size() == 2);
    CHECK(detect_pois(s, {}).empty());
  }

  TEST_CASE("extract_window geometry") {
    CHECK(window_rows(25, 6) == 150);
    const auto s = dips(20, {{10.0, -6.0}}, 2.0);
    const auto pois = detect_pois(s, {});
    REQUIRE(pois.size() == 1);
    const auto w = extract_window(s, pois[0], {});
    CHECK(w.rows == 150);
    CHECK(w.samples.size() == 450);
    CHECK(w.at(75, 0) == doctest::Approx(-6.0));  // center row is the PoI
    CHECK(w.at(0, 1) == s.samples[250 - 75].ay);

    Poi early{25, 1.0, -6.0, 2.0};
    CHECK_THROWS_AS(extract_window(constant_series(60, 0.0), early, {}), WindowOutOfBounds);

    const auto flat = constant_series(60, -2.5);
    const auto fw = extract_window(flat, Poi{750, 30.0, -2.5, 0.0}, {});
    for (std::size_t r = 0; r < fw.rows; ++r) {
      CHECK(fw.at(r, 0) == -2.5);
      CHECK(fw.at(r, 2) == 9.81);
    }
  }

  TEST_CASE("rate validation") {
    auto s = constant_series(10, 0.0);
    CHECK_NOTHROW(validate_rate(s));
    s.rate = 50;
    CHECK_THROWS_AS(validate_rate(s), ConfigError);
  }

  TEST_CASE("properties on random traces") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
      const auto raw = testing::random_trace(rng);
      const auto cfg = testing::random_config(rng);
      const auto s = smooth(raw, cfg.smooth_len);
      const auto pois = detect_pois(s, cfg);

      CHECK(indices(pois) == oracle::pois_brute(s, cfg));
      for (std::size_t i = 0; i < pois.size(); ++i) {
        REQUIRE(pois[i].ax_value <= cfg.x_th);
        REQUIRE(pois[i].variance_sum > cfg.v_th);
        if (i > 0) REQUIRE(pois[i].t - pois[i - 1].t >= cfg.peak_min_gap);
        REQUIRE(extract_window(s, pois[i], cfg).rows == window_rows(s.rate, cfg.window_len));
      }

      const auto peaks = find_negative_peaks(s);
      const auto once = suppress_close_peaks(s, peaks, cfg.peak_min_gap);
      CHECK(suppress_close_peaks(s, once, cfg.peak_min_gap) == once);
    }
  }
}

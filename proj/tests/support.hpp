#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mfed/signal.hpp"

namespace testing {

// Noisy wrist-like trace: AR(1) noise, a handful of Gaussian X dips with Y
// swings, timing jitter, and sometimes a dropout that splits the series.
inline mfed::AccelSeries random_trace(std::mt19937_64& rng, double rate = 25.0) {
  std::uniform_int_distribution<int> len(1200, 3000);
  std::normal_distribution<double> noise(0.0, 0.8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = len(rng);
  mfed::AccelSeries s;
  s.rate = rate;
  s.samples.resize(n);
  double x = 0, y = 0, z = 0;
  const bool gap = u(rng) < 0.3;
  const int gap_at = static_cast<int>(u(rng) * n);
  const double gap_len = (2.0 + 40.0 * u(rng)) / rate;
  double shift = 0.0;
  for (int i = 0; i < n; ++i) {
    if (gap && i == gap_at) shift += gap_len;
    x = 0.9 * x + noise(rng);
    y = 0.9 * y + noise(rng);
    z = 0.9 * z + noise(rng);
    s.samples[i] = {i / rate + shift + (u(rng) - 0.5) * 0.4 / rate, x - 1.0, y, z};
  }
  const int dips = 3 + static_cast<int>(u(rng) * 8);
  for (int d = 0; d < dips; ++d) {
    const double c = s.samples.front().t + u(rng) * (s.samples.back().t - s.samples.front().t);
    const double depth = 1.0 + 7.0 * u(rng);
    const double sigma = 0.2 + 0.6 * u(rng);
    for (auto& p : s.samples) {
      const double k = (p.t - c) / sigma;
      const double g = std::exp(-0.5 * k * k);
      p.ax -= depth * g;
      p.ay += 0.5 * depth * g;
    }
  }
  return s;
}

inline mfed::DetectorConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mfed::DetectorConfig c;
  c.x_th = -1.0 - 4.0 * u(rng);
  c.v_th = 3.0 * u(rng);
  c.peak_min_gap = 0.5 + 2.5 * u(rng);
  c.window_len = 2.0 + 6.0 * u(rng);
  c.smooth_len = 1.5 * u(rng);
  return c;
}

// Sorted gesture times mixing dense bursts and stragglers, so clusters of
// every size and merge distances on both sides of the limits show up.
inline std::vector<double> random_gestures(std::mt19937_64& rng, double grid = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out;
  double t = 100.0 * u(rng);
  const int bursts = 1 + static_cast<int>(u(rng) * 6);
  for (int b = 0; b < bursts; ++b) {
    const int n = 1 + static_cast<int>(u(rng) * 7);
    for (int i = 0; i < n; ++i) {
      t += 5.0 + 70.0 * u(rng);
      out.push_back(t);
    }
    t += 30.0 + 400.0 * u(rng);
  }
  if (grid > 0) {
    for (auto& x : out) x = std::round(x / grid) * grid;
    std::sort(out.begin(), out.end());
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mfed-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing

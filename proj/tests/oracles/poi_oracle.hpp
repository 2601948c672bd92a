#pragma once

// Naive reference for smoothing and PoI detection. Every index is checked
// against the four predicates directly; nothing is shared with the library
// beyond the data types.

#include <cmath>
#include <cstddef>
#include <vector>

#include "mfed/signal.hpp"

namespace oracle {

inline std::vector<int> segment_ids(const mfed::AccelSeries& s) {
  std::vector<int> id(s.size(), 0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    id[i] = id[i - 1] + (s.samples[i].t - s.samples[i - 1].t > 1.5 / s.rate ? 1 : 0);
  }
  return id;
}

// O(n * w) centered average, window rounded up to odd, truncated at segment
// edges.
inline mfed::AccelSeries smooth_naive(const mfed::AccelSeries& s, double smooth_len) {
  long w = std::lround(smooth_len * s.rate);
  if (w <= 1) return s;
  if (w % 2 == 0) ++w;
  const long half = w / 2;
  const auto id = segment_ids(s);
  mfed::AccelSeries out = s;
  const long n = static_cast<long>(s.size());
  for (long i = 0; i < n; ++i) {
    long double sx = 0, sy = 0, sz = 0;
    long count = 0;
    for (long j = i - half; j <= i + half; ++j) {
      if (j < 0 || j >= n || id[j] != id[i]) continue;
      sx += s.samples[j].ax;
      sy += s.samples[j].ay;
      sz += s.samples[j].az;
      ++count;
    }
    out.samples[i].ax = static_cast<double>(sx / count);
    out.samples[i].ay = static_cast<double>(sy / count);
    out.samples[i].az = static_cast<double>(sz / count);
  }
  return out;
}

inline bool is_peak(const mfed::AccelSeries& s, const std::vector<int>& id, std::size_t i) {
  if (i == 0 || i + 1 >= s.size()) return false;
  if (id[i - 1] != id[i] || id[i + 1] != id[i]) return false;
  return s.samples[i].ax < s.samples[i - 1].ax && s.samples[i].ax < s.samples[i + 1].ax;
}

// Population variance via E[x^2] - E[x]^2 in long double.
inline bool variance_ok(const mfed::AccelSeries& s, const std::vector<int>& id, std::size_t i,
                        const mfed::DetectorConfig& cfg, double* out) {
  const long n = std::lround(cfg.window_len * s.rate);
  const long begin = static_cast<long>(i) - n / 2;
  const long end = begin + n;
  if (n <= 0 || begin < 0 || end > static_cast<long>(s.size())) return false;
  for (long j = begin; j < end; ++j) {
    if (id[j] != id[i]) return false;
  }
  long double total = 0;
  for (int axis = 0; axis < 3; ++axis) {
    long double sum = 0, sq = 0;
    for (long j = begin; j < end; ++j) {
      const auto& x = s.samples[j];
      const long double v = axis == 0 ? x.ax : axis == 1 ? x.ay : x.az;
      sum += v;
      sq += v * v;
    }
    const long double mean = sum / n;
    total += sq / n - mean * mean;
  }
  *out = static_cast<double>(total);
  return true;
}

// Indices of PoIs in an already smoothed series.
inline std::vector<std::size_t> pois_brute(const mfed::AccelSeries& s, const mfed::DetectorConfig& cfg) {
  const auto id = segment_ids(s);
  // 1. peaks
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_peak(s, id, i)) peaks.push_back(i);
  }
  // 2. suppression, one pass against the last survivor
  std::vector<std::size_t> kept;
  for (std::size_t p : peaks) {
    if (!kept.empty()) {
      const std::size_t last = kept.back();
      if (s.samples[p].t - s.samples[last].t < cfg.peak_min_gap) {
        if (s.samples[p].ax < s.samples[last].ax) kept.back() = p;
        continue;
      }
    }
    kept.push_back(p);
  }
  // 3. threshold, 4. variance
  std::vector<std::size_t> out;
  for (std::size_t p : kept) {
    if (s.samples[p].ax > cfg.x_th) continue;
    double v = 0;
    if (!variance_ok(s, id, p, cfg, &v)) continue;
    if (v > cfg.v_th) out.push_back(p);
  }
  return out;
}

}  // namespace oracle

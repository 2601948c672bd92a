#include "mfed/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfed/error.hpp"

namespace mfed {

void DetectorConfig::validate() const {
  if (!(x_th < 0.0)) throw ConfigError("x_th must be negative, got " + std::to_string(x_th));
  if (!(v_th >= 0.0)) throw ConfigError("v_th must be >= 0, got " + std::to_string(v_th));
  if (!(peak_min_gap > 0.0)) throw ConfigError("peak_min_gap must be positive");
  if (!(window_len > 0.0)) throw ConfigError("window_len must be positive");
  if (!(smooth_len >= 0.0)) throw ConfigError("smooth_len must be >= 0");
}

std::size_t window_rows(double rate, Seconds window_len) {
  return static_cast<std::size_t>(std::llround(window_len * rate));
}

std::vector<Segment> split_segments(const AccelSeries& series) {
  std::vector<Segment> out;
  const auto& s = series.samples;
  if (s.empty()) return out;
  const double max_step = 1.5 / series.rate;
  std::size_t begin = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].t - s[i - 1].t > max_step) {
      out.push_back({begin, i});
      begin = i;
    }
  }
  out.push_back({begin, s.size()});
  return out;
}

AccelSeries smooth(const AccelSeries& series, Seconds smooth_len) {
  auto width = static_cast<std::ptrdiff_t>(std::llround(smooth_len * series.rate));
  if (width <= 1 || series.empty()) return series;
  if (width % 2 == 0) ++width;
  const std::ptrdiff_t half = width / 2;

  AccelSeries out = series;
  const auto& in = series.samples;
  for (const auto& seg : split_segments(series)) {
    const auto b = static_cast<std::ptrdiff_t>(seg.begin);
    const auto e = static_cast<std::ptrdiff_t>(seg.end);
    // prefix sums over the segment, one per channel
    std::vector<double> px(e - b + 1, 0.0), py(e - b + 1, 0.0), pz(e - b + 1, 0.0);
    for (std::ptrdiff_t i = b; i < e; ++i) {
      px[i - b + 1] = px[i - b] + in[i].ax;
      py[i - b + 1] = py[i - b] + in[i].ay;
      pz[i - b + 1] = pz[i - b] + in[i].az;
    }
    for (std::ptrdiff_t i = b; i < e; ++i) {
      const std::ptrdiff_t lo = std::max(b, i - half) - b;
      const std::ptrdiff_t hi = std::min(e, i + half + 1) - b;
      const double n = static_cast<double>(hi - lo);
      out.samples[i].ax = (px[hi] - px[lo]) / n;
      out.samples[i].ay = (py[hi] - py[lo]) / n;
      out.samples[i].az = (pz[hi] - pz[lo]) / n;
    }
  }
  return out;
}

std::vector<std::size_t> find_negative_peaks(const AccelSeries& series) {
  std::vector<std::size_t> peaks;
  const auto& s = series.samples;
  for (const auto& seg : split_segments(series)) {
    for (std::size_t i = seg.begin + 1; i + 1 < seg.end; ++i) {
      if (s[i].ax < s[i - 1].ax && s[i].ax < s[i + 1].ax) peaks.push_back(i);
    }
  }
  return peaks;
}

std::vector<std::size_t> suppress_close_peaks(const AccelSeries& series, std::span<const std::size_t> peaks,
                                              Seconds min_gap) {
  const auto& s = series.samples;
  std::vector<std::size_t> kept;
  kept.reserve(peaks.size());
  for (std::size_t p : peaks) {
    if (!kept.empty() && s[p].t - s[kept.back()].t < min_gap) {
      if (s[p].ax < s[kept.back()].ax) kept.back() = p;
      continue;
    }
    kept.push_back(p);
  }
  return kept;
}

namespace {

struct WindowRange {
  std::size_t begin;
  std::size_t end;
};

std::optional<WindowRange> window_range(const AccelSeries& series, std::size_t center, const DetectorConfig& cfg,
                                        const std::vector<Segment>& segments) {
  const std::size_t n = window_rows(series.rate, cfg.window_len);
  if (n == 0 || center >= series.size()) return std::nullopt;
  const std::size_t half = n / 2;
  if (center < half) return std::nullopt;
  const std::size_t begin = center - half;
  const std::size_t end = begin + n;
  auto seg = std::upper_bound(segments.begin(), segments.end(), center,
                              [](std::size_t c, const Segment& s) { return c < s.end; });
  if (seg == segments.end() || begin < seg->begin || end > seg->end) return std::nullopt;
  return WindowRange{begin, end};
}

double population_variance(std::span<const AccelSample> xs, double AccelSample::*axis) {
  double mean = 0.0;
  for (const auto& x : xs) mean += x.*axis;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (const auto& x : xs) {
    const double d = x.*axis - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(xs.size());
}

std::optional<double> variance_sum_in(const AccelSeries& series, std::size_t center, const DetectorConfig& cfg,
                                      const std::vector<Segment>& segments) {
  const auto range = window_range(series, center, cfg, segments);
  if (!range) return std::nullopt;
  std::span<const AccelSample> w(series.samples.data() + range->begin, range->end - range->begin);
  return population_variance(w, &AccelSample::ax) + population_variance(w, &AccelSample::ay) +
         population_variance(w, &AccelSample::az);
}

}  // namespace

std::optional<double> window_variance_sum(const AccelSeries& series, std::size_t center, const DetectorConfig& cfg) {
  return variance_sum_in(series, center, cfg, split_segments(series));
}

std::vector<Poi> detect_pois(const AccelSeries& series, const DetectorConfig& cfg) {
  cfg.validate();
  if (!(series.rate > 0.0)) throw ConfigError("sampling rate must be positive");

  const auto peaks = find_negative_peaks(series);
  const auto kept = suppress_close_peaks(series, peaks, cfg.peak_min_gap);
  const auto segments = split_segments(series);

  std::vector<Poi> pois;
  for (std::size_t idx : kept) {
    const auto& s = series.samples[idx];
    if (!(s.ax <= cfg.x_th)) continue;
    const auto var = variance_sum_in(series, idx, cfg, segments);
    if (!var || !(*var > cfg.v_th)) continue;
    pois.push_back({idx, s.t, s.ax, *var});
  }
  return pois;
}

std::vector<Poi> detect_pois_raw(const AccelSeries& raw, const DetectorConfig& cfg) {
  return detect_pois(smooth(raw, cfg.smooth_len), cfg);
}

GestureWindow extract_window(const AccelSeries& series, const Poi& poi, const DetectorConfig& cfg) {
  const auto range = window_range(series, poi.index, cfg, split_segments(series));
  if (!range) {
    throw WindowOutOfBounds("window of " + std::to_string(cfg.window_len) + " s around t=" + std::to_string(poi.t) +
                            " leaves the series");
  }
  GestureWindow w;
  w.poi = poi;
  w.rows = range->end - range->begin;
  w.samples.reserve(w.rows * 3);
  for (std::size_t i = range->begin; i < range->end; ++i) {
    const auto& s = series.samples[i];
    w.samples.insert(w.samples.end(), {s.ax, s.ay, s.az});
  }
  return w;
}

Seconds poi_settle_delay(const DetectorConfig& cfg, double rate) {
  return std::max(cfg.peak_min_gap, cfg.window_len / 2.0) + cfg.smooth_len / 2.0 + 2.0 / rate;
}

void validate_rate(const AccelSeries& series) {
  if (!(series.rate > 0.0)) throw ConfigError("sampling rate must be positive");
  if (series.size() < 2) return;
  std::vector<double> dt;
  dt.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) dt.push_back(series.samples[i].t - series.samples[i - 1].t);
  auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  const double expected = 1.0 / series.rate;
  if (std::abs(*mid - expected) > 0.5 * expected) {
    throw ConfigError("declared rate " + std::to_string(series.rate) + " Hz does not match median sample spacing " +
                      std::to_string(*mid) + " s");
  }
}

}  // namespace mfed

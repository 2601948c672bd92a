#pragma once

// Threshold-based potential eating gesture detector. Used on the watch to
// decide when to upload and on the base station to pick the windows the CNN
// classifies.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mfed {

using Seconds = double;

struct AccelSample {
  Seconds t = 0.0;
  double ax = 0.0;  // along the forearm; negative when the wrist is raised
  double ay = 0.0;
  double az = 0.0;
};

struct AccelSeries {
  double rate = 25.0;  // Hz
  std::vector<AccelSample> samples;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
  /// Nominal duration, size / rate.
  Seconds duration() const noexcept { return rate > 0 ? static_cast<double>(samples.size()) / rate : 0.0; }
};

struct DetectorConfig {
  double x_th = -3.0;          // m/s^2
  double v_th = 1.0;           // (m/s^2)^2, summed over axes
  Seconds peak_min_gap = 2.0;
  Seconds window_len = 6.0;
  Seconds smooth_len = 1.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Point of interest: a surviving negative peak of smoothed X acceleration.
struct Poi {
  std::size_t index = 0;  // into the smoothed series
  Seconds t = 0.0;
  double ax_value = 0.0;
  double variance_sum = 0.0;

  friend bool operator==(const Poi&, const Poi&) = default;
};

enum class GestureLabel { Positive, Ambiguous, Negative };

struct GestureWindow {
  Poi poi;
  std::size_t rows = 0;
  std::vector<double> samples;  // rows x 3, row-major (ax, ay, az)
  std::optional<GestureLabel> label;

  double at(std::size_t row, std::size_t axis) const { return samples[row * 3 + axis]; }
};

/// Samples per gesture window, round(window_len * rate).
std::size_t window_rows(double rate, Seconds window_len);

/// Half-open [begin, end) index ranges of contiguous data. A gap larger than
/// 1.5 / rate between consecutive samples starts a new segment.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
};
std::vector<Segment> split_segments(const AccelSeries& series);

/// Centered moving average of every channel, truncated at segment edges.
/// The window is smooth_len * rate samples, rounded up to odd.
AccelSeries smooth(const AccelSeries& series, Seconds smooth_len);

/// Strict local minima of X acceleration, per segment.
std::vector<std::size_t> find_negative_peaks(const AccelSeries& series);

/// Single left-to-right pass: of two peaks closer than min_gap keep the more
/// negative one (the earlier on ties). Input must be sorted by time.
std::vector<std::size_t> suppress_close_peaks(const AccelSeries& series, std::span<const std::size_t> peaks,
                                              Seconds min_gap);

/// Population variance of each axis over the window centered on `center`,
/// summed. Empty when the window leaves the segment holding `center`.
std::optional<double> window_variance_sum(const AccelSeries& series, std::size_t center, const DetectorConfig& cfg);

/// Peak -> suppression -> X threshold -> variance threshold. `series` is
/// expected to be smoothed already.
std::vector<Poi> detect_pois(const AccelSeries& series, const DetectorConfig& cfg);

/// Convenience: smooth with cfg.smooth_len, then detect.
std::vector<Poi> detect_pois_raw(const AccelSeries& raw, const DetectorConfig& cfg);

/// N x 3 window centered on poi.index; rows [index - N/2, index - N/2 + N).
/// Throws WindowOutOfBounds when it does not fit inside the poi's segment.
GestureWindow extract_window(const AccelSeries& series, const Poi& poi, const DetectorConfig& cfg);

/// How long after a peak its PoI status is settled in a growing stream:
/// later samples can no longer change suppression, threshold or variance.
Seconds poi_settle_delay(const DetectorConfig& cfg, double rate);

/// Median spacing check used when a trace declares its rate. Throws
/// ConfigError if the median spacing is more than 50% off 1 / rate.
void validate_rate(const AccelSeries& series);

}  // namespace mfed

#pragma once

// Offline evaluation: gesture matching against annotations, PoI rates and
// threshold sweeps.

#include <iosfwd>
#include <string>
#include <vector>

#include "mfed/classifier.hpp"
#include "mfed/signal.hpp"

namespace mfed {

struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;  // 0 when tp + fp == 0
  double recall = 0.0;     // 0 when tp + fn == 0
  double f1 = 0.0;         // 0 when precision + recall == 0

  static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

/// One-to-one matching of detections to annotations: detections in time
/// order each take the earliest unmatched annotation within +-tolerance.
/// Both inputs must be sorted.
Metrics match_gestures(const std::vector<Seconds>& detected, const std::vector<Seconds>& annotations,
                       Seconds tolerance = 4.0);

struct PoiRateReport {
  double pois_per_minute = 0.0;
  double ratio_vs_sliding_3s = 0.0;    // per minute / 20
  double ratio_vs_sliding_100ms = 0.0; // per minute / 600

  static PoiRateReport from_count(std::size_t pois, Seconds duration);
};

/// PoIs per minute of the raw trace (smoothed, then detected). Throws
/// InsufficientData when the trace has no duration.
PoiRateReport poi_rate(const AccelSeries& raw, const DetectorConfig& cfg);

/// Smoothed series, PoIs and the gesture times the CNN accepts. Without
/// weights every PoI counts as a gesture.
struct GestureDetection {
  std::vector<Poi> pois;
  std::vector<double> probabilities;  // per PoI; empty without weights
  std::vector<Seconds> gestures;
};
GestureDetection detect_gestures(const AccelSeries& raw, const DetectorConfig& cfg, const cnn::ModelWeights* weights,
                                 double threshold = 0.5);

/// Training windows for every PoI of a raw trace, labeled against the
/// annotations. Windows come from the smoothed series.
std::vector<cnn::LabeledWindow> labeled_windows(const AccelSeries& raw, const std::vector<Seconds>& annotations,
                                                const DetectorConfig& cfg, const std::string& source);

struct SweepRow {
  double x_th = 0.0;
  double v_th = 0.0;
  double pois_per_min = 0.0;
  Metrics metrics;
};

/// Full cross-product of thresholds, x_th outer, v_th inner. Other detector
/// settings come from `base`. Throws ConfigError on an empty list.
std::vector<SweepRow> threshold_sweep(const AccelSeries& raw, const std::vector<Seconds>& annotations,
                                      const std::vector<double>& x_th_list, const std::vector<double>& v_th_list,
                                      const cnn::ModelWeights* weights, const DetectorConfig& base = {},
                                      Seconds tolerance = 4.0, double threshold = 0.5);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace mfed

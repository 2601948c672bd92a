#include "mfed/evaluation.hpp"

#include <cmath>
#include <ostream>

#include "mfed/error.hpp"

namespace mfed {

Metrics Metrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Metrics m{tp, fp, fn};
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0 ? 0.0 : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics match_gestures(const std::vector<Seconds>& detected, const std::vector<Seconds>& annotations,
                       Seconds tolerance) {
  std::size_t tp = 0;
  std::size_t next = 0;  // annotations before this are matched or out of reach
  for (Seconds d : detected) {
    while (next < annotations.size() && annotations[next] < d - tolerance) ++next;
    if (next < annotations.size() && annotations[next] <= d + tolerance) {
      ++tp;
      ++next;
    }
  }
  return Metrics::from_counts(tp, detected.size() - tp, annotations.size() - tp);
}

PoiRateReport PoiRateReport::from_count(std::size_t pois, Seconds duration) {
  if (!(duration > 0)) throw InsufficientData("PoI rate needs a trace with positive duration");
  PoiRateReport r;
  r.pois_per_minute = static_cast<double>(pois) / (duration / 60.0);
  r.ratio_vs_sliding_3s = r.pois_per_minute / 20.0;
  r.ratio_vs_sliding_100ms = r.pois_per_minute / 600.0;
  return r;
}

PoiRateReport poi_rate(const AccelSeries& raw, const DetectorConfig& cfg) {
  if (raw.empty()) throw InsufficientData("PoI rate needs a trace with positive duration");
  return PoiRateReport::from_count(detect_pois_raw(raw, cfg).size(), raw.duration());
}

GestureDetection detect_gestures(const AccelSeries& raw, const DetectorConfig& cfg, const cnn::ModelWeights* weights,
                                 double threshold) {
  GestureDetection out;
  const AccelSeries smoothed = smooth(raw, cfg.smooth_len);
  out.pois = detect_pois(smoothed, cfg);
  for (const auto& poi : out.pois) {
    if (!weights) {
      out.gestures.push_back(poi.t);
      continue;
    }
    const double p = cnn::forward(*weights, extract_window(smoothed, poi, cfg));
    out.probabilities.push_back(p);
    if (cnn::decide(p, threshold) == cnn::Decision::EatingGesture) out.gestures.push_back(poi.t);
  }
  return out;
}

std::vector<cnn::LabeledWindow> labeled_windows(const AccelSeries& raw, const std::vector<Seconds>& annotations,
                                                const DetectorConfig& cfg, const std::string& source) {
  const auto smoothed = smooth(raw, cfg.smooth_len);
  std::vector<cnn::LabeledWindow> out;
  for (const auto& poi : detect_pois(smoothed, cfg)) {
    out.push_back({extract_window(smoothed, poi, cfg), cnn::label_poi(poi.t, annotations), source});
  }
  return out;
}

std::vector<SweepRow> threshold_sweep(const AccelSeries& raw, const std::vector<Seconds>& annotations,
                                      const std::vector<double>& x_th_list, const std::vector<double>& v_th_list,
                                      const cnn::ModelWeights* weights, const DetectorConfig& base,
                                      Seconds tolerance, double threshold) {
  if (x_th_list.empty() || v_th_list.empty()) throw ConfigError("threshold sweep needs at least one x_th and v_th");
  if (raw.empty()) throw InsufficientData("threshold sweep needs a non-empty trace");
  std::vector<SweepRow> rows;
  for (double x : x_th_list) {
    for (double v : v_th_list) {
      DetectorConfig cfg = base;
      cfg.x_th = x;
      cfg.v_th = v;
      const auto det = detect_gestures(raw, cfg, weights, threshold);
      SweepRow row;
      row.x_th = x;
      row.v_th = v;
      row.pois_per_min = PoiRateReport::from_count(det.pois.size(), raw.duration()).pois_per_minute;
      row.metrics = match_gestures(det.gestures, annotations, tolerance);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "x_th,v_th,pois_per_min,tp,fp,fn,precision,recall,f1\n";
  for (const auto& r : rows) {
    out << r.x_th << ',' << r.v_th << ',' << r.pois_per_min << ',' << r.metrics.tp << ',' << r.metrics.fp << ','
        << r.metrics.fn << ',' << r.metrics.precision << ',' << r.metrics.recall << ',' << r.metrics.f1 << '\n';
  }
}

}  // namespace mfed

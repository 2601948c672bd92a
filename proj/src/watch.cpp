#include "mfed/watch.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <utility>

#include "mfed/error.hpp"

namespace mfed {

void UploadPolicy::validate() const {
  if (quorum < 1) throw ConfigError("upload quorum must be >= 1");
  if (!(quorum_window > 0.0)) throw ConfigError("quorum_window must be positive");
  if (!(min_upload_gap >= 0.0)) throw ConfigError("min_upload_gap must be >= 0");
}

void DutyCycleConfig::validate() const {
  if (!enabled) return;
  if (!(beacon_scan_len > 0.0) || !(beacon_scan_len < beacon_interval)) {
    throw ConfigError("beacon scan length must be positive and shorter than its interval");
  }
  if (!(battery_interval > 0.0)) throw ConfigError("battery_interval must be positive");
}

WatchNode::WatchNode(std::string participant_id, double rate, UploadPolicy policy, DutyCycleConfig duty,
                     std::size_t max_buffer_samples)
    : policy_(policy), duty_(duty), max_buffer_(max_buffer_samples) {
  policy_.validate();
  duty_.validate();
  state_.participant_id = std::move(participant_id);
  buffer_.rate = rate;
}

void WatchNode::advance_clock(Seconds now) {
  if (clock_ && now < *clock_) throw ClockRegression(*clock_, now);
  if (!clock_ && duty_.enabled) {
    next_scan_ = std::ceil(now / duty_.beacon_interval) * duty_.beacon_interval;
    next_battery_ = std::ceil(now / duty_.battery_interval) * duty_.battery_interval;
  }
  clock_ = now;
}

void WatchNode::ingest(const AccelSample& sample) {
  if (!started_) {
    state_.buffer_start = sample.t;
    started_ = true;
  }
  buffer_.samples.push_back(sample);
  if (max_buffer_ > 0 && buffer_.samples.size() > max_buffer_) {
    const auto excess = buffer_.samples.size() - max_buffer_;
    buffer_.samples.erase(buffer_.samples.begin(), buffer_.samples.begin() + static_cast<std::ptrdiff_t>(excess));
    dropped_ += excess;
    state_.buffer_start = buffer_.samples.front().t;
  }
}

Upload WatchNode::make_upload(Seconds now) {
  Upload up;
  auto& p = up.payload;
  p.participant_id = state_.participant_id;
  p.span_start = state_.buffer_start;
  p.span_end = now;
  p.accel.rate = buffer_.rate;

  auto split = std::find_if(buffer_.samples.begin(), buffer_.samples.end(),
                            [now](const AccelSample& s) { return s.t > now; });
  p.accel.samples.assign(buffer_.samples.begin(), split);
  buffer_.samples.erase(buffer_.samples.begin(), split);

  auto take = [now](auto& records, auto& into) {
    auto it = std::stable_partition(records.begin(), records.end(), [now](const auto& r) { return r.t <= now; });
    into.assign(records.begin(), it);
    records.erase(records.begin(), it);
  };
  take(beacons_, p.beacon_readings);
  take(battery_, p.battery_samples);

  state_.buffer_start = now;
  state_.last_upload_t = now;
  state_.pending_quorum = false;
  state_.poi_times.clear();
  return up;
}

std::optional<Upload> WatchNode::on_poi(Seconds poi_t, Seconds now) {
  advance_clock(now);
  auto& times = state_.poi_times;
  times.push_back(poi_t);
  std::sort(times.begin(), times.end());
  const Seconds newest = times.back();
  while (!times.empty() && times.front() < newest - policy_.quorum_window) times.pop_front();

  const bool quorum = static_cast<int>(times.size()) >= policy_.quorum;
  if (!quorum && !state_.pending_quorum) return std::nullopt;
  const bool cooled = !state_.last_upload_t || now - *state_.last_upload_t >= policy_.min_upload_gap;
  if (!cooled) {
    state_.pending_quorum = true;
    return std::nullopt;
  }
  return make_upload(now);
}

std::vector<WatchAction> WatchNode::on_tick(Seconds now) {
  advance_clock(now);
  std::vector<WatchAction> actions;
  if (duty_.enabled) {
    // Scan windows are [k * interval, k * interval + len); emit every edge
    // that has been reached.
    while (true) {
      if (scan_stop_) {
        if (*scan_stop_ > now) break;
        actions.emplace_back(BeaconScanStop{*scan_stop_});
        scan_stop_.reset();
        next_scan_ += duty_.beacon_interval;
        continue;
      }
      if (next_scan_ > now) break;
      actions.emplace_back(BeaconScanStart{next_scan_});
      scan_stop_ = next_scan_ + duty_.beacon_scan_len;
    }
    while (next_battery_ <= now) {
      actions.emplace_back(BatteryTick{next_battery_});
      next_battery_ += duty_.battery_interval;
    }
  }
  if (state_.pending_quorum && state_.last_upload_t && now - *state_.last_upload_t >= policy_.min_upload_gap) {
    actions.emplace_back(make_upload(now));
  }
  std::stable_sort(actions.begin(), actions.end(), [](const WatchAction& a, const WatchAction& b) {
    auto time_of = [](const WatchAction& x) {
      return std::visit(
          [](const auto& v) -> Seconds {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Upload>) {
              return v.payload.span_end;
            } else {
              return v.t;
            }
          },
          x);
    };
    return time_of(a) < time_of(b);
  });
  return actions;
}

void WatchNode::record_beacon(BeaconReading reading) { beacons_.push_back(std::move(reading)); }

void WatchNode::record_battery(BatterySample sample) { battery_.push_back(sample); }

std::optional<Upload> WatchNode::flush(Seconds now) {
  advance_clock(now);
  if (buffer_.samples.empty() && beacons_.empty() && battery_.empty()) return std::nullopt;
  return make_upload(now);
}

}  // namespace mfed

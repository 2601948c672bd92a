#pragma once

// Watch-side node: buffers accelerometer data, decides when a run of PoIs
// justifies an upload, and runs the beacon-scan / battery duty cycles.

#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfed/signal.hpp"

namespace mfed {

struct UploadPolicy {
  int quorum = 4;
  Seconds quorum_window = 120.0;
  Seconds min_upload_gap = 60.0;

  void validate() const;
};

struct DutyCycleConfig {
  bool enabled = true;
  Seconds beacon_scan_len = 5.0;
  Seconds beacon_interval = 120.0;
  Seconds battery_interval = 120.0;

  void validate() const;
};

struct BeaconReading {
  Seconds t = 0.0;
  std::string beacon_id;
  double rssi_dbm = 0.0;
};

struct BatterySample {
  Seconds t = 0.0;
  double percent = 0.0;
};

struct UploadPayload {
  std::string participant_id;
  Seconds span_start = 0.0;  // buffer_start
  Seconds span_end = 0.0;    // upload time
  AccelSeries accel;
  std::vector<BeaconReading> beacon_readings;
  std::vector<BatterySample> battery_samples;
};

struct WatchState {
  std::string participant_id;
  std::deque<Seconds> poi_times;
  Seconds buffer_start = 0.0;
  std::optional<Seconds> last_upload_t;
  bool pending_quorum = false;
};

struct BeaconScanStart {
  Seconds t;
};
struct BeaconScanStop {
  Seconds t;
};
struct BatteryTick {
  Seconds t;
};
struct Upload {
  UploadPayload payload;
};

using WatchAction = std::variant<Upload, BeaconScanStart, BeaconScanStop, BatteryTick>;

/// One participant's watch. Feed it samples with `ingest`, PoIs with
/// `on_poi`, and advance time with `on_tick`. Beacon and battery records
/// produced in response to the duty-cycle actions go in via `record_*` and
/// ride along with the next upload.
class WatchNode {
 public:
  WatchNode(std::string participant_id, double rate, UploadPolicy policy = {}, DutyCycleConfig duty = {},
            std::size_t max_buffer_samples = 0);

  /// Samples must arrive in time order. With a non-zero max_buffer_samples
  /// the oldest unsent samples are dropped first.
  void ingest(const AccelSample& sample);

  /// Returns an Upload when the quorum is met and the cooldown allows it.
  std::optional<Upload> on_poi(Seconds poi_t, Seconds now);

  /// Duty-cycle edges in (last tick, now] plus any upload deferred by the
  /// cooldown, in time order. Edges sit on multiples of the intervals; the
  /// first is the first multiple at or after the watch's first clock reading.
  std::vector<WatchAction> on_tick(Seconds now);

  void record_beacon(BeaconReading reading);
  void record_battery(BatterySample sample);

  /// Sends whatever is still buffered regardless of quorum and cooldown.
  /// Used at the end of a replay so no data is left behind.
  std::optional<Upload> flush(Seconds now);

  const WatchState& state() const noexcept { return state_; }
  const UploadPolicy& policy() const noexcept { return policy_; }
  std::size_t dropped_samples() const noexcept { return dropped_; }

 private:
  void advance_clock(Seconds now);
  Upload make_upload(Seconds now);

  WatchState state_;
  UploadPolicy policy_;
  DutyCycleConfig duty_;
  std::size_t max_buffer_;
  std::size_t dropped_ = 0;
  bool started_ = false;

  AccelSeries buffer_;
  std::vector<BeaconReading> beacons_;
  std::vector<BatterySample> battery_;

  std::optional<Seconds> clock_;
  Seconds next_scan_ = 0.0;
  std::optional<Seconds> scan_stop_;
  Seconds next_battery_ = 0.0;
};

}  // namespace mfed

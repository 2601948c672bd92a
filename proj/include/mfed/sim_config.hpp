#pragma once

// Home configuration for the simulator. Files are JSON; see docs/formats.md.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfed/classifier.hpp"
#include "mfed/ema.hpp"
#include "mfed/events.hpp"
#include "mfed/watch.hpp"

namespace mfed::sim {

/// Stand-in for a human answering surveys.
struct ResponderProfile {
  double response_prob = 1.0;
  Seconds delay_min = 30.0;
  Seconds delay_max = 300.0;
  bool truthful = true;  // answers follow the participant's annotations

  void validate() const;
};

/// Log-distance path loss: rssi = tx_power - 10 n log10(d) + N(0, sd).
struct BeaconConfig {
  std::string id;
  double tx_power_dbm = -59.0;
  double path_loss_exponent = 2.0;
  double distance_m = 3.0;
  double shadowing_sd = 2.0;
};

struct ParticipantConfig {
  ema::Participant participant;
  std::optional<std::string> trace_path;
  std::optional<std::string> annotations_path;
  std::optional<AccelSeries> trace;  // in-memory alternative to trace_path
  std::vector<Seconds> annotations;  // used when annotations_path is empty
  ResponderProfile responder;
};

struct HomeConfig {
  std::string home_id = "home";
  std::uint64_t seed = 1;
  Seconds start_clock = 0.0;          // local time of trace t = 0, seconds since midnight
  std::optional<Seconds> duration;    // default: longest trace
  double rate = 25.0;
  std::optional<std::string> weights_path;
  std::optional<cnn::ModelWeights> weights;  // in-memory alternative
  double decision_threshold = 0.5;
  DetectorConfig detector;
  UploadPolicy policy;
  DutyCycleConfig duty;
  double battery_drain_per_hour = 4.0;
  ema::EmaPolicy ema;
  EventRules events;
  std::vector<BeaconConfig> beacons;
  std::vector<ParticipantConfig> participants;
  std::optional<std::string> ground_truth_out;

  /// Throws ConfigError: empty or duplicate participant ids, bad sub-configs.
  void validate() const;
};

/// Parses one home, or every home of a {"homes": [...]} document. Relative
/// file paths resolve against `base_dir`. Unknown keys are rejected.
std::vector<HomeConfig> parse_home_configs(const std::string& json_text, const std::string& base_dir = ".");
std::vector<HomeConfig> load_home_configs(const std::string& path);

/// MFED_SEED from the environment, if set. Throws ConfigError when it is not
/// an unsigned integer.
std::optional<std::uint64_t> seed_from_env();

/// "HH:MM" or "HH:MM:SS" to seconds since midnight.
Seconds parse_clock(const std::string& text);

}  // namespace mfed::sim

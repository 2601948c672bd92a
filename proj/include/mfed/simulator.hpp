#pragma once

// Discrete-event replay of one or more homes: watches ingest traces and
// upload on PoI quorum, the base station classifies uploaded PoIs and groups
// them into eating events, the EMA engine sends surveys and simulated
// responders answer them. Everything runs on a virtual clock.

#include <iosfwd>
#include <string>
#include <vector>

#include "mfed/ground_truth.hpp"
#include "mfed/sim_config.hpp"

namespace mfed::sim {

struct UploadRecord {
  std::string participant_id;
  Seconds t = 0.0;
  Seconds span_start = 0.0;
  Seconds span_end = 0.0;
  std::size_t samples = 0;
  std::size_t beacon_readings = 0;
  std::size_t battery_samples = 0;
};

/// A PoI the base station classified as an eating gesture, with the upload
/// whose data settled it.
struct GestureRecord {
  std::string participant_id;
  Seconds t = 0.0;
  Seconds upload_t = 0.0;
  double probability = 1.0;
};

struct SimResult {
  std::string home_id;
  /// One JSON object per line, ordered by virtual time. Times are local
  /// clock milliseconds.
  std::vector<std::string> log;
  std::vector<UploadRecord> uploads;
  std::vector<GestureRecord> gestures;
  std::vector<EatingEvent> events;  // finalized
  std::vector<ema::EmaSurvey> surveys;
  std::vector<ema::EmaResponse> responses;
  std::vector<std::string> expired;  // survey ids
  std::vector<ema::GroundTruthRecord> ground_truth;
  std::vector<ema::HourlyGroundTruth> hourly_truth;
  std::vector<ema::Participant> roster;
};

/// Loads traces, annotations and weights named by path, then runs.
/// Deterministic for a given config and seed. Throws ConfigError and the
/// trace loaders' ParseError / NonMonotonicTimestamp.
SimResult run_home_simulation(const HomeConfig& config);

/// Runs homes on up to `threads` worker threads (0: hardware concurrency).
/// Results come back in config order.
std::vector<SimResult> run_simulations(const std::vector<HomeConfig>& homes, unsigned threads = 0);

/// Merges logs of several homes by time, ties broken by home order then
/// line order.
void write_log(std::ostream& out, const std::vector<SimResult>& results);

/// subject_id,start_ms,end_ms,fact,provenance,sources
void write_ground_truth_csv(std::ostream& out, const std::vector<SimResult>& results);

}  // namespace mfed::sim

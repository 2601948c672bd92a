#pragma once

// Eating events from classified eating gestures. Gestures no more than 60 s
// apart form a cluster; clusters with fewer than 3 gestures are dropped;
// surviving clusters no more than 240 s apart form one event.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfed/signal.hpp"

namespace mfed {

struct EventRules {
  Seconds cluster_gap = 60.0;
  std::size_t min_cluster_size = 3;
  Seconds merge_gap = 240.0;
};

struct GestureCluster {
  std::vector<Seconds> gesture_times;
  Seconds start = 0.0;
  Seconds end = 0.0;

  std::size_t size() const noexcept { return gesture_times.size(); }
  friend bool operator==(const GestureCluster&, const GestureCluster&) = default;
};

struct EatingEvent {
  int id = 0;
  std::string participant_id;
  std::vector<GestureCluster> clusters;
  Seconds start = 0.0;
  Seconds end = 0.0;
  std::size_t gesture_count = 0;

  std::vector<Seconds> gestures() const;
  /// Same clusters, participant and bounds; ids are not compared.
  bool same_content(const EatingEvent& other) const;
};

/// Maximal runs with consecutive gaps <= cluster_gap. `times` must be sorted.
std::vector<GestureCluster> cluster_gestures(const std::vector<Seconds>& times, const EventRules& rules = {});

/// Cluster, drop small clusters, merge the rest. Events are ordered by start
/// and numbered from 0.
std::vector<EatingEvent> detect_events(const std::vector<Seconds>& times, const std::string& participant_id = "",
                                       const EventRules& rules = {});

struct EventDetected {
  EatingEvent event;  // snapshot at detection
  Seconds detect_t;
};

struct EventFinalized {
  EatingEvent event;
  Seconds finalize_t;  // earliest time the event could no longer grow
};

using StreamOutput = std::variant<EventDetected, EventFinalized>;

/// Online version of detect_events for one participant. EventDetected fires
/// when a new event's first cluster reaches the minimum size; EventFinalized
/// fires once no future gesture can extend the event. The finalized events
/// equal detect_events over the same gesture times.
class StreamEventDetector {
 public:
  explicit StreamEventDetector(std::string participant_id, EventRules rules = {});

  std::vector<StreamOutput> on_gesture(Seconds gesture_t);
  /// Moves the clock without a gesture.
  std::vector<StreamOutput> advance(Seconds now);
  /// End of stream: finalizes whatever is open.
  std::vector<StreamOutput> flush();

  bool has_open_event() const noexcept { return open_.has_value(); }

 private:
  void check_clock(Seconds now);
  std::optional<Seconds> finalize_time(Seconds now) const;

  std::string participant_;
  EventRules rules_;
  std::optional<Seconds> clock_;
  std::optional<EatingEvent> open_;
  std::vector<Seconds> run_;
  bool run_in_event_ = false;
  int next_id_ = 0;
};

}  // namespace mfed

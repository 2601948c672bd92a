#include "mfed/events.hpp"

#include <algorithm>
#include <utility>

#include "mfed/error.hpp"

namespace mfed {

std::vector<Seconds> EatingEvent::gestures() const {
  std::vector<Seconds> out;
  out.reserve(gesture_count);
  for (const auto& c : clusters) out.insert(out.end(), c.gesture_times.begin(), c.gesture_times.end());
  return out;
}

bool EatingEvent::same_content(const EatingEvent& other) const {
  return participant_id == other.participant_id && clusters == other.clusters && start == other.start &&
         end == other.end && gesture_count == other.gesture_count;
}

namespace {

GestureCluster make_cluster(std::vector<Seconds> times) {
  GestureCluster c;
  c.start = times.front();
  c.end = times.back();
  c.gesture_times = std::move(times);
  return c;
}

void add_cluster(EatingEvent& e, GestureCluster c) {
  if (e.clusters.empty()) e.start = c.start;
  e.end = c.end;
  e.gesture_count += c.size();
  e.clusters.push_back(std::move(c));
}

}  // namespace

std::vector<GestureCluster> cluster_gestures(const std::vector<Seconds>& times, const EventRules& rules) {
  std::vector<GestureCluster> out;
  std::vector<Seconds> run;
  for (Seconds t : times) {
    if (!run.empty() && t - run.back() > rules.cluster_gap) {
      out.push_back(make_cluster(std::move(run)));
      run.clear();
    }
    run.push_back(t);
  }
  if (!run.empty()) out.push_back(make_cluster(std::move(run)));
  return out;
}

std::vector<EatingEvent> detect_events(const std::vector<Seconds>& times, const std::string& participant_id,
                                       const EventRules& rules) {
  std::vector<EatingEvent> events;
  for (auto& c : cluster_gestures(times, rules)) {
    if (c.size() < rules.min_cluster_size) continue;
    if (events.empty() || c.start - events.back().end > rules.merge_gap) {
      EatingEvent e;
      e.id = static_cast<int>(events.size());
      e.participant_id = participant_id;
      events.push_back(std::move(e));
    }
    add_cluster(events.back(), std::move(c));
  }
  return events;
}

StreamEventDetector::StreamEventDetector(std::string participant_id, EventRules rules)
    : participant_(std::move(participant_id)), rules_(rules) {}

void StreamEventDetector::check_clock(Seconds now) {
  if (clock_ && now < *clock_) throw ClockRegression(*clock_, now);
  clock_ = now;
}

std::optional<Seconds> StreamEventDetector::finalize_time(Seconds now) const {
  if (!open_) return std::nullopt;
  const Seconds reach = open_->end + rules_.merge_gap;
  // a new run may still start at exactly `reach`
  if (!(now > reach)) return std::nullopt;
  Seconds when = reach;
  if (!run_in_event_ && !run_.empty() && run_.front() - open_->end <= rules_.merge_gap) {
    // a short run within reach could still grow into a mergeable cluster
    const Seconds run_dies = run_.back() + rules_.cluster_gap;
    if (!(now > run_dies)) return std::nullopt;
    when = std::max(when, run_dies);
  }
  return when;
}

std::vector<StreamOutput> StreamEventDetector::advance(Seconds now) {
  check_clock(now);
  std::vector<StreamOutput> out;
  if (auto when = finalize_time(now)) {
    out.emplace_back(EventFinalized{std::move(*open_), *when});
    open_.reset();
    if (run_in_event_) {
      run_.clear();
      run_in_event_ = false;
    }
  }
  return out;
}

std::vector<StreamOutput> StreamEventDetector::on_gesture(Seconds t) {
  auto out = advance(t);

  if (!run_.empty() && t - run_.back() > rules_.cluster_gap) {
    run_.clear();
    run_in_event_ = false;
  }
  run_.push_back(t);

  if (run_in_event_) {
    auto& cluster = open_->clusters.back();
    cluster.gesture_times.push_back(t);
    cluster.end = t;
    open_->end = t;
    ++open_->gesture_count;
  } else if (run_.size() >= rules_.min_cluster_size) {
    run_in_event_ = true;
    if (open_ && run_.front() - open_->end <= rules_.merge_gap) {
      add_cluster(*open_, make_cluster(run_));
    } else {
      EatingEvent e;
      e.id = next_id_++;
      e.participant_id = participant_;
      add_cluster(e, make_cluster(run_));
      open_ = std::move(e);
      out.emplace_back(EventDetected{*open_, t});
    }
  }
  return out;
}

std::vector<StreamOutput> StreamEventDetector::flush() {
  std::vector<StreamOutput> out;
  if (open_) {
    const Seconds when = std::max(clock_.value_or(open_->end), open_->end);
    out.emplace_back(EventFinalized{std::move(*open_), when});
    open_.reset();
  }
  run_.clear();
  run_in_event_ = false;
  return out;
}

}  // namespace mfed

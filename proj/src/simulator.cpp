#include "mfed/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mfed/error.hpp"
#include "mfed/trace_io.hpp"

namespace mfed::sim {

using json = nlohmann::ordered_json;

namespace {

constexpr Seconds kInf = std::numeric_limits<Seconds>::infinity();

// Same-time events run in this order.
enum class EvType { WatchTick, CooldownTick, PoiRelease, HourTick, EmaDispatch, EmaRespond, EmaDone, EmaExpire, End };

struct Ev {
  Seconds t = 0.0;
  EvType type = EvType::End;
  std::uint64_t seq = 0;
  std::size_t who = 0;
  Seconds poi_t = 0.0;  // PoiRelease; event start for EmaDispatch
  Seconds detect_t = 0.0;
  int event_id = 0;
  std::string survey_id;
};

struct EvLater {
  bool operator()(const Ev& a, const Ev& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.type != b.type) return a.type > b.type;
    return a.seq > b.seq;
  }
};

struct PendingSurvey {
  ema::EmaSurvey survey;
  std::size_t who = 0;
  Seconds event_start = 0.0;
  std::optional<ema::EmaFlowState> flow;  // waiting for DONE
};

struct Agent {
  ParticipantConfig cfg;
  AccelSeries trace;  // local clock
  std::vector<Seconds> annotations;
  std::size_t next_sample = 0;
  std::unique_ptr<WatchNode> watch;
  std::optional<Seconds> cooldown_tick;

  AccelSeries received;
  Seconds cutoff = -kInf;
  std::unique_ptr<StreamEventDetector> detector;

  ema::ScheduleState schedule;
  std::mt19937_64 responder_rng;
  std::mt19937_64 sensor_rng;
  int survey_count = 0;

  const ema::Participant& who() const { return cfg.participant; }
};

long long ms(Seconds t) { return to_ms(t); }

bool any_in(const std::vector<Seconds>& sorted, Seconds lo, Seconds hi) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), lo);
  return it != sorted.end() && *it <= hi;
}

// How `other` shows up in `reporter`'s who-with answer.
ema::WhoWith relation(ema::Role reporter, ema::Role other) {
  using ema::Role;
  using ema::WhoWith;
  const bool child = reporter == Role::Son || reporter == Role::Daughter;
  const bool parent = reporter == Role::Mother || reporter == Role::Father;
  if (other == Role::Other) return WhoWith::OtherPeople;
  if (other == Role::OtherFamily) return WhoWith::OtherFamily;
  if (child) {
    switch (other) {
      case Role::Mother: return WhoWith::Mother;
      case Role::Father: return WhoWith::Father;
      case Role::Son: return WhoWith::Brothers;
      case Role::Daughter: return WhoWith::Sisters;
      default: break;
    }
  }
  if (parent) {
    if (other == Role::Son || other == Role::Daughter) return WhoWith::Children;
    if (other != reporter) return WhoWith::SpousePartner;
  }
  return WhoWith::OtherFamily;
}

json to_json(const ema::EmaResponse& r) {
  json j;
  j["survey"] = r.survey_id;
  j["ema_kind"] = ema::to_string(r.kind);
  j["sent_ms"] = ms(r.sent_t);
  if (r.event_t) j["event_ms"] = ms(*r.event_t);
  if (r.eating_confirmed) j["eating"] = *r.eating_confirmed;
  if (r.ate_last_hour) j["ate_last_hour"] = *r.ate_last_hour;
  if (r.mood) j["mood"] = *r.mood;
  if (r.hunger) j["hunger"] = *r.hunger;
  if (r.satiety) j["satiety"] = *r.satiety;
  if (r.eah) j["eah"] = *r.eah;
  if (r.eating_type) j["eating_type"] = ema::to_string(*r.eating_type);
  if (!r.who_with.empty()) {
    json w = json::array();
    for (auto x : r.who_with) w.push_back(ema::to_string(x));
    j["who_with"] = w;
  }
  if (!r.not_eating_activity.empty()) {
    json a = json::array();
    for (auto x : r.not_eating_activity) a.push_back(ema::to_string(x));
    j["activity"] = a;
  }
  return j;
}

class HomeSim {
 public:
  explicit HomeSim(const HomeConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    result_.home_id = cfg_.home_id;
    load();
  }

  SimResult run();

 private:
  void load();
  void push(Ev e) {
    e.seq = seq_++;
    queue_.push(std::move(e));
  }
  json record(Seconds t, const char* kind, const Agent* a);
  void emit(Seconds t, json j) { lines_.emplace_back(ms(t), j.dump()); }

  void feed_watch(Agent& a, Seconds now);
  void schedule_cooldown(std::size_t i);
  void handle_actions(std::size_t i, std::vector<WatchAction> actions, Seconds now);
  void handle_upload(std::size_t i, const UploadPayload& payload, Seconds now, bool flush = false);
  void base_station(std::size_t i, Seconds now, bool final);
  void handle_stream(std::size_t i, const std::vector<StreamOutput>& outs, Seconds now);
  void dispatch(std::size_t i, ema::EmaKind kind, Seconds at, ema::EmaTrigger trigger, std::optional<Seconds> event_t,
                Seconds event_start);
  void respond(const std::string& survey_id, Seconds now);
  void finish_eating(PendingSurvey& ps, ema::EmaFlowState state, Seconds now);
  void complete(PendingSurvey& ps, const ema::EmaFlowState& state, Seconds now);
  std::set<ema::WhoWith> who_with(const Agent& reporter, Seconds ref) const;
  Seconds next_duty_edge(Seconds t) const;

  HomeConfig cfg_;
  SimResult result_;
  std::vector<Agent> agents_;
  std::optional<cnn::ModelWeights> weights_;
  Seconds end_ = 0.0;
  Seconds settle_ = 0.0;

  std::priority_queue<Ev, std::vector<Ev>, EvLater> queue_;
  std::uint64_t seq_ = 0;
  std::vector<std::pair<long long, std::string>> lines_;
  std::map<std::string, PendingSurvey> pending_;
};

void HomeSim::load() {
  if (cfg_.weights) {
    weights_ = cfg_.weights;
  } else if (cfg_.weights_path) {
    weights_ = cnn::load_weights(*cfg_.weights_path);
  }
  if (weights_) {
    const auto rows = window_rows(cfg_.rate, cfg_.detector.window_len);
    if (static_cast<std::size_t>(weights_->meta.n) != rows) {
      throw ConfigError("weights expect " + std::to_string(weights_->meta.n) + "-row windows but the detector uses " +
                        std::to_string(rows));
    }
  }
  settle_ = poi_settle_delay(cfg_.detector, cfg_.rate);

  const std::uint64_t seed = cfg_.seed;
  Seconds latest = -kInf;
  for (std::size_t i = 0; i < cfg_.participants.size(); ++i) {
    Agent a;
    a.cfg = cfg_.participants[i];
    a.cfg.participant.home_id = cfg_.home_id;
    if (a.cfg.trace) {
      a.trace = *a.cfg.trace;
    } else if (a.cfg.trace_path) {
      a.trace = load_trace(*a.cfg.trace_path, cfg_.rate);
    }
    a.trace.rate = cfg_.rate;
    for (auto& s : a.trace.samples) s.t += cfg_.start_clock;
    a.annotations = a.cfg.annotations_path ? load_annotations(*a.cfg.annotations_path) : a.cfg.annotations;
    std::sort(a.annotations.begin(), a.annotations.end());
    for (auto& t : a.annotations) t += cfg_.start_clock;
    if (!a.trace.empty()) {
      latest = std::max(latest, a.trace.samples.back().t + 1.0 / cfg_.rate);
      a.watch = std::make_unique<WatchNode>(a.who().id, cfg_.rate, cfg_.policy, cfg_.duty);
    }
    a.received.rate = cfg_.rate;
    a.detector = std::make_unique<StreamEventDetector>(a.who().id, cfg_.events);
    const auto lo = static_cast<std::uint32_t>(seed);
    const auto hi = static_cast<std::uint32_t>(seed >> 32);
    std::seed_seq rs{lo, hi, static_cast<std::uint32_t>(i), 0u};
    std::seed_seq ss{lo, hi, static_cast<std::uint32_t>(i), 1u};
    a.responder_rng.seed(rs);
    a.sensor_rng.seed(ss);
    result_.roster.push_back(a.who());
    agents_.push_back(std::move(a));
  }
  if (cfg_.duration) {
    end_ = cfg_.start_clock + *cfg_.duration;
  } else if (latest > -kInf) {
    end_ = latest;
  } else {
    throw ConfigError("home '" + cfg_.home_id + "' needs a duration when no participant has a trace");
  }
}

json HomeSim::record(Seconds t, const char* kind, const Agent* a) {
  json j;
  j["t_ms"] = ms(t);
  j["home"] = cfg_.home_id;
  j["kind"] = kind;
  if (a) j["participant"] = a->who().id;
  return j;
}

Seconds HomeSim::next_duty_edge(Seconds t) const {
  const auto& d = cfg_.duty;
  auto next_multiple = [t](Seconds step) { return (std::floor(t / step) + 1.0) * step; };
  Seconds best = std::min(next_multiple(d.beacon_interval), next_multiple(d.battery_interval));
  const Seconds stop = std::floor(t / d.beacon_interval) * d.beacon_interval + d.beacon_scan_len;
  if (stop > t) best = std::min(best, stop);
  return best;
}

void HomeSim::feed_watch(Agent& a, Seconds now) {
  while (a.next_sample < a.trace.size() && a.trace.samples[a.next_sample].t <= now) {
    a.watch->ingest(a.trace.samples[a.next_sample++]);
  }
}

void HomeSim::schedule_cooldown(std::size_t i) {
  Agent& a = agents_[i];
  const auto& st = a.watch->state();
  if (!st.pending_quorum || !st.last_upload_t) return;
  const Seconds at = *st.last_upload_t + cfg_.policy.min_upload_gap;
  if (a.cooldown_tick && *a.cooldown_tick == at) return;
  a.cooldown_tick = at;
  push({at, EvType::CooldownTick, 0, i, 0.0, 0.0, 0, {}});
}

void HomeSim::handle_actions(std::size_t i, std::vector<WatchAction> actions, Seconds now) {
  Agent& a = agents_[i];
  for (auto& action : actions) {
    if (auto* up = std::get_if<Upload>(&action)) {
      handle_upload(i, up->payload, now);
    } else if (auto* scan = std::get_if<BeaconScanStart>(&action)) {
      json j = record(scan->t, "beacon_scan", &a);
      json readings = json::array();
      std::normal_distribution<double> shadow(0.0, 1.0);
      for (Seconds s = scan->t; s < scan->t + cfg_.duty.beacon_scan_len; s += 1.0) {
        for (const auto& b : cfg_.beacons) {
          const double rssi = b.tx_power_dbm - 10.0 * b.path_loss_exponent * std::log10(b.distance_m) +
                              b.shadowing_sd * shadow(a.sensor_rng);
          const double rounded = std::round(rssi * 10.0) / 10.0;
          a.watch->record_beacon({s, b.id, rounded});
          readings.push_back(json{{"t_ms", ms(s)}, {"beacon", b.id}, {"rssi_dbm", rounded}});
        }
      }
      j["readings"] = readings;
      emit(scan->t, std::move(j));
    } else if (auto* tick = std::get_if<BatteryTick>(&action)) {
      const Seconds since = tick->t - a.trace.samples.front().t;
      const double pct = std::max(0.0, std::round((100.0 - cfg_.battery_drain_per_hour * since / 3600.0) * 100.0) / 100.0);
      a.watch->record_battery({tick->t, pct});
      json j = record(tick->t, "battery", &a);
      j["percent"] = pct;
      emit(tick->t, std::move(j));
    }
  }
}

void HomeSim::handle_upload(std::size_t i, const UploadPayload& payload, Seconds now, bool flush) {
  Agent& a = agents_[i];
  UploadRecord rec{a.who().id,           now, payload.span_start, payload.span_end, payload.accel.size(),
                   payload.beacon_readings.size(), payload.battery_samples.size()};
  result_.uploads.push_back(rec);
  json j = record(now, "upload", &a);
  j["span_start_ms"] = ms(payload.span_start);
  j["span_end_ms"] = ms(payload.span_end);
  j["samples"] = rec.samples;
  j["beacon_readings"] = rec.beacon_readings;
  j["battery_samples"] = rec.battery_samples;
  if (flush) j["flush"] = true;
  emit(now, std::move(j));
  a.received.samples.insert(a.received.samples.end(), payload.accel.samples.begin(), payload.accel.samples.end());
  if (!flush) base_station(i, now, false);
}

void HomeSim::base_station(std::size_t i, Seconds now, bool final) {
  Agent& a = agents_[i];
  if (!a.received.empty()) {
    const AccelSeries smoothed = smooth(a.received, cfg_.detector.smooth_len);
    const auto pois = detect_pois(smoothed, cfg_.detector);
    const Seconds limit = final ? kInf : a.received.samples.back().t - settle_;
    for (const auto& poi : pois) {
      if (poi.t <= a.cutoff || poi.t > limit) continue;
      double p = 1.0;
      if (weights_) p = cnn::forward(*weights_, extract_window(smoothed, poi, cfg_.detector));
      if (cnn::decide(p, cfg_.decision_threshold) != cnn::Decision::EatingGesture) continue;
      result_.gestures.push_back({a.who().id, poi.t, now, p});
      json j = record(now, "gesture", &a);
      j["gesture_ms"] = ms(poi.t);
      j["probability"] = p;
      emit(now, std::move(j));
      handle_stream(i, a.detector->on_gesture(poi.t), now);
    }
    if (limit > a.cutoff) a.cutoff = limit;
    if (!final && std::isfinite(limit)) handle_stream(i, a.detector->advance(limit), now);
  }
  if (final) handle_stream(i, a.detector->flush(), now);
}

void HomeSim::handle_stream(std::size_t i, const std::vector<StreamOutput>& outs, Seconds now) {
  Agent& a = agents_[i];
  for (const auto& out : outs) {
    if (const auto* det = std::get_if<EventDetected>(&out)) {
      json j = record(now, "eating_detected", &a);
      j["event_id"] = det->event.id;
      j["start_ms"] = ms(det->event.start);
      j["end_ms"] = ms(det->event.end);
      j["gestures"] = det->event.gesture_count;
      emit(now, std::move(j));
      const auto decision = ema::on_event_detected(a.who(), det->event, now, a.schedule, cfg_.ema);
      if (const auto* send = std::get_if<ema::SendEatingEma>(&decision)) {
        push({send->at, EvType::EmaDispatch, 0, i, det->event.start, now, det->event.id, {}});
      } else {
        json s = record(now, "ema_suppressed", &a);
        s["event_id"] = det->event.id;
        s["reason"] = ema::to_string(std::get<ema::Suppressed>(decision).reason);
        emit(now, std::move(s));
      }
    } else {
      const auto& fin = std::get<EventFinalized>(out);
      result_.events.push_back(fin.event);
      json j = record(now, "eating_event", &a);
      j["event_id"] = fin.event.id;
      j["start_ms"] = ms(fin.event.start);
      j["end_ms"] = ms(fin.event.end);
      json g = json::array();
      for (Seconds t : fin.event.gestures()) g.push_back(ms(t));
      j["gestures"] = g;
      j["finalize_ms"] = ms(fin.finalize_t);
      emit(now, std::move(j));
    }
  }
}

void HomeSim::dispatch(std::size_t i, ema::EmaKind kind, Seconds at, ema::EmaTrigger trigger,
                       std::optional<Seconds> event_t, Seconds event_start) {
  Agent& a = agents_[i];
  ema::EmaSurvey s;
  s.id = a.who().id + "#" + std::to_string(++a.survey_count);
  s.participant_id = a.who().id;
  s.kind = kind;
  s.sent_t = at;
  s.trigger = trigger;
  s.event_t = event_t;
  result_.surveys.push_back(s);

  json j = record(at, "ema_sent", &a);
  j["survey"] = s.id;
  j["ema_kind"] = ema::to_string(kind);
  if (const auto* et = std::get_if<ema::EventTrigger>(&trigger)) {
    j["trigger"] = "event";
    j["event_id"] = et->event_id;
  } else {
    j["trigger"] = "hourly";
  }
  if (event_t) j["event_ms"] = ms(*event_t);
  emit(at, std::move(j));

  const auto& prof = a.cfg.responder;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(a.responder_rng);
  const double delay = prof.delay_min + (prof.delay_max - prof.delay_min) * unit(a.responder_rng);
  pending_[s.id] = PendingSurvey{s, i, event_start, std::nullopt};
  if (u < prof.response_prob && delay < cfg_.ema.expiry) {
    push({at + delay, EvType::EmaRespond, 0, i, 0.0, 0.0, 0, s.id});
  } else {
    push({at + cfg_.ema.expiry, EvType::EmaExpire, 0, i, 0.0, 0.0, 0, s.id});
  }
}

std::set<ema::WhoWith> HomeSim::who_with(const Agent& reporter, Seconds ref) const {
  std::set<ema::WhoWith> out;
  for (const auto& other : agents_) {
    if (other.who().id == reporter.who().id) continue;
    if (any_in(other.annotations, ref - 900.0, ref + 900.0)) out.insert(relation(reporter.who().role, other.who().role));
  }
  if (out.empty()) out.insert(ema::WhoWith::Nobody);
  return out;
}

void HomeSim::respond(const std::string& survey_id, Seconds now) {
  PendingSurvey& ps = pending_.at(survey_id);
  Agent& a = agents_[ps.who];
  auto& rng = a.responder_rng;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool truthful = a.cfg.responder.truthful;
  auto state = ema::start_flow(ps.survey);

  if (ps.survey.kind == ema::EmaKind::Mood) {
    complete(ps, state, now);
    return;
  }
  const bool eating = truthful ? any_in(a.annotations, ps.event_start - 60.0, now) : unit(rng) < 0.5;
  state = ema::flow_step(state, ema::answer::YesNo{eating});
  if (!eating) {
    static constexpr ema::NotEatingActivity kActs[] = {
        ema::NotEatingActivity::UsingPhone, ema::NotEatingActivity::Smoking, ema::NotEatingActivity::FixingHair,
        ema::NotEatingActivity::SunscreenOrLotion, ema::NotEatingActivity::Other};
    const auto pick = static_cast<std::size_t>(unit(rng) * 5.0) % 5;
    state = ema::flow_step(state, ema::answer::WhatDoing{{kActs[pick]}, {}});
    complete(ps, state, now);
    return;
  }
  // Still eating if another bite follows within two minutes; DONE comes a
  // minute after the last bite of that run.
  Seconds last = now;
  bool still = false;
  if (truthful) {
    auto it = std::upper_bound(a.annotations.begin(), a.annotations.end(), now);
    while (it != a.annotations.end() && *it - last <= 120.0) {
      last = *it++;
      still = true;
    }
  }
  state = ema::flow_step(state, ema::answer::Finished{!still});
  if (still) {
    ps.flow = state;
    push({last + 60.0, EvType::EmaDone, 0, ps.who, 0.0, 0.0, 0, survey_id});
    return;
  }
  finish_eating(ps, state, now);
}

void HomeSim::finish_eating(PendingSurvey& ps, ema::EmaFlowState state, Seconds now) {
  Agent& a = agents_[ps.who];
  auto& rng = a.responder_rng;
  std::uniform_int_distribution<int> scale(0, 100);
  std::uniform_int_distribution<int> likert(1, 4);
  std::uniform_int_distribution<int> type(0, 2);
  ema::answer::EatingBattery b{};
  b.hunger = scale(rng);
  b.satiety = scale(rng);
  for (auto& v : b.eah) v = likert(rng);
  const Seconds ref = ps.survey.event_t.value_or(ps.survey.sent_t);
  b.who_with = a.cfg.responder.truthful ? who_with(a, ref) : std::set<ema::WhoWith>{ema::WhoWith::Nobody};
  b.type = static_cast<ema::EatingType>(type(rng));
  state = ema::flow_step(state, b);
  complete(ps, state, now);
}

void HomeSim::complete(PendingSurvey& ps, const ema::EmaFlowState& in, Seconds now) {
  Agent& a = agents_[ps.who];
  auto& rng = a.responder_rng;
  std::uniform_int_distribution<int> likert(1, 4);
  ema::answer::MoodItems m{};
  for (auto& v : m.values) v = likert(rng);
  auto state = ema::flow_step(in, m);
  if (state.stage == ema::Stage::AskAteLastHour) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool ate = a.cfg.responder.truthful ? any_in(a.annotations, now - ema::kHour, now) : unit(rng) < 0.5;
    state = ema::flow_step(state, ema::answer::YesNo{ate});
  }
  auto r = state.collected;
  r.answered_t = now;
  result_.responses.push_back(r);
  json j = record(now, "ema_response", &a);
  j.update(to_json(r));
  emit(now, std::move(j));
  pending_.erase(ps.survey.id);
}

SimResult HomeSim::run() {
  // Initial events.
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& a = agents_[i];
    if (!a.watch) continue;
    const Seconds first = a.trace.samples.front().t;
    push({first, EvType::WatchTick, 0, i, 0.0, 0.0, 0, {}});
    for (const auto& poi : detect_pois_raw(a.trace, cfg_.detector)) {
      const Seconds at = poi.t + settle_;
      if (at <= end_) push({at, EvType::PoiRelease, 0, i, poi.t, 0.0, 0, {}});
    }
  }
  const Seconds first_hour = std::ceil(cfg_.start_clock / ema::kHour) * ema::kHour;
  if (first_hour <= end_) push({first_hour, EvType::HourTick, 0, 0, 0.0, 0.0, 0, {}});
  push({end_, EvType::End, 0, 0, 0.0, 0.0, 0, {}});

  Seconds now = cfg_.start_clock;
  while (!queue_.empty()) {
    Ev e = queue_.top();
    queue_.pop();
    now = e.t;
    switch (e.type) {
      case EvType::WatchTick:
      case EvType::CooldownTick: {
        Agent& a = agents_[e.who];
        feed_watch(a, now);
        handle_actions(e.who, a.watch->on_tick(now), now);
        if (e.type == EvType::WatchTick && cfg_.duty.enabled) {
          const Seconds next = next_duty_edge(now);
          if (next <= end_) push({next, EvType::WatchTick, 0, e.who, 0.0, 0.0, 0, {}});
        }
        if (e.type == EvType::CooldownTick) a.cooldown_tick.reset();
        schedule_cooldown(e.who);
        break;
      }
      case EvType::PoiRelease: {
        Agent& a = agents_[e.who];
        feed_watch(a, now);
        if (auto up = a.watch->on_poi(e.poi_t, now)) handle_upload(e.who, up->payload, now);
        schedule_cooldown(e.who);
        break;
      }
      case EvType::HourTick: {
        for (std::size_t i = 0; i < agents_.size(); ++i) {
          Agent& a = agents_[i];
          const auto d = ema::hourly_tick(a.who(), now, a.schedule, cfg_.ema);
          if (std::holds_alternative<ema::SendMoodEma>(d)) {
            dispatch(i, ema::EmaKind::Mood, now, ema::HourlyTrigger{}, std::nullopt, now);
          } else {
            json j = record(now, "ema_skipped", &a);
            j["reason"] = ema::to_string(std::get<ema::Skip>(d).reason);
            emit(now, std::move(j));
          }
        }
        if (now + ema::kHour <= end_) push({now + ema::kHour, EvType::HourTick, 0, 0, 0.0, 0.0, 0, {}});
        break;
      }
      case EvType::EmaDispatch:
        dispatch(e.who, ema::EmaKind::Eating, now, ema::EventTrigger{e.event_id}, e.detect_t, e.poi_t);
        break;
      case EvType::EmaRespond:
        respond(e.survey_id, now);
        break;
      case EvType::EmaDone: {
        PendingSurvey& ps = pending_.at(e.survey_id);
        auto state = ema::flow_step(*ps.flow, ema::answer::DonePressed{});
        finish_eating(ps, state, now);
        break;
      }
      case EvType::EmaExpire: {
        const PendingSurvey& ps = pending_.at(e.survey_id);
        result_.expired.push_back(e.survey_id);
        json j = record(now, "ema_expired", &agents_[ps.who]);
        j["survey"] = e.survey_id;
        emit(now, std::move(j));
        pending_.erase(e.survey_id);
        break;
      }
      case EvType::End: {
        for (std::size_t i = 0; i < agents_.size(); ++i) {
          Agent& a = agents_[i];
          if (a.watch) {
            feed_watch(a, now);
            if (auto up = a.watch->flush(now)) handle_upload(i, up->payload, now, true);
          }
          base_station(i, now, true);
        }
        break;
      }
    }
  }

  // Ground truth once every survey has been answered or has lapsed.
  std::vector<ema::EmaResponse> mood;
  for (const auto& r : result_.responses) {
    if (r.kind == ema::EmaKind::Mood) mood.push_back(r);
  }
  result_.ground_truth = ema::resolve_collaborative_gt(result_.responses, result_.roster);
  result_.hourly_truth = ema::resolve_hourly_gt(mood, result_.events);

  std::map<std::string, std::string> owner;
  for (const auto& s : result_.surveys) owner[s.id] = s.participant_id;
  for (const auto& g : result_.ground_truth) {
    json j = record(now, "ground_truth", nullptr);
    j["participant"] = g.subject_participant_id;
    j["start_ms"] = ms(g.start);
    j["end_ms"] = ms(g.end);
    j["fact"] = ema::to_string(g.fact);
    j["provenance"] = ema::to_string(g.provenance.kind());
    json src = json::array();
    for (const auto& id : g.provenance.first_person) src.push_back(json{{"survey", id}, {"reporter", owner[id]}, {"via", "first_person"}});
    for (const auto& id : g.provenance.collaborative) src.push_back(json{{"survey", id}, {"reporter", owner[id]}, {"via", "collaborative"}});
    j["sources"] = src;
    emit(now, std::move(j));
  }
  for (const auto& h : result_.hourly_truth) {
    json j = record(now, "hourly_truth", nullptr);
    j["participant"] = h.record.subject_participant_id;
    j["start_ms"] = ms(h.record.start);
    j["end_ms"] = ms(h.record.end);
    j["fact"] = ema::to_string(h.record.fact);
    j["survey"] = h.record.provenance.first_person.front();
    j["missed_detection"] = h.missed_detection;
    emit(now, std::move(j));
  }

  std::stable_sort(lines_.begin(), lines_.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& l : lines_) result_.log.push_back(std::move(l.second));
  return std::move(result_);
}

}  // namespace

SimResult run_home_simulation(const HomeConfig& config) { return HomeSim(config).run(); }

std::vector<SimResult> run_simulations(const std::vector<HomeConfig>& homes, unsigned threads) {
  std::vector<SimResult> results(homes.size());
  std::vector<std::exception_ptr> errors(homes.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(homes.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < homes.size(); i = next++) {
      try {
        results[i] = run_home_simulation(homes[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void write_log(std::ostream& out, const std::vector<SimResult>& results) {
  struct Line {
    long long t;
    std::size_t home;
    std::size_t idx;
    const std::string* text;
  };
  std::vector<Line> lines;
  for (std::size_t h = 0; h < results.size(); ++h) {
    for (std::size_t i = 0; i < results[h].log.size(); ++i) {
      const auto& text = results[h].log[i];
      lines.push_back({json::parse(text).at("t_ms").get<long long>(), h, i, &text});
    }
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.t, a.home, a.idx) < std::tie(b.t, b.home, b.idx);
  });
  for (const auto& l : lines) out << *l.text << '\n';
}

void write_ground_truth_csv(std::ostream& out, const std::vector<SimResult>& results) {
  out << "subject_id,start_ms,end_ms,fact,provenance,sources\n";
  for (const auto& r : results) {
    for (const auto& g : r.ground_truth) {
      std::string sources;
      for (const auto* list : {&g.provenance.first_person, &g.provenance.collaborative}) {
        for (const auto& id : *list) sources += (sources.empty() ? "" : ";") + id;
      }
      out << g.subject_participant_id << ',' << ms(g.start) << ',' << ms(g.end) << ',' << ema::to_string(g.fact) << ','
          << ema::to_string(g.provenance.kind()) << ',' << sources << '\n';
    }
  }
}

}  // namespace mfed::sim

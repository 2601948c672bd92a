#include "mfed/sim_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mfed/error.hpp"

namespace mfed::sim {

using nlohmann::json;

namespace {

// Rejects keys outside `allowed` so typos do not silently fall back to
// defaults.
void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& into, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

Seconds read_clock(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_clock(v.get<std::string>());
  throw ConfigError("start_clock in " + where + " must be seconds or \"HH:MM\"");
}

DetectorConfig parse_detector(const json& j, const std::string& where) {
  check_keys(j, {"x_th", "v_th", "peak_min_gap", "window_len", "smooth_len"}, where);
  DetectorConfig c;
  read(j, "x_th", c.x_th, where);
  read(j, "v_th", c.v_th, where);
  read(j, "peak_min_gap", c.peak_min_gap, where);
  read(j, "window_len", c.window_len, where);
  read(j, "smooth_len", c.smooth_len, where);
  return c;
}

UploadPolicy parse_policy(const json& j, const std::string& where) {
  check_keys(j, {"quorum", "quorum_window", "min_upload_gap"}, where);
  UploadPolicy p;
  read(j, "quorum", p.quorum, where);
  read(j, "quorum_window", p.quorum_window, where);
  read(j, "min_upload_gap", p.min_upload_gap, where);
  return p;
}

ema::EmaPolicy parse_ema(const json& j, const std::string& where) {
  check_keys(j, {"dispatch_delay", "min_gap", "expiry"}, where);
  ema::EmaPolicy p;
  read(j, "dispatch_delay", p.dispatch_delay, where);
  read(j, "min_gap", p.min_gap, where);
  read(j, "expiry", p.expiry, where);
  return p;
}

EventRules parse_events(const json& j, const std::string& where) {
  check_keys(j, {"cluster_gap", "min_cluster_size", "merge_gap"}, where);
  EventRules r;
  read(j, "cluster_gap", r.cluster_gap, where);
  read(j, "min_cluster_size", r.min_cluster_size, where);
  read(j, "merge_gap", r.merge_gap, where);
  return r;
}

ResponderProfile parse_responder(const json& j, const std::string& where) {
  check_keys(j, {"response_prob", "delay_min", "delay_max", "truthful"}, where);
  ResponderProfile r;
  read(j, "response_prob", r.response_prob, where);
  read(j, "delay_min", r.delay_min, where);
  read(j, "delay_max", r.delay_max, where);
  read(j, "truthful", r.truthful, where);
  return r;
}

HomeConfig parse_home(const json& j, const std::string& base_dir, std::size_t index) {
  const std::string where = "home #" + std::to_string(index);
  check_keys(j,
             {"home_id", "seed", "start_clock", "duration", "rate", "weights", "decision_threshold", "detector",
              "policy", "duty", "ema", "events", "beacons", "participants", "ground_truth_out"},
             where);
  HomeConfig h;
  read(j, "home_id", h.home_id, where);
  read(j, "seed", h.seed, where);
  if (j.contains("start_clock")) h.start_clock = read_clock(j["start_clock"], where);
  if (j.contains("duration")) {
    double d = 0;
    read(j, "duration", d, where);
    h.duration = d;
  }
  read(j, "rate", h.rate, where);
  read(j, "decision_threshold", h.decision_threshold, where);
  if (j.contains("weights")) {
    std::string w;
    read(j, "weights", w, where);
    h.weights_path = resolve(base_dir, w);
  }
  if (j.contains("ground_truth_out")) {
    std::string g;
    read(j, "ground_truth_out", g, where);
    h.ground_truth_out = resolve(base_dir, g);
  }
  if (j.contains("detector")) h.detector = parse_detector(j["detector"], where + " detector");
  if (j.contains("policy")) h.policy = parse_policy(j["policy"], where + " policy");
  if (j.contains("ema")) h.ema = parse_ema(j["ema"], where + " ema");
  if (j.contains("events")) h.events = parse_events(j["events"], where + " events");
  if (j.contains("duty")) {
    const auto& d = j["duty"];
    const std::string w = where + " duty";
    check_keys(d, {"enabled", "beacon_scan_len", "beacon_interval", "battery_interval", "battery_drain_per_hour"}, w);
    read(d, "enabled", h.duty.enabled, w);
    read(d, "beacon_scan_len", h.duty.beacon_scan_len, w);
    read(d, "beacon_interval", h.duty.beacon_interval, w);
    read(d, "battery_interval", h.duty.battery_interval, w);
    read(d, "battery_drain_per_hour", h.battery_drain_per_hour, w);
  }
  if (j.contains("beacons")) {
    if (!j["beacons"].is_array()) throw ConfigError("beacons in " + where + " must be a list");
    for (const auto& b : j["beacons"]) {
      const std::string w = where + " beacon";
      check_keys(b, {"id", "tx_power_dbm", "path_loss_exponent", "distance_m", "shadowing_sd"}, w);
      BeaconConfig c;
      read(b, "id", c.id, w);
      read(b, "tx_power_dbm", c.tx_power_dbm, w);
      read(b, "path_loss_exponent", c.path_loss_exponent, w);
      read(b, "distance_m", c.distance_m, w);
      read(b, "shadowing_sd", c.shadowing_sd, w);
      h.beacons.push_back(c);
    }
  }
  if (!j.contains("participants") || !j["participants"].is_array()) {
    throw ConfigError(where + " needs a participants list");
  }
  for (const auto& p : j["participants"]) {
    const std::string w = where + " participant";
    check_keys(p, {"id", "role", "window", "trace", "annotations", "responder"}, w);
    ParticipantConfig pc;
    read(p, "id", pc.participant.id, w);
    pc.participant.home_id = h.home_id;
    if (p.contains("role")) {
      std::string role;
      read(p, "role", role, w);
      pc.participant.role = ema::role_from_string(role);
    }
    if (p.contains("window")) {
      std::string win;
      read(p, "window", win, w);
      pc.participant.window = ema::parse_window(win);
    }
    if (p.contains("trace")) {
      std::string t;
      read(p, "trace", t, w);
      pc.trace_path = resolve(base_dir, t);
    }
    if (p.contains("annotations")) {
      std::string a;
      read(p, "annotations", a, w);
      pc.annotations_path = resolve(base_dir, a);
    }
    if (p.contains("responder")) pc.responder = parse_responder(p["responder"], w + " responder");
    h.participants.push_back(std::move(pc));
  }
  h.validate();
  return h;
}

}  // namespace

void ResponderProfile::validate() const {
  if (!(response_prob >= 0.0 && response_prob <= 1.0)) throw ConfigError("response_prob must be in [0, 1]");
  if (!(delay_min >= 0.0) || !(delay_max >= delay_min)) throw ConfigError("need 0 <= delay_min <= delay_max");
}

void HomeConfig::validate() const {
  if (participants.empty()) throw ConfigError("home '" + home_id + "' has no participants");
  std::set<std::string> ids;
  for (const auto& p : participants) {
    if (p.participant.id.empty()) throw ConfigError("participant id must not be empty");
    if (!ids.insert(p.participant.id).second) throw ConfigError("duplicate participant id '" + p.participant.id + "'");
    p.responder.validate();
  }
  if (!(rate > 0)) throw ConfigError("rate must be positive");
  if (duration && !(*duration > 0)) throw ConfigError("duration must be positive");
  if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0)) throw ConfigError("decision_threshold must be in [0, 1]");
  if (!(battery_drain_per_hour >= 0)) throw ConfigError("battery_drain_per_hour must be >= 0");
  if (!(ema.min_gap >= 0) || !(ema.expiry > 0) || !(ema.dispatch_delay >= 0)) throw ConfigError("bad EMA policy");
  if (events.min_cluster_size < 1 || !(events.cluster_gap >= 0) || !(events.merge_gap >= 0)) {
    throw ConfigError("bad event rules");
  }
  detector.validate();
  policy.validate();
  duty.validate();
  for (const auto& b : beacons) {
    if (b.id.empty()) throw ConfigError("beacon id must not be empty");
    if (!(b.distance_m > 0) || !(b.shadowing_sd >= 0)) throw ConfigError("beacon '" + b.id + "' has a bad RSSI model");
  }
}

std::vector<HomeConfig> parse_home_configs(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<HomeConfig> homes;
  if (doc.is_object() && doc.contains("homes")) {
    check_keys(doc, {"homes"}, "config");
    if (!doc["homes"].is_array() || doc["homes"].empty()) throw ConfigError("homes must be a non-empty list");
    for (std::size_t i = 0; i < doc["homes"].size(); ++i) homes.push_back(parse_home(doc["homes"][i], base_dir, i));
  } else {
    homes.push_back(parse_home(doc, base_dir, 0));
  }
  std::set<std::string> ids;
  for (const auto& h : homes) {
    if (!ids.insert(h.home_id).second) throw ConfigError("duplicate home id '" + h.home_id + "'");
  }
  return homes;
}

std::vector<HomeConfig> load_home_configs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_home_configs(ss.str(), dir.empty() ? "." : dir);
}

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("MFED_SEED");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end != '\0' || v[0] == '-') throw ConfigError(std::string("MFED_SEED must be an unsigned integer, got '") + v + "'");
  return static_cast<std::uint64_t>(s);
}

Seconds parse_clock(const std::string& text) {
  int h = 0, m = 0, s = 0;
  char tail = 0;
  const int n = std::sscanf(text.c_str(), "%d:%d:%d%c", &h, &m, &s, &tail);
  if ((n != 2 && n != 3) || h < 0 || h > 23 || m < 0 || m > 59 || s < 0 || s > 59) {
    throw ConfigError("clock time must look like HH:MM or HH:MM:SS, got '" + text + "'");
  }
  return h * 3600.0 + m * 60.0 + s;
}

}  // namespace mfed::sim

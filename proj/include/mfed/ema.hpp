#pragma once

// EMA manager: when eating and mood surveys go out, how a survey walks
// through its questions, and what a complete answer looks like.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mfed/events.hpp"

namespace mfed::ema {

inline constexpr Seconds kDay = 86400.0;
inline constexpr Seconds kHour = 3600.0;

enum class Role { Mother, Father, Son, Daughter, OtherFamily, Other };

/// Local-clock window, seconds since midnight, half-open [start, end).
struct ParticipationWindow {
  Seconds start = 6 * kHour;
  Seconds end = 22 * kHour;

  bool contains(Seconds local_t) const;
};

struct Participant {
  std::string id;
  std::string home_id;
  Role role = Role::Other;
  ParticipationWindow window;
};

enum class EmaKind { Eating, Mood };

struct HourlyTrigger {};
struct EventTrigger {
  int event_id;
};
using EmaTrigger = std::variant<EventTrigger, HourlyTrigger>;

struct EmaSurvey {
  std::string id;
  std::string participant_id;
  EmaKind kind = EmaKind::Mood;
  Seconds sent_t = 0.0;
  EmaTrigger trigger = HourlyTrigger{};
  std::optional<Seconds> event_t;  // detection time of the triggering event
};

// --- answers --------------------------------------------------------------

enum class WhoWith {
  Nobody,
  SpousePartner,
  Children,
  Mother,
  Father,
  Sisters,
  Brothers,
  Grandparent,
  OtherFamily,
  Friends,
  OtherPeople
};

enum class EatingType { Meal, Snack, Drink, Undefined };

enum class NotEatingActivity { UsingPhone, Smoking, FixingHair, SunscreenOrLotion, Other };

inline constexpr std::size_t kMoodItems = 8;  // happy, great, cheerful, joyful, upset, nervous, stressed, couldn't cope
inline constexpr std::size_t kEahItems = 16;

struct EmaResponse {
  std::string survey_id;
  std::string participant_id;
  EmaKind kind = EmaKind::Mood;
  Seconds sent_t = 0.0;
  Seconds answered_t = 0.0;
  std::optional<Seconds> event_t;

  std::optional<bool> eating_confirmed;
  std::optional<bool> ate_last_hour;
  std::optional<std::array<int, kMoodItems>> mood;
  std::optional<int> hunger;
  std::optional<int> satiety;
  std::optional<std::array<int, kEahItems>> eah;
  std::optional<EatingType> eating_type;
  std::set<WhoWith> who_with;
  std::set<NotEatingActivity> not_eating_activity;
  std::string not_eating_text;
};

/// Throws InvalidAnswer on any out-of-range value or a who-with set that
/// mixes Nobody with anyone else.
void validate_response_values(const EmaResponse& r);

/// True when the response holds every field its path through the flow
/// collects.
bool is_complete(const EmaResponse& r);

// --- scheduling -----------------------------------------------------------

struct EmaPolicy {
  Seconds dispatch_delay = 240.0;  // after detection
  Seconds min_gap = kHour;         // between any two EMAs to one person
  Seconds expiry = 1800.0;         // unanswered surveys lapse after this
};

/// Per-participant scheduler memory. Times are local wall-clock seconds
/// (day 0 midnight = 0).
struct ScheduleState {
  std::optional<Seconds> last_sent;
  std::vector<Seconds> eating_sent;      // dispatch times of eating EMAs
  std::set<long long> eating_trigger_hours;  // clock hours that already produced an eating EMA
};

enum class SuppressReason { RateLimited, OutsideWindow };
enum class SkipReason { EatingEmaSentThisHour, RateLimited, OutsideWindow };

struct SendEatingEma {
  Seconds at;
};
struct Suppressed {
  SuppressReason reason;
};
using EventDecision = std::variant<SendEatingEma, Suppressed>;

struct SendMoodEma {
  Seconds at;
};
struct Skip {
  SkipReason reason;
};
using TickDecision = std::variant<SendMoodEma, Skip>;

/// Schedules an eating EMA dispatch_delay after `now` unless one was already
/// triggered this clock hour, any EMA lies within min_gap of the dispatch
/// time, or the dispatch falls outside the participation window. A
/// scheduled EMA is committed to `state` immediately.
EventDecision on_event_detected(const Participant& p, const EatingEvent& event, Seconds now, ScheduleState& state,
                                const EmaPolicy& policy = {});

/// Called at each clock-hour boundary. Sends a mood EMA unless an eating EMA
/// went out in the hour just ended (or is still pending), the rate limit
/// applies, or the tick is outside the window.
TickDecision hourly_tick(const Participant& p, Seconds hour_start, ScheduleState& state, const EmaPolicy& policy = {});

// --- question flow --------------------------------------------------------

enum class Stage {
  AskWereYouEating,
  AskWhatDoing,
  AskFinished,
  AwaitDone,
  AskEatingBattery,
  AskMoodItems,
  AskAteLastHour,
  Terminal
};

namespace answer {
struct YesNo {
  bool yes;
};
struct WhatDoing {
  std::set<NotEatingActivity> activities;
  std::string text;
};
struct Finished {
  bool finished;
};
struct DonePressed {};
struct EatingBattery {
  int hunger;
  int satiety;
  std::array<int, kEahItems> eah;
  std::set<WhoWith> who_with;
  EatingType type;
};
struct MoodItems {
  std::array<int, kMoodItems> values;
};
}  // namespace answer

using Answer = std::variant<answer::YesNo, answer::WhatDoing, answer::Finished, answer::DonePressed,
                            answer::EatingBattery, answer::MoodItems>;

struct EmaFlowState {
  std::string survey_id;
  EmaKind kind = EmaKind::Mood;
  Stage stage = Stage::AskMoodItems;
  EmaResponse collected;
};

EmaFlowState start_flow(const EmaSurvey& survey);

/// Advances along the survey flowchart. Eating: were-you-eating -> (no) what
/// were you doing -> mood -> done; (yes) finished? -> [wait for DONE] ->
/// hunger/satiety/EAH/who-with/type -> mood -> done. Mood: mood items ->
/// ate in the last hour -> done. Throws InvalidTransition when the answer
/// kind does not belong to the current stage, InvalidAnswer when a value is
/// out of range.
EmaFlowState flow_step(const EmaFlowState& state, const Answer& answer);

// --- names ----------------------------------------------------------------

const char* to_string(Role r);
const char* to_string(WhoWith w);
const char* to_string(EatingType t);
const char* to_string(NotEatingActivity a);
const char* to_string(EmaKind k);
const char* to_string(SuppressReason r);
const char* to_string(SkipReason r);
const char* to_string(Stage s);
Role role_from_string(const std::string& s);
ParticipationWindow parse_window(const std::string& text);  // "06:00-22:00"

}  // namespace mfed::ema

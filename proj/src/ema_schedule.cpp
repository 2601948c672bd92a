#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mfed/ema.hpp"
#include "mfed/error.hpp"

namespace mfed::ema {

namespace {

Seconds time_of_day(Seconds t) {
  const Seconds r = std::fmod(t, kDay);
  return r < 0 ? r + kDay : r;
}

long long clock_hour(Seconds t) { return static_cast<long long>(std::floor(t / kHour)); }

bool too_close(const ScheduleState& s, Seconds t, const EmaPolicy& policy) {
  return s.last_sent && std::abs(t - *s.last_sent) < policy.min_gap;
}

void commit(ScheduleState& s, Seconds t) { s.last_sent = s.last_sent ? std::max(*s.last_sent, t) : t; }

}  // namespace

bool ParticipationWindow::contains(Seconds local_t) const {
  const Seconds tod = time_of_day(local_t);
  return tod >= start && tod < end;
}

EventDecision on_event_detected(const Participant& p, const EatingEvent& /*event*/, Seconds now, ScheduleState& state,
                                const EmaPolicy& policy) {
  const Seconds dispatch = now + policy.dispatch_delay;
  if (!p.window.contains(dispatch)) return Suppressed{SuppressReason::OutsideWindow};
  if (state.eating_trigger_hours.count(clock_hour(now)) != 0) return Suppressed{SuppressReason::RateLimited};
  if (too_close(state, dispatch, policy)) return Suppressed{SuppressReason::RateLimited};

  commit(state, dispatch);
  state.eating_sent.push_back(dispatch);
  state.eating_trigger_hours.insert(clock_hour(now));
  return SendEatingEma{dispatch};
}

TickDecision hourly_tick(const Participant& p, Seconds hour_start, ScheduleState& state, const EmaPolicy& policy) {
  if (!p.window.contains(hour_start)) return Skip{SkipReason::OutsideWindow};
  const bool eating_recent = std::any_of(state.eating_sent.begin(), state.eating_sent.end(),
                                         [&](Seconds e) { return e >= hour_start - kHour; });
  if (eating_recent) return Skip{SkipReason::EatingEmaSentThisHour};
  if (too_close(state, hour_start, policy)) return Skip{SkipReason::RateLimited};
  commit(state, hour_start);
  return SendMoodEma{hour_start};
}

// --- names ----------------------------------------------------------------

const char* to_string(Role r) {
  switch (r) {
    case Role::Mother: return "Mother";
    case Role::Father: return "Father";
    case Role::Son: return "Son";
    case Role::Daughter: return "Daughter";
    case Role::OtherFamily: return "OtherFamily";
    case Role::Other: return "Other";
  }
  return "?";
}

const char* to_string(WhoWith w) {
  switch (w) {
    case WhoWith::Nobody: return "Nobody";
    case WhoWith::SpousePartner: return "SpousePartner";
    case WhoWith::Children: return "Children";
    case WhoWith::Mother: return "Mother";
    case WhoWith::Father: return "Father";
    case WhoWith::Sisters: return "Sisters";
    case WhoWith::Brothers: return "Brothers";
    case WhoWith::Grandparent: return "Grandparent";
    case WhoWith::OtherFamily: return "OtherFamily";
    case WhoWith::Friends: return "Friends";
    case WhoWith::OtherPeople: return "OtherPeople";
  }
  return "?";
}

const char* to_string(EatingType t) {
  switch (t) {
    case EatingType::Meal: return "Meal";
    case EatingType::Snack: return "Snack";
    case EatingType::Drink: return "Drink";
    case EatingType::Undefined: return "Undefined";
  }
  return "?";
}

const char* to_string(NotEatingActivity a) {
  switch (a) {
    case NotEatingActivity::UsingPhone: return "UsingPhone";
    case NotEatingActivity::Smoking: return "Smoking";
    case NotEatingActivity::FixingHair: return "FixingHair";
    case NotEatingActivity::SunscreenOrLotion: return "SunscreenOrLotion";
    case NotEatingActivity::Other: return "Other";
  }
  return "?";
}

const char* to_string(EmaKind k) { return k == EmaKind::Eating ? "eating" : "mood"; }

const char* to_string(SuppressReason r) { return r == SuppressReason::RateLimited ? "RateLimited" : "OutsideWindow"; }

const char* to_string(SkipReason r) {
  switch (r) {
    case SkipReason::EatingEmaSentThisHour: return "EatingEmaSentThisHour";
    case SkipReason::RateLimited: return "RateLimited";
    case SkipReason::OutsideWindow: return "OutsideWindow";
  }
  return "?";
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::AskWereYouEating: return "AskWereYouEating";
    case Stage::AskWhatDoing: return "AskWhatDoing";
    case Stage::AskFinished: return "AskFinished";
    case Stage::AwaitDone: return "AwaitDone";
    case Stage::AskEatingBattery: return "AskEatingBattery";
    case Stage::AskMoodItems: return "AskMoodItems";
    case Stage::AskAteLastHour: return "AskAteLastHour";
    case Stage::Terminal: return "Terminal";
  }
  return "?";
}

Role role_from_string(const std::string& s) {
  for (Role r : {Role::Mother, Role::Father, Role::Son, Role::Daughter, Role::OtherFamily, Role::Other}) {
    if (s == to_string(r)) return r;
  }
  throw ConfigError("unknown role '" + s + "'");
}

ParticipationWindow parse_window(const std::string& text) {
  int h1 = 0, m1 = 0, h2 = 0, m2 = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d:%d-%d:%d%c", &h1, &m1, &h2, &m2, &tail) != 4 || h1 < 0 || h1 > 24 || h2 < 0 ||
      h2 > 24 || m1 < 0 || m1 > 59 || m2 < 0 || m2 > 59) {
    throw ConfigError("participation window must look like HH:MM-HH:MM, got '" + text + "'");
  }
  ParticipationWindow w{h1 * kHour + m1 * 60.0, h2 * kHour + m2 * 60.0};
  if (!(w.start < w.end)) throw ConfigError("participation window start must precede its end: '" + text + "'");
  return w;
}

}  // namespace mfed::ema

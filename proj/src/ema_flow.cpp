#include <string>

#include "mfed/ema.hpp"
#include "mfed/error.hpp"

namespace mfed::ema {

namespace {

template <std::size_t N>
void check_likert(const std::array<int, N>& values, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (values[i] < 1 || values[i] > 4) {
      throw InvalidAnswer(std::string(what) + " item " + std::to_string(i + 1) + " must be 1-4, got " +
                          std::to_string(values[i]));
    }
  }
}

void check_scale(int v, const char* what) {
  if (v < 0 || v > 100) throw InvalidAnswer(std::string(what) + " must be on the 0-100 scale, got " + std::to_string(v));
}

void check_who_with(const std::set<WhoWith>& who) {
  if (who.empty()) throw InvalidAnswer("who-with needs at least one option");
  if (who.count(WhoWith::Nobody) != 0 && who.size() > 1) {
    throw InvalidAnswer("who-with cannot combine Nobody with other people");
  }
}

[[noreturn]] void bad_transition(const EmaFlowState& s, const Answer& a) {
  static constexpr const char* kAnswerNames[] = {"yes/no", "what-doing", "finished", "done-press", "eating-battery",
                                                 "mood-items"};
  throw InvalidTransition(std::string("answer '") + kAnswerNames[a.index()] + "' is not accepted at stage " +
                          to_string(s.stage));
}

}  // namespace

void validate_response_values(const EmaResponse& r) {
  if (r.mood) check_likert(*r.mood, "mood");
  if (r.eah) check_likert(*r.eah, "EAH");
  if (r.hunger) check_scale(*r.hunger, "hunger");
  if (r.satiety) check_scale(*r.satiety, "satiety");
  if (!r.who_with.empty()) check_who_with(r.who_with);
}

bool is_complete(const EmaResponse& r) {
  if (!r.mood) return false;
  if (r.kind == EmaKind::Mood) return r.ate_last_hour.has_value();
  if (!r.eating_confirmed) return false;
  if (!*r.eating_confirmed) return !r.not_eating_activity.empty();
  return r.hunger && r.satiety && r.eah && r.eating_type && !r.who_with.empty();
}

EmaFlowState start_flow(const EmaSurvey& survey) {
  EmaFlowState s;
  s.survey_id = survey.id;
  s.kind = survey.kind;
  s.stage = survey.kind == EmaKind::Eating ? Stage::AskWereYouEating : Stage::AskMoodItems;
  s.collected.survey_id = survey.id;
  s.collected.participant_id = survey.participant_id;
  s.collected.kind = survey.kind;
  s.collected.sent_t = survey.sent_t;
  s.collected.event_t = survey.event_t;
  return s;
}

EmaFlowState flow_step(const EmaFlowState& state, const Answer& a) {
  EmaFlowState next = state;
  auto& r = next.collected;
  switch (state.stage) {
    case Stage::AskWereYouEating: {
      const auto* yn = std::get_if<answer::YesNo>(&a);
      if (!yn) bad_transition(state, a);
      r.eating_confirmed = yn->yes;
      next.stage = yn->yes ? Stage::AskFinished : Stage::AskWhatDoing;
      break;
    }
    case Stage::AskWhatDoing: {
      const auto* wd = std::get_if<answer::WhatDoing>(&a);
      if (!wd) bad_transition(state, a);
      if (wd->activities.empty()) throw InvalidAnswer("pick at least one activity");
      r.not_eating_activity = wd->activities;
      r.not_eating_text = wd->text;
      next.stage = Stage::AskMoodItems;
      break;
    }
    case Stage::AskFinished: {
      const auto* f = std::get_if<answer::Finished>(&a);
      if (!f) bad_transition(state, a);
      next.stage = f->finished ? Stage::AskEatingBattery : Stage::AwaitDone;
      break;
    }
    case Stage::AwaitDone: {
      if (!std::holds_alternative<answer::DonePressed>(a)) bad_transition(state, a);
      next.stage = Stage::AskEatingBattery;
      break;
    }
    case Stage::AskEatingBattery: {
      const auto* b = std::get_if<answer::EatingBattery>(&a);
      if (!b) bad_transition(state, a);
      check_scale(b->hunger, "hunger");
      check_scale(b->satiety, "satiety");
      check_likert(b->eah, "EAH");
      check_who_with(b->who_with);
      r.hunger = b->hunger;
      r.satiety = b->satiety;
      r.eah = b->eah;
      r.who_with = b->who_with;
      r.eating_type = b->type;
      next.stage = Stage::AskMoodItems;
      break;
    }
    case Stage::AskMoodItems: {
      const auto* m = std::get_if<answer::MoodItems>(&a);
      if (!m) bad_transition(state, a);
      check_likert(m->values, "mood");
      r.mood = m->values;
      next.stage = state.kind == EmaKind::Mood ? Stage::AskAteLastHour : Stage::Terminal;
      break;
    }
    case Stage::AskAteLastHour: {
      const auto* yn = std::get_if<answer::YesNo>(&a);
      if (!yn) bad_transition(state, a);
      r.ate_last_hour = yn->yes;
      next.stage = Stage::Terminal;
      break;
    }
    case Stage::Terminal:
      bad_transition(state, a);
  }
  return next;
}

}  // namespace mfed::ema

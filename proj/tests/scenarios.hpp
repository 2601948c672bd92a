#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mfed/classifier.hpp"
#include "mfed/evaluation.hpp"
#include "mfed/sim_config.hpp"
#include "mfed/synth.hpp"

namespace testing {

inline std::vector<mfed::Seconds> times_of(const std::vector<mfed::synth::PlantedMotion>& motions,
                                           mfed::synth::Motion kind) {
  std::vector<mfed::Seconds> out;
  for (const auto& m : motions)
    if (m.kind == kind) out.push_back(m.t);
  return out;
}

inline mfed::sim::ParticipantConfig member(const std::string& id, mfed::ema::Role role) {
  mfed::sim::ParticipantConfig p;
  p.participant.id = id;
  p.participant.role = role;
  return p;
}

// Four family members share a meal from 12:10 local time. B, C and D wear
// watches; A does not. B and D answer truthfully, C never answers.
inline mfed::sim::HomeConfig family_meal_home() {
  using namespace mfed;
  using ema::Role;
  sim::HomeConfig h;
  h.home_id = "family";
  h.seed = 12;
  h.start_clock = 12 * 3600 + 5 * 60;
  h.duration = 3000;
  const auto meal = synth::meal(300, 10, 20);
  const auto bites = times_of(meal, synth::Motion::EatingGesture);

  auto a = member("A", Role::Mother);
  a.annotations = bites;
  h.participants.push_back(a);

  std::uint64_t seed = 1;
  for (auto [id, role] : {std::pair{"B", Role::Son}, {"C", Role::Father}, {"D", Role::Daughter}}) {
    auto p = member(id, role);
    synth::TraceSpec spec;
    spec.duration = 3000;
    spec.seed = seed++;
    p.trace = synth::make_trace(spec, meal);
    p.annotations = bites;
    if (role == Role::Father) p.responder.response_prob = 0.0;
    h.participants.push_back(p);
  }
  return h;
}

// A mother eats with her two children and says she ate with "Children".
inline mfed::sim::HomeConfig two_children_home() {
  using namespace mfed;
  using ema::Role;
  sim::HomeConfig h;
  h.home_id = "two-children";
  h.seed = 3;
  h.start_clock = 18 * 3600 + 5 * 60;
  h.duration = 3000;
  const auto meal = synth::meal(300, 10, 20);
  const auto bites = times_of(meal, synth::Motion::EatingGesture);

  auto mother = member("M", Role::Mother);
  synth::TraceSpec spec;
  spec.duration = 3000;
  mother.trace = synth::make_trace(spec, meal);
  mother.annotations = bites;
  h.participants.push_back(mother);
  for (auto [id, role] : {std::pair{"S", Role::Son}, {"T", Role::Daughter}}) {
    auto c = member(id, role);
    c.annotations = bites;
    h.participants.push_back(c);
  }
  return h;
}

struct PlantedDay {
  std::vector<mfed::synth::PlantedMotion> motions;
  std::vector<std::pair<mfed::Seconds, mfed::Seconds>> meals;  // planted meal spans
};

// One hour: three meals of 12 bites 25 s apart, and a burst of four
// non-eating motions 20 s apart between each pair of meals.
inline PlantedDay planted_hour() {
  using namespace mfed::synth;
  PlantedDay d;
  for (double start : {240.0, 1440.0, 2640.0}) {
    const auto m = meal(start, 12, 25);
    d.motions.insert(d.motions.end(), m.begin(), m.end());
    d.meals.push_back({start, start + 11 * 25});
  }
  for (double start : {900.0, 2100.0, 3300.0}) {
    const auto m = evenly_spaced(start, 4, 20, Motion::Distractor);
    d.motions.insert(d.motions.end(), m.begin(), m.end());
  }
  std::sort(d.motions.begin(), d.motions.end(), [](auto& a, auto& b) { return a.t < b.t; });
  return d;
}

// Trains the gesture model on a separately seeded planted hour, labeling
// every PoI against the planted bites.
inline mfed::cnn::ModelWeights train_on_planted(std::uint64_t seed, int epochs = 15) {
  using namespace mfed;
  const auto day = planted_hour();
  std::vector<cnn::LabeledWindow> data;
  for (std::uint64_t k = 0; k < 3; ++k) {
    synth::TraceSpec spec;
    spec.duration = 3600;
    spec.seed = seed + k;
    const auto raw = synth::make_trace(spec, day.motions);
    const auto part = labeled_windows(raw, times_of(day.motions, synth::Motion::EatingGesture), {}, "train");
    data.insert(data.end(), part.begin(), part.end());
  }
  cnn::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = seed;
  return cnn::train(data, cfg);
}

inline mfed::sim::HomeConfig planted_hour_home(const mfed::cnn::ModelWeights& weights, std::uint64_t trace_seed) {
  using namespace mfed;
  sim::HomeConfig h;
  h.home_id = "planted";
  h.seed = 7;
  h.start_clock = 11 * 3600;
  h.weights = weights;
  auto p = member("P", ema::Role::Mother);
  synth::TraceSpec spec;
  spec.duration = 3600;
  spec.seed = trace_seed;
  p.trace = synth::make_trace(spec, planted_hour().motions);
  p.annotations = times_of(planted_hour().motions, synth::Motion::EatingGesture);
  h.participants.push_back(p);
  return h;
}

}  // namespace testing

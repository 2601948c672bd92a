#include <doctest.h>

#include <algorithm>
#include <random>

#include "mfed/error.hpp"
#include "mfed/ground_truth.hpp"

using namespace mfed;
using namespace mfed::ema;

namespace {

std::vector<Participant> family() {
  return {{"A", "h", Role::Mother, {}},
          {"B", "h", Role::Son, {}},
          {"C", "h", Role::Father, {}},
          {"D", "h", Role::Daughter, {}}};
}

EmaResponse confirmed(const std::string& who, const std::string& survey, Seconds event_t, std::set<WhoWith> with) {
  EmaResponse r;
  r.survey_id = survey;
  r.participant_id = who;
  r.kind = EmaKind::Eating;
  r.sent_t = event_t + 240;
  r.answered_t = event_t + 400;
  r.event_t = event_t;
  r.eating_confirmed = true;
  r.who_with = std::move(with);
  return r;
}

const GroundTruthRecord* find(const std::vector<GroundTruthRecord>& recs, const std::string& subject) {
  for (const auto& r : recs)
    if (r.subject_participant_id == subject) return &r;
  return nullptr;
}

}  // namespace

TEST_SUITE("ground_truth") {
  TEST_CASE("role table") {
    const auto roster = family();
    const auto& son = roster[1];
    const auto& mother = roster[0];
    CHECK(who_with_candidates(son, WhoWith::Mother, roster).front().id == "A");
    CHECK(who_with_candidates(son, WhoWith::Sisters, roster).front().id == "D");
    CHECK(who_with_candidates(son, WhoWith::Brothers, roster).empty());
    CHECK(who_with_candidates(son, WhoWith::SpousePartner, roster).empty());
    CHECK(who_with_candidates(mother, WhoWith::SpousePartner, roster).front().id == "C");
    CHECK(who_with_candidates(mother, WhoWith::Children, roster).size() == 2);
    CHECK(who_with_candidates(mother, WhoWith::Mother, roster).empty());
    CHECK(who_with_candidates(mother, WhoWith::Friends, roster).empty());
  }

  TEST_CASE("two children eating with both parents") {
    const Seconds t = 12 * kHour + 300;
    const std::vector<EmaResponse> rs{
        confirmed("B", "B#0", t, {WhoWith::Mother, WhoWith::Father, WhoWith::Sisters}),
        confirmed("D", "D#0", t + 60, {WhoWith::Mother, WhoWith::Father, WhoWith::Brothers}),
    };
    const auto recs = resolve_collaborative_gt(rs, family());
    REQUIRE(recs.size() == 4);
    for (const char* s : {"A", "C"}) {
      const auto* r = find(recs, s);
      REQUIRE(r);
      CHECK(r->fact == Fact::WasEating);
      CHECK(r->provenance.kind() == ProvenanceKind::Collaborative);
      CHECK(r->provenance.collaborative == std::vector<std::string>{"B#0", "D#0"});
      CHECK(r->start == t - 900);
      CHECK(r->end == t + 60 + 900);
    }
    CHECK(find(recs, "B")->provenance.kind() == ProvenanceKind::FirstPersonAndCollaborative);
    CHECK(find(recs, "D")->provenance.collaborative == std::vector<std::string>{"B#0"});
  }

  TEST_CASE("Children with two children resolves to nobody") {
    const auto recs = resolve_collaborative_gt({confirmed("A", "A#0", 1000, {WhoWith::Children})}, family());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].subject_participant_id == "A");
    CHECK(recs[0].provenance.kind() == ProvenanceKind::FirstPerson);
  }

  TEST_CASE("Children with one child resolves to that child") {
    std::vector<Participant> roster{{"M", "h", Role::Mother, {}}, {"S", "h", Role::Son, {}}};
    const auto recs = resolve_collaborative_gt({confirmed("M", "M#0", 1000, {WhoWith::Children})}, roster);
    REQUIRE(recs.size() == 2);
    CHECK(find(recs, "S")->provenance.kind() == ProvenanceKind::Collaborative);
  }

  TEST_CASE("mentions 7 minutes apart coalesce, 16 minutes apart do not") {
    const Seconds t = 12 * kHour + 5 * 60;
    auto one = resolve_collaborative_gt({confirmed("B", "B#0", t, {WhoWith::Mother}),
                                         confirmed("D", "D#0", t + 420, {WhoWith::Mother})},
                                        family());
    CHECK(std::count_if(one.begin(), one.end(), [](auto& r) { return r.subject_participant_id == "A"; }) == 1);
    CHECK(find(one, "A")->provenance.collaborative.size() == 2);

    auto two = resolve_collaborative_gt({confirmed("B", "B#0", t, {WhoWith::Mother}),
                                         confirmed("D", "D#0", t + 960, {WhoWith::Mother})},
                                        family());
    CHECK(std::count_if(two.begin(), two.end(), [](auto& r) { return r.subject_participant_id == "A"; }) == 2);
  }

  TEST_CASE("Nobody never yields a collaborative record") {
    const auto recs = resolve_collaborative_gt({confirmed("B", "B#0", 50, {WhoWith::Nobody})}, family());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].subject_participant_id == "B");
  }

  TEST_CASE("a denial is a first-person WasNotEating record") {
    auto r = confirmed("B", "B#0", 5000, {});
    r.eating_confirmed = false;
    const auto recs = resolve_collaborative_gt({r}, family());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].fact == Fact::WasNotEating);
    CHECK(recs[0].start == 4100);
    CHECK(recs[0].end == 5900);
  }

  TEST_CASE("unknown reporter") {
    CHECK_THROWS_AS(resolve_collaborative_gt({confirmed("Z", "Z#0", 1, {})}, family()), UnknownHome);
  }

  TEST_CASE("resolution does not depend on response order") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<WhoWith> opts{WhoWith::Mother, WhoWith::Father, WhoWith::Sisters, WhoWith::Brothers,
                                    WhoWith::Children, WhoWith::SpousePartner, WhoWith::Friends};
    const auto roster = family();
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<EmaResponse> rs;
      for (int i = 0; i < 8; ++i) {
        std::set<WhoWith> with;
        for (auto w : opts)
          if (u(rng) < 0.3) with.insert(w);
        auto r = confirmed(roster[static_cast<std::size_t>(u(rng) * 4)].id, "s" + std::to_string(i),
                           std::round(u(rng) * 7200), with);
        if (u(rng) < 0.2) r.eating_confirmed = false;
        rs.push_back(r);
      }
      const auto base = resolve_collaborative_gt(rs, roster);
      std::shuffle(rs.begin(), rs.end(), rng);
      REQUIRE(resolve_collaborative_gt(rs, roster) == base);
    }
  }

  TEST_CASE("hourly answers") {
    auto mood = [](bool ate, Seconds t) {
      EmaResponse r;
      r.survey_id = "p#1";
      r.participant_id = "p";
      r.kind = EmaKind::Mood;
      r.answered_t = t;
      r.ate_last_hour = ate;
      return r;
    };
    EatingEvent ev;
    ev.participant_id = "p";
    ev.start = 10000 - 1800;
    ev.end = 10000 - 1700;

    const auto missed = resolve_hourly_gt({mood(true, 10000)}, {});
    REQUIRE(missed.size() == 1);
    CHECK(missed[0].missed_detection);
    CHECK(missed[0].record.fact == Fact::WasEating);

    const auto seen = resolve_hourly_gt({mood(true, 10000)}, {ev});
    CHECK_FALSE(seen[0].missed_detection);

    const auto no = resolve_hourly_gt({mood(false, 10000)}, {ev});
    CHECK(no[0].record.fact == Fact::WasNotEating);
    CHECK(no[0].record.start == 6400);
    CHECK(no[0].record.end == 10000);
  }
}

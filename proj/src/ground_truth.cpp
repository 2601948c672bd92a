#include "mfed/ground_truth.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "mfed/error.hpp"

namespace mfed::ema {

ProvenanceKind Provenance::kind() const {
  if (!first_person.empty() && !collaborative.empty()) return ProvenanceKind::FirstPersonAndCollaborative;
  return first_person.empty() ? ProvenanceKind::Collaborative : ProvenanceKind::FirstPerson;
}

const char* to_string(Fact f) { return f == Fact::WasEating ? "WasEating" : "WasNotEating"; }

const char* to_string(ProvenanceKind k) {
  switch (k) {
    case ProvenanceKind::FirstPerson: return "FirstPerson";
    case ProvenanceKind::Collaborative: return "Collaborative";
    case ProvenanceKind::FirstPersonAndCollaborative: return "FirstPerson+Collaborative";
  }
  return "?";
}

std::vector<Participant> who_with_candidates(const Participant& reporter, WhoWith mention,
                                             const std::vector<Participant>& roster) {
  const bool child = reporter.role == Role::Son || reporter.role == Role::Daughter;
  const bool parent = reporter.role == Role::Mother || reporter.role == Role::Father;

  std::vector<Role> roles;
  switch (mention) {
    case WhoWith::Mother:
      if (child) roles = {Role::Mother};
      break;
    case WhoWith::Father:
      if (child) roles = {Role::Father};
      break;
    case WhoWith::Sisters:
      if (child) roles = {Role::Daughter};
      break;
    case WhoWith::Brothers:
      if (child) roles = {Role::Son};
      break;
    case WhoWith::SpousePartner:
      if (reporter.role == Role::Mother) roles = {Role::Father};
      if (reporter.role == Role::Father) roles = {Role::Mother};
      break;
    case WhoWith::Children:
      if (parent) roles = {Role::Son, Role::Daughter};
      break;
    default:
      break;
  }

  std::vector<Participant> out;
  for (const auto& p : roster) {
    if (p.home_id != reporter.home_id || p.id == reporter.id) continue;
    if (std::find(roles.begin(), roles.end(), p.role) != roles.end()) out.push_back(p);
  }
  return out;
}

namespace {

struct Mention {
  Seconds t;
  bool first_person;
  std::string survey_id;

  auto key() const { return std::tie(t, first_person, survey_id); }
};

Seconds reference_time(const EmaResponse& r) { return r.event_t.value_or(r.sent_t); }

}  // namespace

std::vector<GroundTruthRecord> resolve_collaborative_gt(const std::vector<EmaResponse>& responses,
                                                        const std::vector<Participant>& roster, Seconds window) {
  std::map<std::string, const Participant*> by_id;
  for (const auto& p : roster) by_id[p.id] = &p;

  std::map<std::string, std::vector<Mention>> eating;  // subject -> mentions
  std::vector<GroundTruthRecord> records;

  for (const auto& r : responses) {
    auto it = by_id.find(r.participant_id);
    if (it == by_id.end()) throw UnknownHome("reporter '" + r.participant_id + "' is not on any home roster");
    if (r.kind != EmaKind::Eating || !r.eating_confirmed) continue;
    const Seconds t = reference_time(r);

    if (!*r.eating_confirmed) {
      GroundTruthRecord rec;
      rec.subject_participant_id = r.participant_id;
      rec.start = t - window;
      rec.end = t + window;
      rec.fact = Fact::WasNotEating;
      rec.provenance.first_person = {r.survey_id};
      records.push_back(std::move(rec));
      continue;
    }

    eating[r.participant_id].push_back({t, true, r.survey_id});
    for (WhoWith w : r.who_with) {
      const auto cands = who_with_candidates(*it->second, w, roster);
      if (cands.size() != 1) continue;  // unknown or ambiguous
      eating[cands.front().id].push_back({t, false, r.survey_id});
    }
  }

  for (auto& [subject, mentions] : eating) {
    std::sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) { return a.key() < b.key(); });
    std::size_t i = 0;
    while (i < mentions.size()) {
      GroundTruthRecord rec;
      rec.subject_participant_id = subject;
      rec.fact = Fact::WasEating;
      Seconds first = mentions[i].t;
      Seconds last = first;
      std::size_t j = i;
      while (j < mentions.size() && mentions[j].t - last <= window) {
        last = mentions[j].t;
        auto& dst = mentions[j].first_person ? rec.provenance.first_person : rec.provenance.collaborative;
        if (std::find(dst.begin(), dst.end(), mentions[j].survey_id) == dst.end()) dst.push_back(mentions[j].survey_id);
        ++j;
      }
      rec.start = first - window;
      rec.end = last + window;
      std::sort(rec.provenance.first_person.begin(), rec.provenance.first_person.end());
      std::sort(rec.provenance.collaborative.begin(), rec.provenance.collaborative.end());
      records.push_back(std::move(rec));
      i = j;
    }
  }

  std::sort(records.begin(), records.end(), [](const GroundTruthRecord& a, const GroundTruthRecord& b) {
    return std::tie(a.subject_participant_id, a.start, a.end, a.fact, a.provenance.first_person,
                    a.provenance.collaborative) < std::tie(b.subject_participant_id, b.start, b.end, b.fact,
                                                           b.provenance.first_person, b.provenance.collaborative);
  });
  return records;
}

std::vector<HourlyGroundTruth> resolve_hourly_gt(const std::vector<EmaResponse>& mood_responses,
                                                 const std::vector<EatingEvent>& detected) {
  std::vector<HourlyGroundTruth> out;
  for (const auto& r : mood_responses) {
    if (r.kind != EmaKind::Mood || !r.ate_last_hour) continue;
    HourlyGroundTruth h;
    h.record.subject_participant_id = r.participant_id;
    h.record.end = r.answered_t;
    h.record.start = r.answered_t - kHour;
    h.record.provenance.first_person = {r.survey_id};
    if (*r.ate_last_hour) {
      h.record.fact = Fact::WasEating;
      const bool seen = std::any_of(detected.begin(), detected.end(), [&](const EatingEvent& e) {
        return e.participant_id == r.participant_id && e.end >= h.record.start && e.start <= h.record.end;
      });
      h.missed_detection = !seen;
    } else {
      h.record.fact = Fact::WasNotEating;
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace mfed::ema

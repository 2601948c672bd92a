#pragma once

// Ground truth from EMA answers. First person: a participant confirms or
// denies their own detected event. Collaborative: a confirmed eater names
// family members they ate with, which stands in for those members' own
// answers. Hourly: the "did you eat in the last hour" mood item.

#include <string>
#include <vector>

#include "mfed/ema.hpp"

namespace mfed::ema {

enum class Fact { WasEating, WasNotEating };

enum class ProvenanceKind { FirstPerson, Collaborative, FirstPersonAndCollaborative };

struct Provenance {
  std::vector<std::string> first_person;   // survey ids
  std::vector<std::string> collaborative;  // survey ids of the reporters

  ProvenanceKind kind() const;
};

struct GroundTruthRecord {
  std::string subject_participant_id;
  Seconds start = 0.0;
  Seconds end = 0.0;
  Fact fact = Fact::WasEating;
  Provenance provenance;

  friend bool operator==(const GroundTruthRecord& a, const GroundTruthRecord& b) {
    return a.subject_participant_id == b.subject_participant_id && a.start == b.start && a.end == b.end &&
           a.fact == b.fact && a.provenance.first_person == b.provenance.first_person &&
           a.provenance.collaborative == b.provenance.collaborative;
  }
};

/// Roster members of the reporter's home that a who-with option can refer
/// to, given the reporter's role. The reporter is never a candidate.
///
///   reporter child (Son/Daughter): Mother -> Mother, Father -> Father,
///                                  Sisters -> other Daughters, Brothers -> other Sons
///   reporter parent (Mother/Father): SpousePartner -> the other parent role,
///                                    Children -> every Son and Daughter
///
/// Every other combination (Nobody, Grandparent, OtherFamily, Friends,
/// OtherPeople, or a mention that does not fit the reporter) resolves to
/// nobody.
std::vector<Participant> who_with_candidates(const Participant& reporter, WhoWith mention,
                                             const std::vector<Participant>& roster);

/// Builds WasEating / WasNotEating records from eating-EMA responses.
/// Confirmed responses give a first-person record for the reporter; each
/// who-with mention that resolves to exactly one roster member gives a
/// collaborative record for that member. Records about one subject whose
/// reference times are within `window` of each other coalesce into one
/// record carrying every source. A record spans reference time +- window.
/// Output is sorted and does not depend on the order of `responses`.
/// Throws UnknownHome when a reporter is not on the roster.
std::vector<GroundTruthRecord> resolve_collaborative_gt(const std::vector<EmaResponse>& responses,
                                                        const std::vector<Participant>& roster,
                                                        Seconds window = 900.0);

struct HourlyGroundTruth {
  GroundTruthRecord record;
  bool missed_detection = false;
};

/// For each answered mood EMA: ate_last_hour = true gives WasEating over the
/// preceding hour, flagged as a missed detection when no detected event of
/// that participant overlaps the hour; false gives WasNotEating.
std::vector<HourlyGroundTruth> resolve_hourly_gt(const std::vector<EmaResponse>& mood_responses,
                                                 const std::vector<EatingEvent>& detected);

const char* to_string(Fact f);
const char* to_string(ProvenanceKind k);

}  // namespace mfed::ema

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srp {

enum class DisfluencyKind {
  FilledPause,  // FP: euh, hum, hm
  Pause,
  Truncation,
  MidwordBreak,
  RepetitionRepair,
  PhoneticVariant,
  ContractionExpansion,
  Unresolved,
};

std::string_view to_string(DisfluencyKind k);

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive, byte offsets into the raw transcript
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct DisfluencyEvent {
  DisfluencyKind kind;
  CharSpan span;
  std::optional<std::string> resolution;
  // Numeral of a "[N#...]" repair; recorded, never enforced.
  std::optional<int> repair_count;
};

struct SegmentDisfluencyCounts {
  long disfluencies = 0;
  long fillers = 0;
  long fillers_plus_3 = 0;
  friend bool operator==(const SegmentDisfluencyCounts&, const SegmentDisfluencyCounts&) = default;
};

struct ParsedTranscript {
  std::vector<DisfluencyEvent> events;
  // Post-resolution surface tokens, filler particles in place.
  std::vector<std::string> tokens;
  std::vector<std::string> warnings;
};

// Notation:
//   "/"            pause
//   "xy/"          fragment (truncation, or midword break when the word that
//                  follows is resolved by a "[N#text]" repair)
//   "[N#text]"     repair: replaces the preceding word with `text`
//   "[N#]"         repair closing a disfluent region; the preceding word stays
//   "[x:rest]"     phonetic or lengthening variant of the preceding word
//   euh/hum/hm     filler particles (case-folded)
// A word repeated across a run of fragments ("the s/ the") is kept once.
// Unbalanced or unknown brackets become Unresolved events plus a warning.
ParsedTranscript parse_transcript(std::string_view raw);

struct NormalizedSegment {
  std::string clean;
  std::vector<std::size_t> fp_positions;  // indices into the clean token sequence
  SegmentDisfluencyCounts counts;
  std::vector<DisfluencyEvent> events;
  std::vector<std::string> warnings;
};

// Clean text keeps resolved words and filler particles only; the first
// non-filler word is capitalised.
NormalizedSegment normalize_segment(std::string_view raw);

SegmentDisfluencyCounts count_disfluencies(const std::vector<DisfluencyEvent>& events);

}  // namespace srp

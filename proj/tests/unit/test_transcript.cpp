#include <gtest/gtest.h>

#include <algorithm>

#include "srpkit/records.hpp"
#include "srpkit/transcript.hpp"
#include "srpkit/utf8.hpp"

using namespace srp;

namespace {

const char* kAnnotated =
    "and finally, / hum / I'm [1#I am] seeking to / euh take out / the s/ [s:] the ad/ dition "
    "[2#addition] of split and hm separate [s:eperate] v/ ow/ votes [v:otes] [3#] / to [to:] the "
    "procedure that will permit / the President to refer euh / back to a [a:] euh / committee, / "
    "a r/ f/ f/ f/ f/ f/ report / which has attracted m/ ow/ m/ more [4#] than euh f/ fifty "
    "[f:ifty] [2#] substantive a/ a/ a/ am/ m/ mendments [6#amendments].";

const char* kClean =
    "And finally, hum I am seeking to euh take out the addition of split and hm separate votes to "
    "the procedure that will permit the President to refer euh back to a euh committee, a report "
    "which has attracted more than euh fifty substantive amendments.";

long count_kind(const std::vector<DisfluencyEvent>& ev, DisfluencyKind k) {
  return std::count_if(ev.begin(), ev.end(), [&](const auto& e) { return e.kind == k; });
}

}  // namespace

TEST(Transcript, GoldenFragment) {
  auto n = normalize_segment(kAnnotated);
  EXPECT_EQ(n.clean, kClean);
  long in_clean = 0;
  for (const auto& t : utf8::split_ws(kClean)) in_clean += is_filler_form(t);
  EXPECT_EQ(in_clean, 6);
  EXPECT_EQ(n.counts.fillers, in_clean);
  EXPECT_EQ(n.fp_positions.size(), 6u);
  auto toks = utf8::split_ws(n.clean);
  for (auto p : n.fp_positions) {
    ASSERT_LT(p, toks.size());
    EXPECT_TRUE(toks[p] == "euh" || toks[p] == "hum" || toks[p] == "hm") << toks[p];
  }
  EXPECT_LE(n.counts.fillers, n.counts.fillers_plus_3);
  EXPECT_LE(n.counts.fillers_plus_3, n.counts.disfluencies);
  EXPECT_TRUE(n.warnings.empty());
}

TEST(Transcript, ContractionExpansion) {
  auto t = parse_transcript("I'm [1#I am] seeking to euh take out");
  EXPECT_EQ(utf8::join(t.tokens), "I am seeking to euh take out");
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::ContractionExpansion), 1);
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::FilledPause), 1);
  EXPECT_EQ(t.events.size(), 2u);
}

TEST(Transcript, TruncationAndVariant) {
  auto t = parse_transcript("f/ fifty [f:ifty]");
  EXPECT_EQ(utf8::join(t.tokens), "fifty");
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::Truncation), 1);
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::PhoneticVariant), 1);
  EXPECT_EQ(t.events.size(), 2u);
}

TEST(Transcript, PlainWordHasNoEvents) {
  auto t = parse_transcript("hello");
  EXPECT_EQ(t.tokens, std::vector<std::string>{"hello"});
  EXPECT_TRUE(t.events.empty());
}

TEST(Transcript, FillersOnly) {
  auto n = normalize_segment("euh euh");
  EXPECT_EQ(n.clean, "euh euh");
  EXPECT_EQ(n.fp_positions, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(n.counts.fillers, 2);
}

TEST(Transcript, FillerVariantsCaseFold) {
  auto n = normalize_segment("Euh we HUM go");
  EXPECT_EQ(n.clean, "euh We hum go");
  EXPECT_EQ(n.counts.fillers, 2);
}

TEST(Transcript, PauseCountsAsDisfluencyOnly) {
  auto n = normalize_segment("we / go");
  EXPECT_EQ(n.clean, "We go");
  EXPECT_EQ(n.counts.disfluencies, 1);
  EXPECT_EQ(n.counts.fillers, 0);
}

TEST(Transcript, MidwordBreakResolvedByRepair) {
  auto t = parse_transcript("the ad/ dition [2#addition] of");
  EXPECT_EQ(utf8::join(t.tokens), "the addition of");
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::MidwordBreak), 1);
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::RepetitionRepair), 0);
  for (const auto& e : t.events)
    if (e.kind == DisfluencyKind::MidwordBreak) {
      EXPECT_EQ(e.resolution.value_or(""), "addition");
      EXPECT_EQ(e.repair_count.value_or(0), 2);
    }
}

TEST(Transcript, UnbalancedBracketWarns) {
  auto t = parse_transcript("we [2#go home");
  EXPECT_EQ(count_kind(t.events, DisfluencyKind::Unresolved), 1);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(Transcript, CleanTextCarriesNoNotation) {
  auto n = normalize_segment(kAnnotated);
  for (const auto& tok : utf8::split_ws(n.clean)) {
    if (tok == "euh" || tok == "hum" || tok == "hm") continue;
    EXPECT_EQ(tok.find_first_of("/[]#"), std::string::npos) << tok;
  }
}

TEST(Transcript, IdempotentOnCleanText) {
  auto once = normalize_segment(kAnnotated);
  auto twice = normalize_segment(once.clean);
  EXPECT_EQ(twice.clean, once.clean);
  EXPECT_EQ(twice.fp_positions, once.fp_positions);
  EXPECT_EQ(twice.counts.fillers, once.counts.fillers);
}

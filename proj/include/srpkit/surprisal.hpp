#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srpkit/adapters.hpp"
#include "srpkit/annotate.hpp"

namespace srp {

enum class RecoveryRule {
  None,
  Normalized,  // byte-level or encoding artefact fixed (Ã¼ber -> über)
  Abbreviation,
  FloatLike,
  PunctSequence,
  Split7525,
  Summed,
  Failed,
};

std::string_view to_string(RecoveryRule r);

struct SubwordScore {
  std::string surface;  // begin marker stripped
  double logprob2 = 0.0;
  bool begins_word = false;
  bool is_punct_unit = false;
  double bits() const { return logprob2 == 0.0 ? 0.0 : -logprob2; }
};

// Pre-aggregated unit: one or more subwords that start at a begin-of-word
// marker, or a single punctuation-only subword.
struct ScoringUnit {
  std::string surface;
  double bits = 0.0;
  int n_subwords = 0;
};

struct WordSurprisal {
  std::size_t word_index = 0;
  std::optional<double> bits;
  int n_subwords = 0;
  RecoveryRule recovery_rule = RecoveryRule::None;
};

inline constexpr std::size_t kSubwordCap = 150;
inline constexpr std::size_t kSlidingWindow = 64;
inline constexpr double kLeadShare = 0.75;

// Converts to base 2, strips the begin marker and sets begins_word from it.
// Throws AdapterError on positive log-probabilities.
std::vector<SubwordScore> ingest(std::span<const RawSubwordScore> raw, const AdapterInfo& info);

std::vector<ScoringUnit> preaggregate(std::span<const SubwordScore> subwords);

// Maps units onto words. Surfaces are compared after byte-level decoding
// with whitespace removed; the two streams are cut into the smallest
// blocks that end on a common boundary, and each block is resolved by
// its shape. Words outside any resolvable block get Failed.
std::vector<WordSurprisal> realign_cascade(std::span<const ScoringUnit> units,
                                           std::span<const std::string> words);

// Scores of one segment side. `words` holds one entry per surface row,
// word_index being the row index in the segment.
struct SegmentScores {
  std::vector<WordSurprisal> words;
  std::vector<double> subword_bits;
  std::string status = "ok";
  bool truncated = false;
  std::vector<std::string> warnings;
};

SegmentScores score_segment_bounded(const TokenizedSegment& seg, CausalLMAdapter& adapter,
                                    std::size_t cap = kSubwordCap);

// Subwords past `window` are rescored on exactly the preceding window-1
// subwords; no truncation.
SegmentScores score_sliding_window(const TokenizedSegment& seg, CausalLMAdapter& adapter,
                                   std::size_t window = kSlidingWindow);

// Target-side surprisal under teacher forcing.
SegmentScores score_mt(const TokenizedSegment& src, const TokenizedSegment& tgt,
                       MTAdapter& adapter, std::size_t cap = kSubwordCap);

struct SegmentAggregates {
  std::optional<double> token;
  std::optional<double> subword;
};

SegmentAggregates segment_aggregates(const SegmentScores& scores);

// Writes word bits into `column` of the segment rows; every other row
// gets null.
void assign_bits(std::vector<WordRow>& rows, const SegmentScores& scores,
                 std::optional<double> WordRow::*column);

// Joins model tokens into text: marker-led tokens open a new word.
std::string detokenize(std::span<const ModelToken> tokens, const AdapterInfo& info);

struct PseudoBleu {
  double score = 0.0;
  std::vector<std::string> warnings;
};

// Sentence BLEU of the argmax-under-gold-prefix prediction against the
// reference target.
PseudoBleu pseudo_bleu(std::string_view source, std::string_view target, MTAdapter& adapter);

}  // namespace srp

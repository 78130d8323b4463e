#pragma once

// Deterministic stand-ins for the model and parser adapters, plus a random
// segment generator whose pieces exercise every realignment case.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "srpkit/adapters.hpp"
#include "srpkit/annotate.hpp"
#include "srpkit/conllu.hpp"

namespace srp::mock {

inline constexpr const char* kMarker = "\xC4\xA0";  // "Ġ"

// GPT-2 style byte-to-unicode encoding of raw UTF-8 bytes.
std::string byte_level_encode(std::string_view s);

// Natural-log probability of `next` after exactly `context`. Every context
// token matters, so truncated contexts give different values.
double mock_logprob(std::span<const ModelToken> context, const ModelToken& next);

// Tokenisation is registered per text; unregistered texts fall back to
// whitespace words cut into chunks of three bytes.
class MockLM : public CausalLMAdapter {
 public:
  AdapterInfo info() const override { return {"mock-lm", kMarker, LogBase::Natural, 0}; }
  std::vector<RawSubwordScore> score(std::string_view text) override;
  double score_next(std::span<const ModelToken> context, const ModelToken& next) override;

  void add(const std::string& text, std::vector<ModelToken> tokens) { vocab_[text] = std::move(tokens); }
  std::vector<ModelToken> tokenize(std::string_view text) const;

  struct Call {
    std::vector<ModelToken> context;
    ModelToken next;
  };
  std::vector<Call> next_calls;
  long score_calls = 0;

 private:
  std::map<std::string, std::vector<ModelToken>, std::less<>> vocab_;
};

// Parses registered texts; others become one flat sentence of whitespace words.
class MockParser : public ParserAdapter {
 public:
  std::string identity() const override { return "mock-parser"; }
  std::vector<ConlluSentence> annotate(std::string_view text, std::string_view lang) override;
  void add(const std::string& text, std::vector<ConlluSentence> parse) { parses_[text] = std::move(parse); }

 private:
  std::map<std::string, std::vector<ConlluSentence>, std::less<>> parses_;
};

ConlluToken word_token(int id, const std::string& form, int head);
ConlluToken range_token(int first, int last, const std::string& form);

enum class PieceKind { Plain, Punct, Abbrev, Spaced, DigitHyphen, Apostrophe, ByteLevel, Multiword };

// One stretch of text with its parser words and model subwords.
struct Piece {
  PieceKind kind = PieceKind::Plain;
  std::string text;                 // as it appears in the segment
  std::vector<std::string> words;   // parser surface words
  std::vector<std::string> lm;      // model subwords without markers
  bool range = false;               // words[0] is a multiword with two expansions
};

struct MockSegment {
  std::vector<Piece> pieces;
  std::vector<std::string> fillers_before;  // per piece, FP tokens in front (clean text)
  std::string clean;                        // with filler particles
  std::string text;                         // without
  std::vector<std::size_t> fp_positions;
  std::vector<ModelToken> tokens;           // model tokens of `text`
  std::vector<ConlluSentence> parse;
};

Piece random_piece(std::mt19937_64& rng);
// Assembles text, tokens and parse from pieces; fillers are inserted
// with probability `fp_rate` before each piece.
MockSegment assemble(std::vector<Piece> pieces, std::mt19937_64& rng, double fp_rate = 0.1);
MockSegment random_segment(std::mt19937_64& rng, std::size_t n_pieces, double fp_rate = 0.1);
// Registers the segment with both mocks and runs annotate_segment.
TokenizedSegment annotate_mock(const MockSegment& seg, MockLM& lm, MockParser& parser);

}  // namespace srp::mock

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srpkit/conllu.hpp"
#include "srpkit/transcript.hpp"

namespace srp {

enum class LogBase { Natural, Two };

// Adapter-declared metadata. The begin-of-word marker (e.g. "Ġ" or "▁") is
// stripped from subword surfaces at ingestion.
struct AdapterInfo {
  std::string name;
  std::string begin_marker;
  LogBase log_base = LogBase::Natural;
  int dim = 0;  // encoder output dimension, 0 for scoring models
};

// A model token as the model emits it (marker included).
struct ModelToken {
  std::string surface;
  bool begins_word = false;
  friend bool operator==(const ModelToken&, const ModelToken&) = default;
};

struct RawSubwordScore {
  std::string surface;
  double logprob = 0.0;  // in the adapter's declared base
  bool begins_word = false;
};

// Left-to-right language model scoring within one segment; the first
// subword is conditioned on the begin-of-segment marker only.
class CausalLMAdapter {
 public:
  virtual ~CausalLMAdapter() = default;
  virtual AdapterInfo info() const = 0;
  virtual std::vector<RawSubwordScore> score(std::string_view text) = 0;
  // Log-probability of `next` given exactly `context` (no begin marker).
  virtual double score_next(std::span<const ModelToken> context, const ModelToken& next) = 0;
};

// Translation model under teacher forcing on the target side.
class MTAdapter {
 public:
  virtual ~MTAdapter() = default;
  virtual AdapterInfo info() const = 0;
  virtual std::vector<RawSubwordScore> score(std::string_view source, std::string_view target) = 0;
  // Token t is the argmax continuation of the gold target prefix [0, t).
  virtual std::vector<ModelToken> predict_argmax(std::string_view source,
                                                 std::string_view target) = 0;
};

struct EmbeddedSubword {
  std::string surface;
  CharSpan span;  // byte range in the embedded text
  std::vector<double> vector;
};

class EncoderAdapter {
 public:
  virtual ~EncoderAdapter() = default;
  virtual AdapterInfo info() const = 0;
  virtual std::vector<EmbeddedSubword> embed(std::string_view text, std::string_view lang) = 0;
};

}  // namespace srp

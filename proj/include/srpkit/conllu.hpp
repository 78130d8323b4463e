#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srpkit/records.hpp"

namespace srp {

// One CoNLL-U line. Multiword ranges ("1-2  It's") have is_range set and
// cover [first, last]; empty nodes ("3.1") are dropped by the reader.
struct ConlluToken {
  bool is_range = false;
  int first = 0;
  int last = 0;
  ConlluFields fields;
};

using ConlluSentence = std::vector<ConlluToken>;

class ConlluError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses one token line (10 tab-separated fields).
ConlluToken parse_conllu_line(std::string_view line);
// Parses blank-line separated sentences; comment lines are ignored.
std::vector<ConlluSentence> parse_conllu(std::string_view text);

// Checks that the words of a sentence form a tree: one root, heads in
// range, no cycles. Returns an empty string when valid, else a reason.
std::string validate_tree(const ConlluSentence& sentence);

class AdapterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract for UD parsers: (text, lang) -> sentences of CoNLL-U records,
// multiword ranges included.
class ParserAdapter {
 public:
  virtual ~ParserAdapter() = default;
  virtual std::string identity() const = 0;
  virtual std::vector<ConlluSentence> annotate(std::string_view text, std::string_view lang) = 0;
};

// Serves stored parses. The file holds CoNLL-U blocks grouped per segment;
// a "# seg_text = <input text>" comment opens each group. Lookups are by
// exact input text; a miss throws AdapterError.
class ReplayParserAdapter : public ParserAdapter {
 public:
  explicit ReplayParserAdapter(std::string_view conllu_text, std::string identity = "replay-parser");
  static std::shared_ptr<ReplayParserAdapter> from_file(const std::string& path);

  std::string identity() const override { return identity_; }
  std::vector<ConlluSentence> annotate(std::string_view text, std::string_view lang) override;
  std::size_t size() const { return segments_.size(); }

 private:
  std::string identity_;
  std::map<std::string, std::vector<ConlluSentence>, std::less<>> segments_;
};

}  // namespace srp

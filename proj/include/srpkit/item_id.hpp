#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace srp {

enum class Mode { Spoken, Written };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

// Raised when an identifier does not follow
// <ttype>_<mode>_<src>_<tgt>_<doc>-<seg>[:<word>[:<sub>]].
class ItemIdError : public std::runtime_error {
 public:
  ItemIdError(std::string component, const std::string& what)
      : std::runtime_error(what), component_(std::move(component)) {}
  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

// Hierarchical identifier of a document, segment, word or multiword
// expansion row. Numeric parts are kept as strings so that zero padding
// survives a render/parse round trip.
struct ItemId {
  std::string ttype;  // ORG, SI, TR, ... (configuration, uppercase letters)
  Mode mode = Mode::Spoken;
  std::string src_lang;
  std::string tgt_lang;
  std::string doc;
  std::string seg;
  std::optional<std::string> word;
  std::optional<int> sub;

  std::string str() const;
  // Identifier of the enclosing segment (word and sub cleared).
  ItemId segment() const;
  // "<ttype>_<mode>_<src>_<tgt>_<doc>"
  std::string doc_key() const;
  // "<src>-<tgt>"
  std::string lpair() const { return src_lang + "-" + tgt_lang; }

  friend bool operator==(const ItemId&, const ItemId&) = default;
};

ItemId parse_item_id(std::string_view s);

// Zero-padded numeric part, e.g. pad_number(7, 3) == "007".
std::string pad_number(long value, int width);

// Padding widths for doc/seg/word numbers; the corpus default is 3/2/3.
struct IdWidths {
  int doc = 3;
  int seg = 2;
  int word = 3;
};

}  // namespace srp

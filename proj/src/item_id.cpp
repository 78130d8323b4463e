#include "srpkit/item_id.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace srp {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool all_upper(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c); });
}

[[noreturn]] void fail(const char* component, std::string_view input, const std::string& why) {
  throw ItemIdError(component, "invalid item id '" + std::string(input) + "': " + why);
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Spoken ? "SP" : "WR"; }

Mode parse_mode(std::string_view s) {
  if (s == "SP") return Mode::Spoken;
  if (s == "WR") return Mode::Written;
  throw ItemIdError("mode", "unknown mode '" + std::string(s) + "' (expected SP or WR)");
}

std::string ItemId::doc_key() const {
  std::string out = ttype;
  out += '_';
  out += to_string(mode);
  out += '_' + src_lang + '_' + tgt_lang + '_' + doc;
  return out;
}

std::string ItemId::str() const {
  std::string out = doc_key();
  out += '-' + seg;
  if (word) {
    out += ':' + *word;
    if (sub) out += ':' + std::to_string(*sub);
  }
  return out;
}

ItemId ItemId::segment() const {
  ItemId s = *this;
  s.word.reset();
  s.sub.reset();
  return s;
}

ItemId parse_item_id(std::string_view s) {
  static constexpr const char* kParts[] = {"ttype", "mode", "src_lang", "tgt_lang", "doc_id"};
  if (s.empty()) fail("ttype", s, "empty string");

  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (parts.size() < 4) {
    auto pos = s.find('_', start);
    if (pos == std::string_view::npos) break;
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  parts.push_back(s.substr(start));
  if (parts.size() < 5) fail(kParts[parts.size()], s, std::string("missing ") + kParts[parts.size()]);

  ItemId id;
  if (!all_upper(parts[0])) fail("ttype", s, "text type must be uppercase letters");
  id.ttype = parts[0];
  try {
    id.mode = parse_mode(parts[1]);
  } catch (const ItemIdError&) {
    fail("mode", s, "mode must be SP or WR");
  }
  if (parts[2].size() != 2 || !all_upper(parts[2])) fail("src_lang", s, "expected two-letter code");
  if (parts[3].size() != 2 || !all_upper(parts[3])) fail("tgt_lang", s, "expected two-letter code");
  id.src_lang = parts[2];
  id.tgt_lang = parts[3];

  std::string_view rest = parts[4];
  auto dash = rest.find('-');
  if (dash == std::string_view::npos) fail("seg_id", s, "missing seg_id");
  std::string_view doc = rest.substr(0, dash);
  if (!all_digits(doc)) fail("doc_id", s, "doc_id must be digits");
  id.doc = doc;

  rest = rest.substr(dash + 1);
  std::vector<std::string_view> colon;
  start = 0;
  for (;;) {
    auto pos = rest.find(':', start);
    colon.push_back(rest.substr(start, pos == std::string_view::npos ? rest.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (colon.size() > 3) fail("sub_index", s, "too many ':' components");
  if (!all_digits(colon[0])) fail("seg_id", s, "seg_id must be digits");
  id.seg = colon[0];
  if (colon.size() >= 2) {
    if (!all_digits(colon[1])) fail("word_id", s, "word_id must be digits");
    id.word = std::string(colon[1]);
  }
  if (colon.size() == 3) {
    std::string_view sub = colon[2];
    int value = 0;
    auto [p, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), value);
    if (!all_digits(sub) || ec != std::errc() || p != sub.data() + sub.size() || value < 1 ||
        std::to_string(value) != sub)
      fail("sub_index", s, "sub_index must be a positive integer without padding");
    id.sub = value;
  }
  return id;
}

std::string pad_number(long value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return digits;
}

}  // namespace srp

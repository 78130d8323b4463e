#include "srpkit/transcript.hpp"

#include <algorithm>
#include <cctype>

#include "srpkit/records.hpp"
#include "srpkit/utf8.hpp"

namespace srp {

std::string_view to_string(DisfluencyKind k) {
  switch (k) {
    case DisfluencyKind::FilledPause:
      return "FP";
    case DisfluencyKind::Pause:
      return "pause";
    case DisfluencyKind::Truncation:
      return "truncation";
    case DisfluencyKind::MidwordBreak:
      return "midword_break";
    case DisfluencyKind::RepetitionRepair:
      return "repetition_repair";
    case DisfluencyKind::PhoneticVariant:
      return "phonetic_variant";
    case DisfluencyKind::ContractionExpansion:
      return "contraction_expansion";
    case DisfluencyKind::Unresolved:
      return "unresolved";
  }
  return "?";
}

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Splits "finally," into ("finally", ",").
std::pair<std::string, std::string> split_trailing_punct(std::string_view word) {
  auto cps = utf8::decode(word);
  std::size_t cut = cps.size();
  while (cut > 0 && utf8::is_punct(cps[cut - 1])) --cut;
  std::vector<char32_t> core(cps.begin(), cps.begin() + static_cast<long>(cut));
  std::vector<char32_t> tail(cps.begin() + static_cast<long>(cut), cps.end());
  return {utf8::encode(core), utf8::encode(tail)};
}

bool has_apostrophe(std::string_view s) {
  return s.find('\'') != std::string_view::npos || s.find("’") != std::string_view::npos;
}

struct Item {
  enum Kind { Word, Bracket, Broken } kind;
  std::string text;    // word text or bracket content
  std::string suffix;  // characters glued after "]"
  CharSpan span;
};

std::vector<Item> lex(std::string_view raw, ParsedTranscript& result) {
  std::vector<Item> items;
  std::size_t i = 0;
  const std::size_t n = raw.size();
  auto token_end = [&](std::size_t from) {
    while (from < n && !is_ws(raw[from])) ++from;
    return from;
  };
  while (i < n) {
    if (is_ws(raw[i])) {
      ++i;
      continue;
    }
    if (raw[i] == '[') {
      std::size_t close = raw.find(']', i + 1);
      std::size_t nested = raw.find('[', i + 1);
      if (close == std::string_view::npos || (nested != std::string_view::npos && nested < close)) {
        std::size_t end = token_end(i);
        items.push_back({Item::Broken, std::string(raw.substr(i, end - i)), {}, {i, end}});
        result.warnings.push_back("unbalanced bracket at offset " + std::to_string(i));
        i = end;
        continue;
      }
      std::size_t k = close + 1;
      while (k < n && !is_ws(raw[k]) && raw[k] != '[') ++k;
      items.push_back({Item::Bracket, std::string(raw.substr(i + 1, close - i - 1)),
                       std::string(raw.substr(close + 1, k - close - 1)), {i, k}});
      i = k;
      continue;
    }
    std::size_t k = i;
    std::string word;
    while (k < n && !is_ws(raw[k]) && raw[k] != '[') {
      if (raw[k] == ']') {
        items.push_back({Item::Broken, "]", {}, {k, k + 1}});
        result.warnings.push_back("stray ']' at offset " + std::to_string(k));
      } else {
        word += raw[k];
      }
      ++k;
    }
    if (!word.empty()) items.push_back({Item::Word, std::move(word), {}, {i, k}});
    i = k;
  }
  return items;
}

struct OutToken {
  std::string text;
  bool fp = false;
  CharSpan span;
};

}  // namespace

ParsedTranscript parse_transcript(std::string_view raw) {
  ParsedTranscript result;
  auto& events = result.events;
  std::vector<OutToken> out;
  long last_fluent = -1;
  std::vector<std::size_t> frags_since_fluent;   // fragment events after the last fluent word
  std::vector<std::size_t> frags_before_fluent;  // fragments right before the last fluent word
  bool fp_since_fluent = false;

  auto glue_suffix = [&](const std::string& suffix) {
    if (suffix.empty()) return;
    if (last_fluent >= 0)
      out[static_cast<std::size_t>(last_fluent)].text += suffix;
    else
      result.warnings.push_back("punctuation '" + suffix + "' has no word to attach to");
  };

  for (const Item& item : lex(raw, result)) {
    switch (item.kind) {
      case Item::Broken:
        events.push_back({DisfluencyKind::Unresolved, item.span, std::nullopt, std::nullopt});
        break;

      case Item::Word: {
        const std::string& w = item.text;
        if (w == "/") {
          events.push_back({DisfluencyKind::Pause, item.span, std::nullopt, std::nullopt});
          break;
        }
        if (w.back() == '/') {
          frags_since_fluent.push_back(events.size());
          events.push_back({DisfluencyKind::Truncation, item.span, std::nullopt, std::nullopt});
          break;
        }
        auto [core, tail] = split_trailing_punct(w);
        std::string folded = lower_ascii(core);
        if (is_filler_form(folded)) {
          events.push_back({DisfluencyKind::FilledPause, item.span, folded, std::nullopt});
          out.push_back({folded, true, item.span});
          glue_suffix(tail);
          fp_since_fluent = true;
          break;
        }
        if (!frags_since_fluent.empty() && !fp_since_fluent && last_fluent >= 0 &&
            static_cast<std::size_t>(last_fluent) + 1 == out.size() &&
            lower_ascii(out.back().text) == lower_ascii(w)) {
          CharSpan span{out.back().span.begin, item.span.begin};
          events.push_back({DisfluencyKind::RepetitionRepair, span, w, std::nullopt});
          out.pop_back();
        }
        frags_before_fluent = std::move(frags_since_fluent);
        frags_since_fluent.clear();
        fp_since_fluent = false;
        out.push_back({w, false, item.span});
        last_fluent = static_cast<long>(out.size()) - 1;
        break;
      }

      case Item::Bracket: {
        const std::string& c = item.text;
        std::size_t hash = c.find('#');
        bool numeral = hash != std::string::npos && hash > 0 &&
                       std::all_of(c.begin(), c.begin() + static_cast<long>(hash),
                                   [](unsigned char ch) { return std::isdigit(ch); });
        if (numeral) {
          int n = std::stoi(c.substr(0, hash));
          std::string text = utf8::strip_ws(c.substr(hash + 1));
          if (text.empty()) {
            events.push_back({DisfluencyKind::RepetitionRepair, item.span, std::nullopt, n});
            glue_suffix(item.suffix);
            break;
          }
          if (!frags_since_fluent.empty()) {
            // Fragments with no continuation word: the repair supplies the word.
            auto& frag = events[frags_since_fluent.back()];
            frag.kind = DisfluencyKind::MidwordBreak;
            frag.resolution = text;
            frag.repair_count = n;
            frags_before_fluent = std::move(frags_since_fluent);
            frags_since_fluent.clear();
            fp_since_fluent = false;
            out.push_back({text, false, item.span});
            last_fluent = static_cast<long>(out.size()) - 1;
            glue_suffix(item.suffix);
            break;
          }
          if (last_fluent < 0) {
            events.push_back({DisfluencyKind::Unresolved, item.span, text, n});
            result.warnings.push_back("repair '[" + c + "]' has no preceding word");
            break;
          }
          auto& target = out[static_cast<std::size_t>(last_fluent)];
          if (!frags_before_fluent.empty()) {
            auto& frag = events[frags_before_fluent.back()];
            frag.kind = DisfluencyKind::MidwordBreak;
            frag.resolution = text;
            frag.repair_count = n;
          } else if (has_apostrophe(target.text)) {
            events.push_back({DisfluencyKind::ContractionExpansion, item.span, text, n});
          } else {
            events.push_back({DisfluencyKind::RepetitionRepair, item.span, text, n});
          }
          target.text = text;
          glue_suffix(item.suffix);
          break;
        }
        if (c.find(':') != std::string::npos) {
          events.push_back({DisfluencyKind::PhoneticVariant, item.span, std::nullopt, std::nullopt});
          glue_suffix(item.suffix);
          break;
        }
        events.push_back({DisfluencyKind::Unresolved, item.span, c, std::nullopt});
        result.warnings.push_back("unknown bracket content '[" + c + "]'");
        glue_suffix(item.suffix);
        break;
      }
    }
  }

  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.span.begin < b.span.begin;
  });
  for (const auto& t : out)
    for (auto& piece : utf8::split_ws(t.text)) result.tokens.push_back(std::move(piece));
  return result;
}

SegmentDisfluencyCounts count_disfluencies(const std::vector<DisfluencyEvent>& events) {
  SegmentDisfluencyCounts c;
  for (const auto& e : events) {
    switch (e.kind) {
      case DisfluencyKind::FilledPause:
        ++c.fillers;
        ++c.fillers_plus_3;
        ++c.disfluencies;
        break;
      case DisfluencyKind::MidwordBreak:
      case DisfluencyKind::RepetitionRepair:
      case DisfluencyKind::Truncation:
        ++c.fillers_plus_3;
        ++c.disfluencies;
        break;
      case DisfluencyKind::Pause:
      case DisfluencyKind::PhoneticVariant:
        ++c.disfluencies;
        break;
      case DisfluencyKind::ContractionExpansion:
      case DisfluencyKind::Unresolved:
        break;
    }
  }
  return c;
}

namespace {

std::string capitalize_first(std::string_view word) {
  auto cps = utf8::decode(word);
  for (auto& cp : cps) {
    if (utf8::is_letter(cp)) {
      if (cp >= 'a' && cp <= 'z')
        cp -= 0x20;
      else if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7)
        cp -= 0x20;
      break;
    }
    if (!utf8::is_punct(cp)) break;
  }
  return utf8::encode(cps);
}

}  // namespace

NormalizedSegment normalize_segment(std::string_view raw) {
  ParsedTranscript parsed = parse_transcript(raw);
  NormalizedSegment seg;
  for (std::size_t i = 0; i < parsed.tokens.size(); ++i) {
    if (is_filler_form(parsed.tokens[i])) {
      seg.fp_positions.push_back(i);
    }
  }
  for (auto& tok : parsed.tokens) {
    if (!is_filler_form(tok)) {
      tok = capitalize_first(tok);
      break;
    }
  }
  seg.clean = utf8::join(parsed.tokens);
  seg.counts = count_disfluencies(parsed.events);
  seg.events = std::move(parsed.events);
  seg.warnings = std::move(parsed.warnings);
  return seg;
}

}  // namespace srp

#include "srpkit/standardize.hpp"

#include <cstdio>
#include <unordered_map>

#include "srpkit/utf8.hpp"

namespace srp {

const std::vector<CharMapping>& char_mapping_table() {
  static const std::vector<CharMapping> table = {
      // double quotes
      {0x201C, U"\"", "quote"}, {0x201D, U"\"", "quote"}, {0x201E, U"\"", "quote"},
      {0x201F, U"\"", "quote"}, {0x00AB, U"\"", "quote"}, {0x00BB, U"\"", "quote"},
      {0x2033, U"\"", "quote"}, {0x301D, U"\"", "quote"}, {0x301E, U"\"", "quote"},
      {0xFF02, U"\"", "quote"},
      // single quotes and apostrophes
      {0x2018, U"'", "quote"}, {0x2019, U"'", "quote"}, {0x201A, U"'", "quote"},
      {0x201B, U"'", "quote"}, {0x2039, U"'", "quote"}, {0x203A, U"'", "quote"},
      {0x2032, U"'", "quote"}, {0x00B4, U"'", "quote"}, {0x0060, U"'", "quote"},
      {0xFF07, U"'", "quote"},
      // dashes: every variant becomes hyphen-minus
      {0x2010, U"-", "dash"}, {0x2011, U"-", "dash"}, {0x2012, U"-", "dash"},
      {0x2013, U"-", "dash"}, {0x2014, U"-", "dash"}, {0x2015, U"-", "dash"},
      {0x2212, U"-", "dash"}, {0xFE58, U"-", "dash"}, {0xFE63, U"-", "dash"},
      {0xFF0D, U"-", "dash"},
      // superscripts
      {0x2070, U"0", "superscript"}, {0x00B9, U"1", "superscript"},
      {0x00B2, U"2", "superscript"}, {0x00B3, U"3", "superscript"},
      {0x2074, U"4", "superscript"}, {0x2075, U"5", "superscript"},
      {0x2076, U"6", "superscript"}, {0x2077, U"7", "superscript"},
      {0x2078, U"8", "superscript"}, {0x2079, U"9", "superscript"},
      {0x207A, U"+", "superscript"}, {0x207B, U"-", "superscript"},
      {0x207C, U"=", "superscript"}, {0x207D, U"(", "superscript"},
      {0x207E, U")", "superscript"}, {0x2071, U"i", "superscript"},
      {0x207F, U"n", "superscript"},
      // space variants
      {0x00A0, U" ", "space"}, {0x2002, U" ", "space"}, {0x2003, U" ", "space"},
      {0x2004, U" ", "space"}, {0x2005, U" ", "space"}, {0x2006, U" ", "space"},
      {0x2007, U" ", "space"}, {0x2008, U" ", "space"}, {0x2009, U" ", "space"},
      {0x200A, U" ", "space"}, {0x202F, U" ", "space"}, {0x205F, U" ", "space"},
      {0x3000, U" ", "space"},
      // invisible characters
      {0x00AD, U"", "invisible"}, {0x200B, U"", "invisible"}, {0xFEFF, U"", "invisible"},
  };
  return table;
}

std::string char_mapping_manifest() {
  std::string out =
      "# srpkit character mapping v1: <code point>\\t<replacement code points>\\t# category\n";
  char buf[16];
  for (const auto& m : char_mapping_table()) {
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(m.from));
    out += buf;
    out += '\t';
    for (std::size_t i = 0; i < m.to.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%sU+%04X", i ? " " : "", static_cast<unsigned>(m.to[i]));
      out += buf;
    }
    out += "\t# ";
    out += m.category;
    out += '\n';
  }
  return out;
}

std::string standardize(std::string_view text, std::string_view /*lang*/) {
  static const auto lookup = [] {
    std::unordered_map<char32_t, const std::u32string*> m;
    for (const auto& e : char_mapping_table()) m.emplace(e.from, &e.to);
    return m;
  }();

  std::vector<char32_t> mapped;
  for (char32_t cp : utf8::decode(text)) {
    if ((cp < 0x20 && cp != '\t' && cp != '\n') || cp == 0x7F) continue;
    if (auto it = lookup.find(cp); it != lookup.end()) {
      mapped.insert(mapped.end(), it->second->begin(), it->second->end());
    } else {
      mapped.push_back(cp);
    }
  }
  std::vector<char32_t> out;
  out.reserve(mapped.size());
  for (char32_t cp : mapped) {
    if (cp == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(cp);
  }
  return utf8::encode(out);
}

std::string force_tokenize_hyphens(std::string_view text) {
  auto cps = utf8::decode(text);
  auto word = [](char32_t c) { return utf8::is_letter(c) || utf8::is_digit(c); };
  std::string out;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] == '-' && i > 0 && i + 1 < cps.size() && word(cps[i - 1]) && word(cps[i + 1]) &&
        (utf8::is_letter(cps[i - 1]) || utf8::is_letter(cps[i + 1]))) {
      out += kHyphenMark;
    } else {
      out += utf8::encode(cps[i]);
    }
  }
  return out;
}

std::string restore_hyphens(std::string_view text) {
  std::string out(text);
  std::size_t pos = 0;
  while ((pos = out.find(kHyphenMark, pos)) != std::string::npos) {
    out.replace(pos, kHyphenMark.size(), "-");
    ++pos;
  }
  return out;
}

}  // namespace srp

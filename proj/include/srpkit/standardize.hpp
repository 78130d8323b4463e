#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srp {

// One entry of the character mapping table. An empty replacement deletes
// the code point.
struct CharMapping {
  char32_t from;
  std::u32string to;
  const char* category;  // quote, dash, superscript, space, invisible
};

// The frozen mapping table, in manifest order.
const std::vector<CharMapping>& char_mapping_table();
// Plain-text two-column manifest ("U+201E\tU+0022\t# quote").
std::string char_mapping_manifest();

// Removes non-printable ASCII (tab and newline survive), applies the mapping
// table and collapses runs of spaces. Idempotent. `lang` is accepted for
// per-language policies; the current table is language independent.
std::string standardize(std::string_view text, std::string_view lang = {});

// Marker placed around hyphens that join word characters.
inline constexpr std::string_view kHyphenMark = " @-@ ";

// Marks intra-word hyphens as token boundaries for the parser adapter:
// "EVP-Fraktion" -> "EVP @-@ Fraktion". A hyphen between two digits is left
// alone ("20-30").
std::string force_tokenize_hyphens(std::string_view text);
// Inverse of force_tokenize_hyphens.
std::string restore_hyphens(std::string_view text);

}  // namespace srp

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace srp::utf8 {

// Decodes UTF-8; invalid bytes come back as U+FFFD, one per byte.
std::vector<char32_t> decode(std::string_view s);
std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);
bool valid(std::string_view s);

bool is_space(char32_t cp);
bool is_digit(char32_t cp);
// Letters: ASCII letters plus every non-ASCII code point that is neither
// punctuation, a symbol we know of, nor whitespace.
bool is_letter(char32_t cp);
bool is_punct(char32_t cp);

// True when every code point of `s` is punctuation (empty -> false).
bool all_punct(std::string_view s);
bool starts_with_digit(std::string_view s);

// Whitespace-delimited tokens.
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");
std::string strip_ws(std::string_view s);
std::string remove_ws(std::string_view s);

// Reverses the byte-to-unicode table of byte-level BPE vocabularies
// ("Ã¼" -> "ü"). Returns the input unchanged when it is not a byte-level
// string or does not decode to valid UTF-8.
std::string decode_byte_level(std::string_view s);

}  // namespace srp::utf8

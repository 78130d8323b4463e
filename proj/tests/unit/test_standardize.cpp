#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "srpkit/standardize.hpp"
#include "srpkit/utf8.hpp"

using namespace srp;

namespace {

// Reads the two-column code-point table straight from data/char_map.tsv.
std::vector<std::pair<char32_t, std::u32string>> manifest_entries() {
  std::ifstream in(std::string(SRPKIT_DATA_DIR) + "/char_map.tsv");
  std::vector<std::pair<char32_t, std::u32string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string from, to;
    std::getline(ss, from, '\t');
    std::getline(ss, to, '\t');
    auto cp = [](const std::string& s) { return static_cast<char32_t>(std::stoul(s.substr(2), nullptr, 16)); };
    std::u32string repl;
    std::stringstream ts(to);
    for (std::string t; ts >> t;) repl.push_back(cp(t));
    out.emplace_back(cp(from), repl);
  }
  return out;
}

}  // namespace

TEST(Standardize, RemovesControlCharacters) {
  EXPECT_EQ(standardize("\x07Hello\tworld"), "Hello\tworld");
  EXPECT_EQ(standardize("a\x1b[b\x7f"), "a[b");
  EXPECT_EQ(standardize("line\nnext"), "line\nnext");
}

TEST(Standardize, QuotesAndDashes) {
  EXPECT_EQ(standardize("\xE2\x80\x9EHaus\xE2\x80\x9C \xE2\x80\x93 gut"), "\"Haus\" - gut");
  EXPECT_EQ(standardize("it\xE2\x80\x99s"), "it's");
}

TEST(Standardize, Superscripts) { EXPECT_EQ(standardize("m\xC2\xB2"), "m2"); }

TEST(Standardize, CollapsesSpaces) {
  EXPECT_EQ(standardize("a   b\xC2\xA0\xC2\xA0" "c"), "a b c");
  EXPECT_EQ(standardize("soft\xC2\xADhyphen"), "softhyphen");
}

TEST(Standardize, ManifestFileMatchesTable) {
  std::ifstream in(std::string(SRPKIT_DATA_DIR) + "/char_map.tsv");
  ASSERT_TRUE(in) << "data/char_map.tsv missing";
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), char_mapping_manifest());
}

TEST(Standardize, EveryManifestEntryApplies) {
  auto entries = manifest_entries();
  ASSERT_GT(entries.size(), 40u);
  for (const auto& [from, to] : entries) {
    std::string in = "x" + utf8::encode(std::vector<char32_t>{from}) + "y";
    std::string expect = "x" + utf8::encode(std::vector<char32_t>(to.begin(), to.end())) + "y";
    EXPECT_EQ(standardize(in), expect) << std::hex << static_cast<unsigned>(from);
  }
}

TEST(Standardize, OutputAvoidsMappedDomainAndIsIdempotent) {
  auto entries = manifest_entries();
  std::vector<char32_t> all;
  for (const auto& [from, to] : entries) {
    all.push_back(from);
    all.push_back('a');
  }
  for (char32_t c = 0; c < 0x20; ++c) all.push_back(c);
  std::string once = standardize(utf8::encode(all));
  for (char32_t cp : utf8::decode(once)) {
    for (const auto& e : entries) EXPECT_NE(cp, e.first);
    EXPECT_TRUE(cp >= 0x20 || cp == '\t' || cp == '\n');
  }
  EXPECT_EQ(standardize(once), once);
}

TEST(Hyphens, MarksWordHyphensOnly) {
  EXPECT_EQ(force_tokenize_hyphens("EVP-Fraktion"), "EVP @-@ Fraktion");
  EXPECT_EQ(force_tokenize_hyphens("a well-known fact"), "a well @-@ known fact");
  EXPECT_EQ(force_tokenize_hyphens("20-30"), "20-30");
  EXPECT_EQ(force_tokenize_hyphens("- dash -"), "- dash -");
  EXPECT_EQ(restore_hyphens(force_tokenize_hyphens("0,7%-Ziel well-intended")),
            "0,7%-Ziel well-intended");
}

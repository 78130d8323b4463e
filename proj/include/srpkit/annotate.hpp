#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srpkit/conllu.hpp"
#include "srpkit/records.hpp"
#include "srpkit/transcript.hpp"

namespace srp {

// Identity and metadata shared by every row of one segment side.
struct SegmentContext {
  ItemId segment;  // word and sub unset
  std::string lang;
  OptString speaker_id;
  int word_width = 3;
  bool with_raw_seg = true;
};

struct TokenizedSegment {
  std::vector<WordRow> word_rows;
  std::vector<std::size_t> fp_positions;         // row indices of FP rows
  std::vector<std::size_t> sentence_boundaries;  // row index opening each sentence
  std::string text;   // scored text: filler particles removed
  std::string clean;  // clean text with filler particles
  bool parsed = true;
  std::string parser_identity;
  std::vector<std::string> warnings;
};

// Parses `clean_text` with the filler particles at `fp_positions` (indices
// into its whitespace tokens) removed, then reinserts them as FP rows.
// Multiword tokens yield a surface row followed by expansion rows
// (sub_index 1..k). Word numbering runs across sentences and FP rows.
// Adapter failures leave an unparsed segment (token and ids only).
// Throws std::invalid_argument for out-of-range fp_positions.
TokenizedSegment annotate_segment(std::string_view clean_text,
                                  const std::vector<std::size_t>& fp_positions,
                                  const SegmentContext& ctx, ParserAdapter& adapter);

// Filler particle positions of a clean text (tokens equal to euh/hum/hm).
std::vector<std::size_t> find_fp_positions(std::string_view clean_text);

// Character span of every row in the scored text, keyed by row index.
// Expansion rows get their surface row's span; FP and placeholder rows map
// to nullopt, as do rows whose token cannot be located (with a warning).
std::map<std::size_t, std::optional<CharSpan>> surface_map(
    const TokenizedSegment& seg, std::vector<std::string>* warnings = nullptr);

// Row indices of the surface rows (scored, aligned), in order.
std::vector<std::size_t> surface_row_indices(const TokenizedSegment& seg);

// Row metadata for a segment context.
WordRow make_row(const SegmentContext& ctx, long word_number, std::optional<int> sub = {});

}  // namespace srp

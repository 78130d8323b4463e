#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srpkit/item_id.hpp"

namespace srp {

using OptString = std::optional<std::string>;
using OptReal = std::optional<double>;
using OptCount = std::optional<long>;
using OptList = std::optional<std::vector<std::string>>;

// Columns that a reader did not recognise, kept verbatim in file order.
using ExtraColumns = std::vector<std::pair<std::string, std::string>>;

// The ten CoNLL-U fields; "_" in parser output becomes null.
struct ConlluFields {
  OptString id, token, lemma, pos, xpos, feats, head_id, rel, deps, misc;
  friend bool operator==(const ConlluFields&, const ConlluFields&) = default;
};

// Filler particles kept in the spoken data.
inline constexpr const char* kFillerForms[] = {"euh", "hum", "hm"};
inline constexpr const char* kFpTag = "FP";
bool is_filler_form(std::string_view token);

struct WordRow {
  ItemId word_id;
  ConlluFields conllu;
  OptReal srp_base_gpt2, srp_ft_gpt2, srp_base_mt, srp_ft_mt;
  OptList aligned_word, aligned_word_id;
  // metadata
  std::string doc_id, seg_id, lpair, lang, mode, ttype;
  OptString speaker_id;
  OptString raw_seg;
  ExtraColumns extra;

  friend bool operator==(const WordRow&, const WordRow&) = default;
};

bool is_fp_row(const WordRow& row);
bool is_expansion_row(const WordRow& row);
// Placeholder row standing for an empty segment side (no word part in the id).
bool is_placeholder_row(const WordRow& row);
// A row that is scored and aligned: not FP, not an expansion, not a placeholder.
bool is_surface_row(const WordRow& row);

// Segment-level ("long") record.
struct SegmentRecord {
  std::string doc_id, seg_id, lpair, lang, mode, ttype;
  OptString speaker_id;
  OptReal delivery_rate, delivery_wpm, speech_timing_sec;
  OptString source_text_delivery_type;
  OptReal base_gpt_AvS, base_gpt_AvS_subw, ft_gpt_AvS, ft_gpt_AvS_subw;
  OptCount disfluencies, fillers, fillers_plus_3;
  OptString raw_seg, tokens;
  long wc_tok = 0;
  ExtraColumns extra;

  friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

// Segment-pair ("wide") record.
struct SegmentPairRecord {
  std::string src_doc_id, src_seg_id, tgt_doc_id, tgt_seg_id, lpair, mode;
  OptString src_raw_seg, tgt_raw_seg;
  OptReal base_mt_AvS, base_mt_AvS_subw, ft_mt_AvS, ft_mt_AvS_subw, base_bleu, ft_bleu;
  ExtraColumns extra;

  friend bool operator==(const SegmentPairRecord&, const SegmentPairRecord&) = default;
};

// Aligned source/target text pair, the unit handled by corpus filters.
struct ParallelSegment {
  std::string seg_id;
  std::string src_text;
  std::string tgt_text;
  friend bool operator==(const ParallelSegment&, const ParallelSegment&) = default;
};

}  // namespace srp

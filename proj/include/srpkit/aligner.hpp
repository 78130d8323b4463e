#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srpkit/adapters.hpp"
#include "srpkit/annotate.hpp"

namespace srp {

inline constexpr double kAlignThreshold = 0.01;

// BothDirections keeps a pair when each directional softmax value exceeds
// the threshold; Mean tests the averaged score instead.
enum class ThresholdMode { BothDirections, Mean };

struct SubwordPair {
  std::size_t i = 0;  // source subword
  std::size_t j = 0;  // target subword
  double forward = 0.0;   // row softmax
  double backward = 0.0;  // column softmax
  double score = 0.0;     // mean of the two
};

// Pairs kept from a similarity matrix (rows: source, columns: target).
std::vector<SubwordPair> align_similarity(const Eigen::MatrixXd& sim,
                                          double threshold = kAlignThreshold,
                                          ThresholdMode mode = ThresholdMode::BothDirections);

// Dot-product similarity of two embedding sequences, one vector per row.
// Throws std::invalid_argument on empty input or a dimension mismatch.
std::vector<SubwordPair> subword_align(const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt,
                                       double threshold = kAlignThreshold,
                                       ThresholdMode mode = ThresholdMode::BothDirections);

Eigen::MatrixXd embedding_matrix(const std::vector<EmbeddedSubword>& subwords);

struct WordLink {
  std::size_t src = 0;
  std::size_t tgt = 0;
  double score = 0.0;
};

// Per source word, the sorted target words it links to (empty: unaligned).
struct AlignmentLink {
  std::size_t src_word = 0;
  std::vector<std::size_t> tgt_words;
  std::vector<double> scores;
};

// Averages pair scores per word pair and keeps means above the threshold.
// Maps send each subword to a word index or nullopt (ignored).
std::vector<WordLink> word_links(const std::vector<SubwordPair>& pairs,
                                 const std::vector<std::optional<std::size_t>>& src_map,
                                 const std::vector<std::optional<std::size_t>>& tgt_map,
                                 double threshold = kAlignThreshold);

std::vector<AlignmentLink> aggregate_to_words(const std::vector<SubwordPair>& pairs,
                                              const std::vector<std::optional<std::size_t>>& src_map,
                                              const std::vector<std::optional<std::size_t>>& tgt_map,
                                              std::size_t n_src_words,
                                              double threshold = kAlignThreshold);

// Word (index into surface_row_indices) overlapping each subword span.
std::vector<std::optional<std::size_t>> map_subwords_to_words(
    const std::vector<EmbeddedSubword>& subwords, const TokenizedSegment& seg);

struct AlignmentResult {
  std::vector<WordLink> links;  // surface word indices on both sides
  std::string status = "ok";
  std::vector<std::string> warnings;
};

// Embeds both sides, aligns them and fills aligned_word / aligned_word_id
// on the surface rows of both segments (target rows list their source
// words). Unaligned and non-surface rows get null.
AlignmentResult align_segments(TokenizedSegment& src, TokenizedSegment& tgt,
                               EncoderAdapter& encoder, double threshold = kAlignThreshold,
                               ThresholdMode mode = ThresholdMode::BothDirections);

struct AlignmentStats {
  long src_tokens = 0;
  double pct_unaligned = 0.0;
  double pct_multi = 0.0;
};

// Over surface rows only. Throws std::invalid_argument when there are none.
AlignmentStats alignment_stats(const std::vector<WordRow>& rows);

}  // namespace srp

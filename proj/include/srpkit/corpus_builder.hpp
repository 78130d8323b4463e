#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srpkit/records.hpp"

namespace srp {

struct DocumentPair {
  std::string doc_id;
  std::vector<ParallelSegment> segments;
  std::optional<double> alignment_score;
  std::string speaker;
  std::string date;
  std::string lpair;  // "DE-EN"
  std::string mode;   // "SP" | "WR"

  std::string src_lang() const { return lpair.substr(0, lpair.find('-')); }
  friend bool operator==(const DocumentPair&, const DocumentPair&) = default;
};

long word_count(std::string_view text);

struct EmptyFilterReport {
  std::vector<std::string> removed_segments;
  bool dropped = false;
  std::string reason;
};

struct EmptyFilterResult {
  std::optional<DocumentPair> kept;
  EmptyFilterReport report;
};

// Written data only: segments with one empty side are removed when they
// sit at a document edge or their other side has three words or fewer;
// any other such segment drops the whole document. Spoken documents pass
// through unchanged.
EmptyFilterResult filter_empty_segments(const DocumentPair& doc, std::string_view mode);

struct ScoreFilterResult {
  std::vector<DocumentPair> kept;
  std::vector<std::string> warnings;
};

// Keeps documents scoring strictly above the cutoff of their direction.
ScoreFilterResult filter_by_score(const std::vector<DocumentPair>& docs, double cutoff);
ScoreFilterResult filter_by_score(const std::vector<DocumentPair>& docs,
                                  const std::map<std::string, double>& cutoff_by_lpair);

using OverlapKey = std::function<std::string(const DocumentPair&)>;
// date|speaker|source language
std::string default_overlap_key(const DocumentPair& doc);

struct OverlapResult {
  std::vector<DocumentPair> kept;
  std::vector<std::string> removed;
};

OverlapResult remove_overlap(const std::vector<DocumentPair>& written,
                             const std::vector<DocumentPair>& spoken,
                             const OverlapKey& key = default_overlap_key);

struct SplitConfig {
  std::size_t test_docs = 170;
  std::size_t min_segments = 12;
  std::uint64_t seed = 42;
};

struct SplitResult {
  std::vector<DocumentPair> test;
  std::vector<DocumentPair> train;
  std::vector<std::string> subsampled_out;  // train candidates dropped for balance
  std::map<std::string, long> test_segments;
  std::map<std::string, long> train_segments;
  std::string objective;
};

// Portable shuffle driven by a 64-bit Mersenne twister.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed);

// Per direction: greedy test selection (each pick has the segment count
// closest to remaining_target / remaining_docs among eligible documents)
// towards the spoken segment total; the rest becomes train, with larger
// directions subsampled by whole documents down to the smallest one.
// Throws std::runtime_error when a direction lacks eligible documents.
SplitResult make_splits(const std::vector<DocumentPair>& written,
                        const std::map<std::string, long>& spoken_segments,
                        const SplitConfig& cfg = {});

struct GroupStats {
  std::string mode, lpair, ttype;
  long words = 0;
  long segs = 0;
  long docs = 0;
  long empty_segs = 0;
  double pct_empty = 0.0;
  long fps = 0;
  double pct_segs_with_fp = 0.0;
  double len_mean = 0.0;
  double len_sd = 0.0;
  long len_min = 0;
  long len_max = 0;
  double pct_multi_sentence = 0.0;
};

// Statistics per (mode, lpair, ttype) over vertical rows. Segment length
// counts surface rows; empty segments are excluded from length stats.
std::vector<GroupStats> describe(const std::vector<WordRow>& rows);

}  // namespace srp

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "srpkit/corpus_builder.hpp"

using namespace srp;

namespace {

std::string words(int n) {
  std::string s;
  for (int k = 0; k < n; ++k) s += (k ? " w" : "w") + std::to_string(k);
  return s;
}

DocumentPair doc(const std::string& id, std::vector<std::pair<int, int>> sizes, double score = 0.9,
                 const std::string& lpair = "DE-EN") {
  DocumentPair d;
  d.doc_id = id;
  d.lpair = lpair;
  d.mode = "WR";
  d.alignment_score = score;
  int k = 0;
  for (auto [s, t] : sizes) d.segments.push_back({id + "-" + std::to_string(++k), words(s), words(t)});
  return d;
}

std::vector<DocumentPair> synthetic_written(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(4, 40);
  std::vector<DocumentPair> out;
  for (const auto& [dir, n] : std::vector<std::pair<std::string, int>>{{"DE-EN", 420}, {"EN-DE", 300}})
    for (int k = 0; k < n; ++k) {
      DocumentPair d = doc(dir.substr(0, 2) + "_" + std::to_string(k), {}, 0.9, dir);
      int segs = len(rng);
      for (int s = 0; s < segs; ++s) d.segments.push_back({d.doc_id + "-" + std::to_string(s), "a", "b"});
      out.push_back(d);
    }
  return out;
}

WordRow row(const std::string& seg, std::optional<int> word, const std::string& token = "w") {
  WordRow r;
  r.word_id = parse_item_id(word ? seg + ":" + pad_number(*word, 3) : seg);
  r.seg_id = seg;
  r.doc_id = r.word_id.doc_key();
  r.mode = "SP";
  r.lpair = "DE-EN";
  r.ttype = "ORG";
  if (word) {
    r.conllu.token = token;
    r.conllu.id = std::to_string(*word);
  }
  return r;
}

}  // namespace

TEST(EmptyFilter, InteriorEmptyAgainstLongSideDropsDocument) {
  auto d = doc("d1", {{5, 5}, {10, 0}, {6, 6}});
  auto r = filter_empty_segments(d, "WR");
  EXPECT_FALSE(r.kept);
  EXPECT_TRUE(r.report.dropped);
}

TEST(EmptyFilter, EdgeAndShortEmptiesAreRemoved) {
  auto d = doc("d1", {{0, 7}, {5, 5}, {3, 0}, {6, 6}, {9, 0}});
  auto r = filter_empty_segments(d, "WR");
  ASSERT_TRUE(r.kept);
  EXPECT_EQ(r.kept->segments.size(), 2u);
  EXPECT_EQ(r.report.removed_segments, (std::vector<std::string>{"d1-1", "d1-3", "d1-5"}));
}

TEST(EmptyFilter, CleanAndSpokenDocumentsUnchanged) {
  auto d = doc("d1", {{5, 5}, {6, 6}});
  EXPECT_EQ(filter_empty_segments(d, "WR").kept, d);
  auto e = doc("d2", {{5, 5}, {10, 0}, {6, 6}});
  EXPECT_EQ(filter_empty_segments(e, "SP").kept, e);
}

TEST(ScoreFilter, StrictCutoffPerDirection) {
  auto r = filter_by_score({doc("a", {}, 0.2), doc("b", {}, 0.4)}, 0.3);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].doc_id, "b");
  std::map<std::string, double> cut = {{"DE-EN", 0.3}, {"EN-DE", 0.5}};
  auto m = filter_by_score({doc("a", {}, 0.4, "DE-EN"), doc("b", {}, 0.4, "EN-DE"), doc("c", {}, 0.5, "EN-DE"),
                            doc("d", {}, 0.51, "EN-DE")},
                           cut);
  ASSERT_EQ(m.kept.size(), 2u);
  EXPECT_EQ(m.kept[0].doc_id, "a");
  EXPECT_EQ(m.kept[1].doc_id, "d");
  EXPECT_TRUE(filter_by_score({}, 0.3).kept.empty());
}

TEST(ScoreFilter, MissingScoreWarns) {
  auto d = doc("a", {});
  d.alignment_score.reset();
  auto r = filter_by_score({d}, 0.3);
  EXPECT_TRUE(r.kept.empty());
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Overlap, RemovesSharedSpeeches) {
  std::vector<DocumentPair> written, spoken;
  for (int k = 0; k < 200; ++k) {
    auto d = doc("w" + std::to_string(k), {});
    d.date = "2010-01-" + std::to_string(k % 28);
    d.speaker = "spk" + std::to_string(k);
    written.push_back(d);
    if (k < 145) {
      d.doc_id = "s" + std::to_string(k);
      spoken.push_back(d);
    }
  }
  auto r = remove_overlap(written, spoken);
  EXPECT_EQ(r.removed.size(), 145u);
  EXPECT_EQ(r.kept.size(), 55u);
  auto none = remove_overlap(written, {});
  EXPECT_EQ(none.kept.size(), 200u);
}

TEST(Splits, SizesBalanceAndDeterminism) {
  auto written = synthetic_written(1);
  std::map<std::string, long> spoken = {{"DE-EN", 3218}, {"EN-DE", 3070}};
  auto a = make_splits(written, spoken);
  auto b = make_splits(written, spoken);
  std::map<std::string, long> test_docs, longest;
  std::set<std::string> seen;
  for (const auto& d : a.test) {
    ++test_docs[d.lpair];
    EXPECT_GE(d.segments.size(), 12u);
    EXPECT_TRUE(seen.insert(d.doc_id).second);
  }
  for (const auto& d : a.train) {
    EXPECT_TRUE(seen.insert(d.doc_id).second);
    longest[d.lpair] = std::max<long>(longest[d.lpair], static_cast<long>(d.segments.size()));
  }
  for (const auto& id : a.subsampled_out) EXPECT_TRUE(seen.insert(id).second);
  EXPECT_EQ(seen.size(), written.size());
  EXPECT_EQ(test_docs["DE-EN"], 170);
  EXPECT_EQ(test_docs["EN-DE"], 170);
  // greedy matching lands close to the spoken total, clamped to what 170 eligible docs allow
  for (const auto& [lp, target] : spoken) {
    std::vector<long> sizes;
    for (const auto& d : written)
      if (d.lpair == lp && d.segments.size() >= 12) sizes.push_back(static_cast<long>(d.segments.size()));
    std::sort(sizes.begin(), sizes.end());
    ASSERT_GE(sizes.size(), 170u);
    long lo = std::accumulate(sizes.begin(), sizes.begin() + 170, 0L);
    long hi = std::accumulate(sizes.end() - 170, sizes.end(), 0L);
    EXPECT_NEAR(a.test_segments[lp], std::clamp(target, lo, hi), 40) << lp;
  }
  long diff = std::abs(a.train_segments["DE-EN"] - a.train_segments["EN-DE"]);
  EXPECT_LE(diff, std::max(longest["DE-EN"], longest["EN-DE"]));
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t k = 0; k < a.test.size(); ++k) EXPECT_EQ(a.test[k].doc_id, b.test[k].doc_id);
  auto c = make_splits(written, spoken, {170, 12, 43});
  bool differs = false;
  for (std::size_t k = 0; k < c.train.size() && k < a.train.size(); ++k)
    differs = differs || c.train[k].doc_id != a.train[k].doc_id;
  EXPECT_TRUE(differs || c.train.size() != a.train.size());
}

TEST(Splits, TooFewEligibleDocuments) {
  std::vector<DocumentPair> written = {doc("a", {{1, 1}})};
  EXPECT_THROW(make_splits(written, {{"DE-EN", 100}}), std::runtime_error);
}

TEST(Describe, QuarterEmpty) {
  std::vector<WordRow> rows;
  for (int w = 1; w <= 3; ++w) rows.push_back(row("ORG_SP_DE_EN_001-01", w));
  for (int w = 1; w <= 5; ++w) rows.push_back(row("ORG_SP_DE_EN_001-02", w));
  rows.push_back(row("ORG_SP_DE_EN_001-03", std::nullopt));
  auto fp = row("ORG_SP_DE_EN_002-01", 1, "euh");
  fp.conllu.pos = "FP";
  fp.conllu.id.reset();
  rows.push_back(fp);
  rows.push_back(row("ORG_SP_DE_EN_002-01", 2));
  rows.back().conllu.id = "1";
  rows.push_back(row("ORG_SP_DE_EN_002-01", 3));
  rows.back().conllu.id = "1";  // second sentence
  auto st = describe(rows);
  ASSERT_EQ(st.size(), 1u);
  const auto& g = st[0];
  EXPECT_EQ(g.segs, 4);
  EXPECT_EQ(g.docs, 2);
  EXPECT_EQ(g.empty_segs, 1);
  EXPECT_DOUBLE_EQ(g.pct_empty, 25.0);
  EXPECT_EQ(g.words, 10);
  EXPECT_EQ(g.fps, 1);
  EXPECT_DOUBLE_EQ(g.pct_segs_with_fp, 25.0);
  EXPECT_EQ(g.len_min, 2);
  EXPECT_EQ(g.len_max, 5);
  EXPECT_DOUBLE_EQ(g.len_mean, 10.0 / 3.0);
  EXPECT_NEAR(g.pct_multi_sentence, 100.0 / 3.0, 1e-12);
  EXPECT_TRUE(describe({}).empty());
}

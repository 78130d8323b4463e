#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "srpkit/aligner.hpp"
#include "srpkit/wire.hpp"

using namespace srp;

namespace {

const std::string kFixtures = SRPKIT_FIXTURE_DIR;

// Plain double loops: each directional softmax from its definition.
struct Brute {
  std::vector<std::vector<double>> fwd, bwd;
};

Brute brute_softmax(const Eigen::MatrixXd& s) {
  const auto n = static_cast<std::size_t>(s.rows()), m = static_cast<std::size_t>(s.cols());
  Brute b{std::vector<std::vector<double>>(n, std::vector<double>(m)),
          std::vector<std::vector<double>>(n, std::vector<double>(m))};
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) z += std::exp(s(i, j));
    for (std::size_t j = 0; j < m; ++j) b.fwd[i][j] = std::exp(s(i, j)) / z;
  }
  for (std::size_t j = 0; j < m; ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(s(i, j));
    for (std::size_t i = 0; i < n; ++i) b.bwd[i][j] = std::exp(s(i, j)) / z;
  }
  return b;
}

void expect_matches_brute(const Eigen::MatrixXd& s, double threshold) {
  auto b = brute_softmax(s);
  auto pairs = align_similarity(s, threshold);
  std::size_t k = 0;
  for (std::size_t i = 0; i < b.fwd.size(); ++i)
    for (std::size_t j = 0; j < b.fwd[i].size(); ++j) {
      bool keep = b.fwd[i][j] > threshold && b.bwd[i][j] > threshold;
      if (!keep) continue;
      ASSERT_LT(k, pairs.size());
      EXPECT_EQ(pairs[k].i, i);
      EXPECT_EQ(pairs[k].j, j);
      EXPECT_NEAR(pairs[k].forward, b.fwd[i][j], 1e-12);
      EXPECT_NEAR(pairs[k].backward, b.bwd[i][j], 1e-12);
      EXPECT_NEAR(pairs[k].score, 0.5 * (b.fwd[i][j] + b.bwd[i][j]), 1e-12);
      ++k;
    }
  EXPECT_EQ(k, pairs.size());
}

WordRow surface(int n, OptList aligned) {
  WordRow r;
  r.word_id = parse_item_id("ORG_SP_DE_EN_001-01:" + pad_number(n, 3));
  r.conllu.token = "w";
  r.aligned_word = std::move(aligned);
  return r;
}

}  // namespace

TEST(Aligner, TwoByTwoMatchesBruteForce) {
  Eigen::MatrixXd s(2, 2);
  s << 3.0, -1.0, 0.5, 2.0;
  expect_matches_brute(s, kAlignThreshold);
}

TEST(Aligner, ThreeByThreeMatchesBruteForce) {
  Eigen::MatrixXd s(3, 3);
  s << 5.0, 0.1, -2.0, 0.0, 0.0, 4.0, 1.0, 6.0, 1.0;
  expect_matches_brute(s, kAlignThreshold);
  expect_matches_brute(s, 0.3);
}

TEST(Aligner, RandomMatricesMatchBruteForce) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd s(1 + t % 5, 1 + (t / 5) % 6);
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = g(rng);
    expect_matches_brute(s, kAlignThreshold);
  }
}

TEST(Aligner, UniformAndSingleton) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 4);
  auto all = align_similarity(z);
  EXPECT_EQ(all.size(), 12u);
  for (const auto& p : all) {
    EXPECT_NEAR(p.forward, 0.25, 1e-15);
    EXPECT_NEAR(p.backward, 1.0 / 3.0, 1e-15);
  }
  Eigen::MatrixXd one(1, 1);
  one << -7.0;
  auto p = align_similarity(one);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].score, 1.0);
}

TEST(Aligner, MeanModeKeepsOneSidedPairs) {
  Eigen::MatrixXd s(2, 3);
  s << 0.0, 0.0, 0.0, 10.0, 10.0, 10.0;
  // row 0 is uniform (1/3 each) but loses every column softmax
  auto both = align_similarity(s, 0.01);
  auto mean = align_similarity(s, 0.01, ThresholdMode::Mean);
  EXPECT_EQ(both.size(), 3u);
  EXPECT_EQ(mean.size(), 6u);
}

TEST(Aligner, Errors) {
  Eigen::MatrixXd a(2, 3), b(2, 4), e(0, 3);
  a.setZero();
  b.setZero();
  EXPECT_THROW(subword_align(a, b), std::invalid_argument);
  EXPECT_THROW(subword_align(e, a), std::invalid_argument);
  EXPECT_THROW(align_similarity(Eigen::MatrixXd(0, 0)), std::invalid_argument);
}

TEST(Aligner, PermutationEquivariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  Eigen::MatrixXd src(4, 5), tgt(3, 5);
  for (Eigen::Index i = 0; i < src.size(); ++i) src.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < tgt.size(); ++i) tgt.data()[i] = g(rng);
  const std::vector<int> perm = {2, 0, 3, 1};
  Eigen::MatrixXd ps(4, 5);
  for (int r = 0; r < 4; ++r) ps.row(r) = src.row(perm[r]);
  auto a = subword_align(src, tgt);
  auto b = subword_align(ps, tgt);
  ASSERT_EQ(a.size(), b.size());
  for (const auto& p : b) {
    auto orig = static_cast<std::size_t>(perm[p.i]);
    auto it = std::find_if(a.begin(), a.end(), [&](const auto& q) { return q.i == orig && q.j == p.j; });
    ASSERT_NE(it, a.end());
    EXPECT_NEAR(it->score, p.score, 1e-12);
  }
}

TEST(Aligner, WordAggregation) {
  std::vector<SubwordPair> pairs = {{0, 0, 0.9, 0.9, 0.9}, {1, 0, 0.5, 0.5, 0.5}, {1, 1, 0.2, 0.2, 0.2},
                                    {2, 1, 0.004, 0.004, 0.004}};
  std::vector<std::optional<std::size_t>> sm = {0, 0, 1}, tm = {0, 1};
  auto links = aggregate_to_words(pairs, sm, tm, 3);
  ASSERT_EQ(links.size(), 3u);
  EXPECT_EQ(links[0].tgt_words, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(links[0].scores[0], 0.7, 1e-15);
  EXPECT_TRUE(links[1].tgt_words.empty());
  EXPECT_TRUE(links[2].tgt_words.empty());
}

TEST(Aligner, ExcerptEncoderReplay) {
  auto parser = ReplayParserAdapter::from_file(kFixtures + "/excerpt/parser.conllu");
  const std::string tclean = "It's all euh hm euh very well-intended. But there's";
  const std::string sclean = "Begonnen ist es mit guten Absichten, leider gibt es";
  auto tgt = annotate_segment(tclean, find_fp_positions(tclean),
                              {parse_item_id("SI_SP_DE_EN_030-21"), "EN", std::string("fEN3"), 3, true},
                              *parser);
  auto src = annotate_segment(sclean, {},
                              {parse_item_id("ORG_SP_DE_EN_030-21"), "DE", std::string("mDE7"), 3, true},
                              *parser);
  WireEncoder enc(open_transport("replay:" + kFixtures + "/excerpt/encoder.jsonl"));
  auto res = align_segments(src, tgt, enc);
  ASSERT_EQ(res.status, "ok");
  const auto& wi = tgt.word_rows[8];
  ASSERT_EQ(wi.conllu.token, "well-intended");
  EXPECT_EQ(wi.aligned_word, (std::vector<std::string>{"guten", "Absichten"}));
  EXPECT_EQ(wi.aligned_word_id,
            (std::vector<std::string>{"ORG_SP_DE_EN_030-21:005", "ORG_SP_DE_EN_030-21:006"}));
  EXPECT_EQ(tgt.word_rows[0].aligned_word, (std::vector<std::string>{"Begonnen", "ist"}));
  EXPECT_EQ(tgt.word_rows[7].aligned_word, (std::vector<std::string>{"guten"}));
  EXPECT_EQ(tgt.word_rows[10].aligned_word, (std::vector<std::string>{"leider"}));
  EXPECT_FALSE(tgt.word_rows[3].aligned_word);  // all
  EXPECT_FALSE(tgt.word_rows[4].aligned_word);  // FP
  EXPECT_FALSE(tgt.word_rows[1].aligned_word);  // expansion
  EXPECT_EQ(src.word_rows[4].aligned_word, (std::vector<std::string>{"very", "well-intended"}));
}

TEST(AlignmentStats, CountsSurfaceRows) {
  std::vector<WordRow> rows;
  for (int k = 1; k <= 10; ++k) {
    OptList a = std::vector<std::string>{"x"};
    if (k <= 3) a = std::nullopt;
    if (k == 4 || k == 5) a = std::vector<std::string>{"x", "y"};
    rows.push_back(surface(k, a));
  }
  WordRow fp = surface(11, std::nullopt);
  fp.conllu.token = "euh";
  fp.conllu.pos = "FP";
  rows.push_back(fp);
  auto st = alignment_stats(rows);
  EXPECT_EQ(st.src_tokens, 10);
  EXPECT_DOUBLE_EQ(st.pct_unaligned, 30.0);
  EXPECT_DOUBLE_EQ(st.pct_multi, 20.0);
  EXPECT_THROW(alignment_stats({fp}), std::invalid_argument);
}

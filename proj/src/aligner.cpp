#include "srpkit/aligner.hpp"

#include <map>
#include <stdexcept>

namespace srp {

std::vector<SubwordPair> align_similarity(const Eigen::MatrixXd& sim, double threshold,
                                          ThresholdMode mode) {
  if (sim.rows() == 0 || sim.cols() == 0)
    throw std::invalid_argument("empty similarity matrix");
  Eigen::MatrixXd a(sim.rows(), sim.cols()), b(sim.rows(), sim.cols());
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    Eigen::RowVectorXd e = (sim.row(i).array() - sim.row(i).maxCoeff()).exp();
    a.row(i) = e / e.sum();
  }
  for (Eigen::Index j = 0; j < sim.cols(); ++j) {
    Eigen::VectorXd e = (sim.col(j).array() - sim.col(j).maxCoeff()).exp();
    b.col(j) = e / e.sum();
  }
  std::vector<SubwordPair> out;
  for (Eigen::Index i = 0; i < sim.rows(); ++i)
    for (Eigen::Index j = 0; j < sim.cols(); ++j) {
      double f = a(i, j), g = b(i, j), m = 0.5 * (f + g);
      bool keep = f > 0.0 && g > 0.0 &&
                  (mode == ThresholdMode::BothDirections ? f > threshold && g > threshold
                                                         : m > threshold);
      if (keep)
        out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), f, g, m});
    }
  return out;
}

std::vector<SubwordPair> subword_align(const Eigen::MatrixXd& src, const Eigen::MatrixXd& tgt,
                                       double threshold, ThresholdMode mode) {
  if (src.rows() == 0 || tgt.rows() == 0) throw std::invalid_argument("empty embedding sequence");
  if (src.cols() != tgt.cols())
    throw std::invalid_argument("embedding dimensions differ: " + std::to_string(src.cols()) +
                                " vs " + std::to_string(tgt.cols()));
  return align_similarity(src * tgt.transpose(), threshold, mode);
}

Eigen::MatrixXd embedding_matrix(const std::vector<EmbeddedSubword>& subwords) {
  if (subwords.empty()) return {};
  const auto dim = static_cast<Eigen::Index>(subwords.front().vector.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(subwords.size()), dim);
  for (std::size_t r = 0; r < subwords.size(); ++r) {
    if (static_cast<Eigen::Index>(subwords[r].vector.size()) != dim)
      throw std::invalid_argument("ragged embeddings at subword " + std::to_string(r));
    for (Eigen::Index c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), c) = subwords[r].vector[c];
  }
  return m;
}

std::vector<WordLink> word_links(const std::vector<SubwordPair>& pairs,
                                 const std::vector<std::optional<std::size_t>>& src_map,
                                 const std::vector<std::optional<std::size_t>>& tgt_map,
                                 double threshold) {
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, long>> acc;
  for (const auto& p : pairs) {
    if (p.i >= src_map.size() || p.j >= tgt_map.size())
      throw std::out_of_range("subword pair outside the word maps");
    if (!src_map[p.i] || !tgt_map[p.j]) continue;
    auto& [sum, n] = acc[{*src_map[p.i], *tgt_map[p.j]}];
    sum += p.score;
    ++n;
  }
  std::vector<WordLink> out;
  for (const auto& [key, v] : acc) {
    double mean = v.first / static_cast<double>(v.second);
    if (mean > threshold) out.push_back({key.first, key.second, mean});
  }
  return out;
}

std::vector<AlignmentLink> aggregate_to_words(const std::vector<SubwordPair>& pairs,
                                              const std::vector<std::optional<std::size_t>>& src_map,
                                              const std::vector<std::optional<std::size_t>>& tgt_map,
                                              std::size_t n_src_words, double threshold) {
  std::vector<AlignmentLink> out(n_src_words);
  for (std::size_t s = 0; s < n_src_words; ++s) out[s].src_word = s;
  for (const auto& l : word_links(pairs, src_map, tgt_map, threshold)) {
    if (l.src >= n_src_words) throw std::out_of_range("source word index past segment end");
    out[l.src].tgt_words.push_back(l.tgt);
    out[l.src].scores.push_back(l.score);
  }
  return out;
}

std::vector<std::optional<std::size_t>> map_subwords_to_words(
    const std::vector<EmbeddedSubword>& subwords, const TokenizedSegment& seg) {
  auto spans = surface_map(seg);
  auto rows = surface_row_indices(seg);
  std::vector<std::optional<std::size_t>> out(subwords.size());
  for (std::size_t k = 0; k < subwords.size(); ++k) {
    const auto& sp = subwords[k].span;
    for (std::size_t w = 0; w < rows.size(); ++w) {
      const auto& ws = spans[rows[w]];
      if (!ws) continue;
      if (sp.begin < ws->end && ws->begin < sp.end) {
        out[k] = w;
        break;
      }
    }
  }
  return out;
}

namespace {

void clear_alignment(std::vector<WordRow>& rows) {
  for (auto& r : rows) {
    r.aligned_word.reset();
    r.aligned_word_id.reset();
  }
}

}  // namespace

AlignmentResult align_segments(TokenizedSegment& src, TokenizedSegment& tgt,
                               EncoderAdapter& encoder, double threshold, ThresholdMode mode) {
  AlignmentResult res;
  clear_alignment(src.word_rows);
  clear_alignment(tgt.word_rows);
  const auto src_rows = surface_row_indices(src);
  const auto tgt_rows = surface_row_indices(tgt);
  if (src.text.empty() || tgt.text.empty() || src_rows.empty() || tgt_rows.empty()) {
    res.status = "empty";
    return res;
  }
  try {
    auto se = encoder.embed(src.text, src.word_rows.front().lang);
    auto te = encoder.embed(tgt.text, tgt.word_rows.front().lang);
    if (se.empty() || te.empty()) {
      res.status = "empty";
      return res;
    }
    auto pairs = subword_align(embedding_matrix(se), embedding_matrix(te), threshold, mode);
    res.links = word_links(pairs, map_subwords_to_words(se, src), map_subwords_to_words(te, tgt),
                           threshold);
  } catch (const std::exception& e) {
    res.status = "adapter_error";
    res.warnings.push_back(e.what());
    res.links.clear();
    return res;
  }
  // Links are sorted by (src, tgt), so both lists come out in word order.
  for (const auto& l : res.links) {
    auto& s = src.word_rows[src_rows[l.src]];
    auto& t = tgt.word_rows[tgt_rows[l.tgt]];
    if (!s.aligned_word) {
      s.aligned_word.emplace();
      s.aligned_word_id.emplace();
    }
    s.aligned_word->push_back(t.conllu.token.value_or(""));
    s.aligned_word_id->push_back(t.word_id.str());
  }
  std::map<std::size_t, std::vector<std::size_t>> reverse;
  for (const auto& l : res.links) reverse[l.tgt].push_back(l.src);
  for (auto& [tw, srcs] : reverse) {
    auto& t = tgt.word_rows[tgt_rows[tw]];
    t.aligned_word.emplace();
    t.aligned_word_id.emplace();
    for (std::size_t sw : srcs) {
      const auto& s = src.word_rows[src_rows[sw]];
      t.aligned_word->push_back(s.conllu.token.value_or(""));
      t.aligned_word_id->push_back(s.word_id.str());
    }
  }
  return res;
}

AlignmentStats alignment_stats(const std::vector<WordRow>& rows) {
  AlignmentStats st;
  long unaligned = 0, multi = 0;
  for (const auto& r : rows) {
    if (!is_surface_row(r)) continue;
    ++st.src_tokens;
    if (!r.aligned_word || r.aligned_word->empty())
      ++unaligned;
    else if (r.aligned_word->size() > 1)
      ++multi;
  }
  if (st.src_tokens == 0) throw std::invalid_argument("no source tokens to describe");
  st.pct_unaligned = 100.0 * static_cast<double>(unaligned) / static_cast<double>(st.src_tokens);
  st.pct_multi = 100.0 * static_cast<double>(multi) / static_cast<double>(st.src_tokens);
  return st;
}

}  // namespace srp

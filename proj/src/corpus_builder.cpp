#include "srpkit/corpus_builder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "srpkit/utf8.hpp"

namespace srp {

long word_count(std::string_view text) { return static_cast<long>(utf8::split_ws(text).size()); }

EmptyFilterResult filter_empty_segments(const DocumentPair& doc, std::string_view mode) {
  EmptyFilterResult res;
  if (mode != "WR") {
    res.kept = doc;
    return res;
  }
  const auto& segs = doc.segments;
  auto empty_side = [](const ParallelSegment& s) {
    return word_count(s.src_text) == 0 || word_count(s.tgt_text) == 0;
  };
  // Empty-aligned runs touching either end count as edges.
  std::size_t lead = 0;
  while (lead < segs.size() && empty_side(segs[lead])) ++lead;
  std::size_t trail = segs.size();
  while (trail > lead && empty_side(segs[trail - 1])) --trail;

  DocumentPair out = doc;
  out.segments.clear();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!empty_side(s)) {
      out.segments.push_back(s);
      continue;
    }
    long other = std::max(word_count(s.src_text), word_count(s.tgt_text));
    bool edge = i < lead || i >= trail;
    if (edge || other <= 3) {
      res.report.removed_segments.push_back(s.seg_id);
      continue;
    }
    res.report.dropped = true;
    res.report.reason = "segment " + s.seg_id + " has an empty side against " +
                        std::to_string(other) + " words";
    return res;
  }
  res.kept = std::move(out);
  return res;
}

ScoreFilterResult filter_by_score(const std::vector<DocumentPair>& docs,
                                  const std::map<std::string, double>& cutoff_by_lpair) {
  ScoreFilterResult res;
  for (const auto& d : docs) {
    auto c = cutoff_by_lpair.find(d.lpair);
    if (c == cutoff_by_lpair.end()) c = cutoff_by_lpair.find("*");
    if (c == cutoff_by_lpair.end()) {
      res.warnings.push_back("no score cutoff for " + d.lpair + ", document " + d.doc_id +
                             " excluded");
      continue;
    }
    if (!d.alignment_score) {
      res.warnings.push_back("document " + d.doc_id + " has no alignment score, excluded");
      continue;
    }
    if (*d.alignment_score > c->second) res.kept.push_back(d);
  }
  return res;
}

ScoreFilterResult filter_by_score(const std::vector<DocumentPair>& docs, double cutoff) {
  return filter_by_score(docs, std::map<std::string, double>{{"*", cutoff}});
}

std::string default_overlap_key(const DocumentPair& doc) {
  return doc.date + "|" + doc.speaker + "|" + doc.src_lang();
}

OverlapResult remove_overlap(const std::vector<DocumentPair>& written,
                             const std::vector<DocumentPair>& spoken, const OverlapKey& key) {
  std::set<std::string> spoken_keys;
  for (const auto& d : spoken) spoken_keys.insert(key(d));
  OverlapResult res;
  for (const auto& d : written) {
    if (spoken_keys.count(key(d)))
      res.removed.push_back(d.doc_id);
    else
      res.kept.push_back(d);
  }
  return res;
}

template <class T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

template void seeded_shuffle<std::size_t>(std::vector<std::size_t>&, std::uint64_t);
template void seeded_shuffle<std::string>(std::vector<std::string>&, std::uint64_t);

namespace {

long seg_count(const DocumentPair& d) { return static_cast<long>(d.segments.size()); }

// Stable per-direction seed so adding a direction does not reshuffle others.
std::uint64_t direction_seed(std::uint64_t seed, const std::string& lpair) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : lpair) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

}  // namespace

SplitResult make_splits(const std::vector<DocumentPair>& written,
                        const std::map<std::string, long>& spoken_segments,
                        const SplitConfig& cfg) {
  SplitResult res;
  res.objective = "greedy: pick the eligible document (>= " + std::to_string(cfg.min_segments) +
                  " segments) whose size is closest to remaining_target/remaining_docs, " +
                  std::to_string(cfg.test_docs) + " documents per direction";

  std::map<std::string, std::vector<std::size_t>> by_dir;
  {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < written.size(); ++k) {
      if (!seen.insert(written[k].lpair + "/" + written[k].doc_id).second)
        throw std::invalid_argument("duplicate document " + written[k].doc_id);
      by_dir[written[k].lpair].push_back(k);
    }
  }

  std::map<std::string, std::vector<std::size_t>> train_by_dir;
  for (auto& [dir, idx] : by_dir) {
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return written[a].doc_id < written[b].doc_id; });
    seeded_shuffle(idx, direction_seed(cfg.seed, dir));

    auto target_it = spoken_segments.find(dir);
    if (target_it == spoken_segments.end())
      throw std::runtime_error("no spoken size target for direction " + dir);
    std::vector<std::size_t> eligible;
    for (std::size_t k : idx)
      if (written[k].segments.size() >= cfg.min_segments) eligible.push_back(k);
    if (eligible.size() < cfg.test_docs)
      throw std::runtime_error(dir + ": only " + std::to_string(eligible.size()) +
                               " documents with >= " + std::to_string(cfg.min_segments) +
                               " segments, " + std::to_string(cfg.test_docs) + " needed");

    std::set<std::size_t> chosen;
    double remaining = static_cast<double>(target_it->second);
    for (std::size_t left = cfg.test_docs; left > 0; --left) {
      const double want = remaining / static_cast<double>(left);
      std::size_t best = 0;
      double best_gap = 0.0;
      bool have = false;
      for (std::size_t pos = 0; pos < eligible.size(); ++pos) {
        if (chosen.count(eligible[pos])) continue;
        double gap = std::fabs(static_cast<double>(seg_count(written[eligible[pos]])) - want);
        if (!have || gap < best_gap) {
          best = eligible[pos];
          best_gap = gap;
          have = true;
        }
      }
      chosen.insert(best);
      remaining -= static_cast<double>(seg_count(written[best]));
    }
    for (std::size_t k : idx) {
      if (chosen.count(k)) {
        res.test.push_back(written[k]);
        res.test_segments[dir] += seg_count(written[k]);
      } else {
        train_by_dir[dir].push_back(k);
      }
    }
  }

  long floor_segs = -1;
  for (const auto& [dir, idx] : train_by_dir) {
    long total = 0;
    for (std::size_t k : idx) total += seg_count(written[k]);
    if (floor_segs < 0 || total < floor_segs) floor_segs = total;
  }
  for (const auto& [dir, idx] : train_by_dir) {
    // idx is already in shuffled order; take documents while they fit.
    long total = 0;
    for (std::size_t k : idx) {
      long n = seg_count(written[k]);
      if (total + n <= floor_segs) {
        total += n;
        res.train.push_back(written[k]);
      } else {
        res.subsampled_out.push_back(written[k].doc_id);
      }
    }
    res.train_segments[dir] = total;
  }
  return res;
}

namespace {

struct SegAcc {
  long len = 0;
  long fps = 0;
  long sentences = 0;
  bool empty = false;
};

}  // namespace

std::vector<GroupStats> describe(const std::vector<WordRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::map<std::string, SegAcc>> segs;
  std::map<Key, std::set<std::string>> docs;
  for (const auto& r : rows) {
    Key k{r.mode, r.lpair, r.ttype};
    auto& s = segs[k][r.seg_id];
    docs[k].insert(r.doc_id);
    if (is_placeholder_row(r)) {
      s.empty = true;
      continue;
    }
    if (is_fp_row(r)) {
      ++s.fps;
      continue;
    }
    if (is_expansion_row(r)) continue;
    ++s.len;
    const auto& id = r.conllu.id;
    if (id && (*id == "1" || id->rfind("1-", 0) == 0)) ++s.sentences;
  }
  std::vector<GroupStats> out;
  for (const auto& [k, by_seg] : segs) {
    GroupStats g;
    std::tie(g.mode, g.lpair, g.ttype) = k;
    g.docs = static_cast<long>(docs[k].size());
    long with_fp = 0, multi = 0, nonempty = 0;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& [id, s] : by_seg) {
      ++g.segs;
      g.words += s.len;
      g.fps += s.fps;
      if (s.fps > 0) ++with_fp;
      if (s.empty || s.len == 0) {
        ++g.empty_segs;
        continue;
      }
      if (s.sentences > 1) ++multi;
      if (nonempty == 0 || s.len < g.len_min) g.len_min = s.len;
      if (nonempty == 0 || s.len > g.len_max) g.len_max = s.len;
      ++nonempty;
      sum += static_cast<double>(s.len);
      sumsq += static_cast<double>(s.len) * static_cast<double>(s.len);
    }
    auto pct = [](long a, long b) { return b > 0 ? 100.0 * static_cast<double>(a) / b : 0.0; };
    g.pct_empty = pct(g.empty_segs, g.segs);
    g.pct_segs_with_fp = pct(with_fp, g.segs);
    g.pct_multi_sentence = pct(multi, nonempty);
    if (nonempty > 0) {
      g.len_mean = sum / static_cast<double>(nonempty);
      if (nonempty > 1)
        g.len_sd = std::sqrt(std::max(0.0, (sumsq - sum * g.len_mean) / (nonempty - 1)));
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace srp

#include "srpkit/surprisal.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "srpkit/bleu.hpp"
#include "srpkit/utf8.hpp"

namespace srp {

std::string_view to_string(RecoveryRule r) {
  switch (r) {
    case RecoveryRule::None: return "none";
    case RecoveryRule::Normalized: return "normalized";
    case RecoveryRule::Abbreviation: return "abbreviation";
    case RecoveryRule::FloatLike: return "float_like";
    case RecoveryRule::PunctSequence: return "punct_sequence";
    case RecoveryRule::Split7525: return "split_75_25";
    case RecoveryRule::Summed: return "summed";
    case RecoveryRule::Failed: return "failed";
  }
  return "?";
}

std::vector<SubwordScore> ingest(std::span<const RawSubwordScore> raw, const AdapterInfo& info) {
  std::vector<SubwordScore> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    if (!std::isfinite(r.logprob) || r.logprob > 1e-9)
      throw AdapterError("invalid log-probability " + std::to_string(r.logprob) + " for '" +
                         r.surface + "'");
    SubwordScore s;
    s.surface = r.surface;
    s.begins_word = r.begins_word;
    const auto& m = info.begin_marker;
    if (!m.empty() && s.surface.compare(0, m.size(), m) == 0) {
      s.surface.erase(0, m.size());
      s.begins_word = true;
    }
    double lp = std::min(r.logprob, 0.0);
    s.logprob2 = info.log_base == LogBase::Natural ? lp / std::numbers::ln2 : lp;
    if (s.logprob2 == 0.0) s.logprob2 = 0.0;  // no negative zero
    s.is_punct_unit = utf8::all_punct(utf8::decode_byte_level(s.surface));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScoringUnit> preaggregate(std::span<const SubwordScore> subwords) {
  std::vector<ScoringUnit> out;
  auto emit = [&](std::size_t a, std::size_t b) {
    ScoringUnit u;
    for (std::size_t k = a; k < b; ++k) {
      u.surface += subwords[k].surface;
      u.bits += subwords[k].bits();
      ++u.n_subwords;
    }
    out.push_back(std::move(u));
  };
  std::size_t start = 0;
  while (start < subwords.size()) {
    std::size_t end = start + 1;
    while (end < subwords.size() && !subwords[end].begins_word) ++end;
    std::size_t a = start;
    while (a < end && subwords[a].is_punct_unit) {
      emit(a, a + 1);
      ++a;
    }
    std::size_t e = end;
    while (e > a && subwords[e - 1].is_punct_unit) --e;
    if (a < e) emit(a, e);
    for (std::size_t k = e; k < end; ++k) emit(k, k + 1);
    start = end;
  }
  return out;
}

namespace {

std::string norm(std::string_view s) { return utf8::remove_ws(utf8::decode_byte_level(s)); }

bool ends_with_period(std::string_view s) { return !s.empty() && s.back() == '.'; }

}  // namespace

std::vector<WordSurprisal> realign_cascade(std::span<const ScoringUnit> in_units,
                                           std::span<const std::string> words) {
  std::vector<WordSurprisal> out(words.size());
  for (std::size_t j = 0; j < words.size(); ++j) {
    out[j].word_index = j;
    out[j].recovery_rule = RecoveryRule::Failed;
  }

  // Units that normalise to nothing (a bare marker) fold into a neighbour.
  std::vector<ScoringUnit> units;
  std::vector<std::string> un;
  double carry = 0.0;
  int carry_n = 0;
  for (const auto& u : in_units) {
    std::string n = norm(u.surface);
    if (n.empty()) {
      carry += u.bits;
      carry_n += u.n_subwords;
      continue;
    }
    ScoringUnit v = u;
    v.bits += carry;
    v.n_subwords += carry_n;
    carry = 0.0;
    carry_n = 0;
    units.push_back(std::move(v));
    un.push_back(std::move(n));
  }
  if (carry_n > 0 && !units.empty()) {
    units.back().bits += carry;
    units.back().n_subwords += carry_n;
  }
  std::vector<std::string> wn;
  for (const auto& w : words) wn.push_back(utf8::remove_ws(w));

  const std::size_t U = units.size(), W = words.size();
  std::size_t i = 0, j = 0;
  while (i < U && j < W) {
    const std::size_t i0 = i, j0 = j;
    std::size_t lu = un[i++].size(), lw = wn[j++].size();
    while (lu != lw) {
      if (lu < lw) {
        if (i == U) break;
        lu += un[i++].size();
      } else {
        if (j == W) break;
        lw += wn[j++].size();
      }
    }
    if (lu != lw) break;  // one stream ran out (truncation): the rest stays failed

    std::string ut, wt;
    for (std::size_t k = i0; k < i; ++k) ut += un[k];
    for (std::size_t k = j0; k < j; ++k) wt += wn[k];
    if (ut != wt) continue;

    const std::size_t m = i - i0, k = j - j0;
    double bits = 0.0;
    int nsub = 0;
    for (std::size_t x = i0; x < i; ++x) {
      bits += units[x].bits;
      nsub += units[x].n_subwords;
    }
    if (k == 1) {
      RecoveryRule rule;
      if (m == 1)
        rule = units[i0].surface == words[j0] ? RecoveryRule::None : RecoveryRule::Normalized;
      else if (ends_with_period(wn[j0]) && un[i - 1] == ".")
        rule = RecoveryRule::Abbreviation;
      else if (utf8::starts_with_digit(wn[j0]))
        rule = RecoveryRule::FloatLike;
      else
        rule = RecoveryRule::Summed;
      out[j0] = {j0, bits, nsub, rule};
      continue;
    }
    if (m != 1) continue;

    bool tail_punct = true;
    for (std::size_t x = j0 + 1; x < j; ++x) tail_punct = tail_punct && utf8::all_punct(wn[x]);
    RecoveryRule rule;
    if (tail_punct)
      rule = utf8::all_punct(un[i0]) ? RecoveryRule::PunctSequence : RecoveryRule::Split7525;
    else if (utf8::starts_with_digit(un[i0]))
      rule = RecoveryRule::FloatLike;
    else
      continue;
    const double lead = kLeadShare * bits;
    double rest = bits - lead;
    const double share = rest / static_cast<double>(k - 1);
    out[j0] = {j0, lead, nsub, rule};
    for (std::size_t x = j0 + 1; x < j; ++x) {
      double b = x + 1 == j ? rest : share;
      rest -= share;
      out[x] = {x, b, nsub, rule};
    }
  }
  return out;
}

namespace {

SegmentScores skeleton(const TokenizedSegment& seg) {
  SegmentScores s;
  for (std::size_t r : surface_row_indices(seg)) s.words.push_back({r, std::nullopt, 0, RecoveryRule::Failed});
  return s;
}

std::vector<std::string> surface_tokens(const TokenizedSegment& seg) {
  std::vector<std::string> out;
  for (std::size_t r : surface_row_indices(seg))
    out.push_back(seg.word_rows[r].conllu.token.value_or(""));
  return out;
}

void finish(SegmentScores& s, const TokenizedSegment& seg, std::vector<SubwordScore> subs,
            std::size_t cap) {
  if (cap > 0 && subs.size() > cap) {
    s.truncated = true;
    s.warnings.push_back("truncated to " + std::to_string(cap) + " of " +
                         std::to_string(subs.size()) + " subwords");
    subs.resize(cap);
  }
  for (const auto& sw : subs) s.subword_bits.push_back(sw.bits());
  auto units = preaggregate(subs);
  auto words = surface_tokens(seg);
  auto ws = realign_cascade(units, words);
  const auto rows = surface_row_indices(seg);
  long failed = 0;
  for (std::size_t k = 0; k < ws.size(); ++k) {
    s.words[k] = ws[k];
    s.words[k].word_index = rows[k];
    if (ws[k].recovery_rule == RecoveryRule::Failed) ++failed;
  }
  if (failed > 0 && !s.truncated)
    s.warnings.push_back(std::to_string(failed) + " word(s) could not be realigned");
}

bool no_material(const TokenizedSegment& seg) {
  return seg.text.empty() || surface_row_indices(seg).empty();
}

}  // namespace

SegmentScores score_segment_bounded(const TokenizedSegment& seg, CausalLMAdapter& adapter,
                                    std::size_t cap) {
  SegmentScores s = skeleton(seg);
  if (no_material(seg)) {
    s.status = "empty";
    return s;
  }
  try {
    auto raw = adapter.score(seg.text);
    finish(s, seg, ingest(raw, adapter.info()), cap);
  } catch (const std::exception& e) {
    s = skeleton(seg);
    s.status = "adapter_error";
    s.warnings.push_back(e.what());
  }
  return s;
}

SegmentScores score_sliding_window(const TokenizedSegment& seg, CausalLMAdapter& adapter,
                                   std::size_t window) {
  SegmentScores s = skeleton(seg);
  if (no_material(seg)) {
    s.status = "empty";
    return s;
  }
  if (window < 2) throw std::invalid_argument("sliding window must span at least 2 subwords");
  try {
    auto raw = adapter.score(seg.text);
    std::vector<ModelToken> toks;
    for (const auto& r : raw) toks.push_back({r.surface, r.begins_word});
    for (std::size_t p = window; p < raw.size(); ++p) {
      std::span<const ModelToken> ctx(toks.data() + (p - (window - 1)), window - 1);
      raw[p].logprob = adapter.score_next(ctx, toks[p]);
    }
    finish(s, seg, ingest(raw, adapter.info()), 0);
  } catch (const std::exception& e) {
    s = skeleton(seg);
    s.status = "adapter_error";
    s.warnings.push_back(e.what());
  }
  return s;
}

SegmentScores score_mt(const TokenizedSegment& src, const TokenizedSegment& tgt,
                       MTAdapter& adapter, std::size_t cap) {
  SegmentScores s = skeleton(tgt);
  if (src.text.empty()) {
    s.status = "empty_source";
    return s;
  }
  if (no_material(tgt)) {
    s.status = "empty_target";
    return s;
  }
  try {
    auto raw = adapter.score(src.text, tgt.text);
    finish(s, tgt, ingest(raw, adapter.info()), cap);
  } catch (const std::exception& e) {
    s = skeleton(tgt);
    s.status = "adapter_error";
    s.warnings.push_back(e.what());
  }
  return s;
}

SegmentAggregates segment_aggregates(const SegmentScores& scores) {
  SegmentAggregates a;
  double sum = 0.0;
  long n = 0;
  for (const auto& w : scores.words)
    if (w.bits) {
      sum += *w.bits;
      ++n;
    }
  if (n > 0) a.token = sum / static_cast<double>(n);
  if (!scores.subword_bits.empty())
    a.subword = std::accumulate(scores.subword_bits.begin(), scores.subword_bits.end(), 0.0) /
                static_cast<double>(scores.subword_bits.size());
  return a;
}

void assign_bits(std::vector<WordRow>& rows, const SegmentScores& scores,
                 std::optional<double> WordRow::*column) {
  for (auto& r : rows) r.*column = std::nullopt;
  for (const auto& w : scores.words) {
    if (w.word_index >= rows.size())
      throw std::out_of_range("word index " + std::to_string(w.word_index) + " past segment end");
    rows[w.word_index].*column = w.bits;
  }
}

std::string detokenize(std::span<const ModelToken> tokens, const AdapterInfo& info) {
  std::string out;
  const auto& m = info.begin_marker;
  for (const auto& t : tokens) {
    std::string s = t.surface;
    bool begins = t.begins_word;
    if (!m.empty() && s.compare(0, m.size(), m) == 0) {
      s.erase(0, m.size());
      begins = true;
    }
    if (begins && !out.empty()) out += ' ';
    out += utf8::decode_byte_level(s);
  }
  return utf8::strip_ws(out);
}

PseudoBleu pseudo_bleu(std::string_view source, std::string_view target, MTAdapter& adapter) {
  PseudoBleu r;
  if (utf8::strip_ws(source).empty() || utf8::strip_ws(target).empty()) {
    r.warnings.push_back("empty source or target");
    return r;
  }
  auto toks = adapter.predict_argmax(source, target);
  std::string pred = detokenize(toks, adapter.info());
  if (pred.empty()) {
    r.warnings.push_back("empty prediction");
    return r;
  }
  r.score = sentence_bleu(pred, target);
  return r;
}

}  // namespace srp

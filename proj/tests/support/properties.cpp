#include "properties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "mock_models.hpp"
#include "srpkit/surprisal.hpp"

namespace srp::mock {

namespace {

std::vector<double> oracle_bits(const std::vector<ModelToken>& toks) {
  std::vector<double> out;
  for (std::size_t p = 0; p < toks.size(); ++p) {
    double lp = mock_logprob(std::span(toks.data(), p), toks[p]);
    out.push_back(-(lp / std::numbers::ln2));
  }
  return out;
}

MockSegment bounded_segment(std::mt19937_64& rng, std::size_t max_subwords) {
  for (;;) {
    std::size_t n = 1 + std::uniform_int_distribution<std::size_t>(0, 29)(rng);
    auto seg = random_segment(rng, n, 0.15);
    if (seg.tokens.size() <= max_subwords) return seg;
  }
}

std::size_t surface_count(const Piece& p) { return p.range ? 1 : p.words.size(); }

}  // namespace

ConservationReport check_conservation(long n_segments, std::uint64_t seed, std::size_t max_subwords) {
  std::mt19937_64 rng(seed);
  MockLM lm;
  MockParser parser;
  ConservationReport rep;
  for (long s = 0; s < n_segments; ++s) {
    auto ms = bounded_segment(rng, max_subwords);
    auto seg = annotate_mock(ms, lm, parser);
    auto scores = score_segment_bounded(seg, lm);
    auto bits = oracle_bits(ms.tokens);
    ++rep.segments;
    if (scores.truncated) ++rep.truncated;

    double total = 0.0, words = 0.0;
    for (double b : bits) total += b;
    for (const auto& w : scores.words) {
      ++rep.words;
      ++rep.rules[std::string(to_string(w.recovery_rule))];
      if (w.recovery_rule == RecoveryRule::Failed) {
        ++rep.failed_words;
        continue;
      }
      words += *w.bits;
    }
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(words - total));

    // Units split over several words: lead share and residual must be exact.
    std::size_t sub = 0, word = 0;
    for (const auto& p : ms.pieces) {
      const std::size_t nsub = p.lm.size(), nword = surface_count(p);
      std::size_t unit_begin = sub, unit_first_word = word;
      bool split = false;
      if (p.kind == PieceKind::DigitHyphen) split = true;
      if (p.kind == PieceKind::Punct && p.words.size() > 1) {
        const std::string& last = p.lm.back();
        bool attached = last.size() > 1 && std::isalpha(static_cast<unsigned char>(last.front()));
        bool run = !attached && nsub >= 1 && last.size() > 1 && nword - 1 == last.size() &&
                   !std::isalpha(static_cast<unsigned char>(last.front()));
        if (attached) split = true;
        if (run) {
          split = true;
          unit_begin = sub + nsub - 1;
          unit_first_word = word + 1;
        }
      }
      if (split) {
        ++rep.split_units;
        double unit = 0.0;
        for (std::size_t k = unit_begin; k < sub + nsub; ++k) unit += bits[k];
        const std::size_t k_words = word + nword - unit_first_word;
        const auto& lead = scores.words[unit_first_word].bits;
        double tail = 0.0;
        for (std::size_t x = unit_first_word + 1; x < word + nword; ++x)
          tail += scores.words[x].bits.value_or(NAN);
        bool exact = lead && *lead == kLeadShare * unit;
        if (k_words == 2)
          exact = exact && scores.words[unit_first_word + 1].bits == unit - kLeadShare * unit;
        else
          exact = exact && std::abs(tail - (unit - kLeadShare * unit)) <= 1e-12 * std::max(1.0, unit);
        if (!exact) ++rep.split_inexact;
      }
      sub += nsub;
      word += nword;
    }
  }
  return rep;
}

WindowReport check_window_equivalence(long n_segments, std::uint64_t seed, std::size_t window) {
  std::mt19937_64 rng(seed);
  MockLM lm;
  MockParser parser;
  WindowReport rep;
  for (long s = 0; s < n_segments; ++s) {
    auto ms = bounded_segment(rng, window);
    auto seg = annotate_mock(ms, lm, parser);
    auto a = score_segment_bounded(seg, lm);
    std::size_t before = lm.next_calls.size();
    auto b = score_sliding_window(seg, lm, window);
    rep.rescored_calls += static_cast<long>(lm.next_calls.size() - before);
    ++rep.segments;
    if (a.words.size() != b.words.size() || a.subword_bits != b.subword_bits) {
      ++rep.mismatches;
      continue;
    }
    for (std::size_t k = 0; k < a.words.size(); ++k) {
      ++rep.words;
      if (a.words[k].bits != b.words[k].bits || a.words[k].recovery_rule != b.words[k].recovery_rule)
        ++rep.mismatches;
    }
  }
  return rep;
}

ContextReport check_window_context(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MockLM lm;
  MockParser parser;
  std::vector<Piece> pieces;
  std::size_t n = 0;
  // Plain single-subword words: exactly 70 subwords.
  while (n < 70) {
    Piece p;
    p.text = "w" + std::to_string(n);
    p.words = {p.text};
    p.lm = {p.text};
    pieces.push_back(p);
    ++n;
  }
  auto ms = assemble(pieces, rng, 0.0);
  auto seg = annotate_mock(ms, lm, parser);
  auto scores = score_sliding_window(seg, lm, 64);
  ContextReport rep;
  if (scores.subword_bits.size() != 70) {
    rep.detail = "expected 70 subwords, got " + std::to_string(scores.subword_bits.size());
    return rep;
  }
  // Subword 70 (index 69) on subwords 7..69 (indices 6..68).
  std::span<const ModelToken> ctx(ms.tokens.data() + 6, 63);
  double expect = -(mock_logprob(ctx, ms.tokens[69]) / std::numbers::ln2);
  const auto* call = lm.next_calls.empty() ? nullptr : &lm.next_calls.back();
  bool same_ctx = call && call->context.size() == 63 &&
                  std::equal(call->context.begin(), call->context.end(), ctx.begin()) &&
                  call->next == ms.tokens[69];
  bool calls_ok = lm.next_calls.size() == 6;  // indices 64..69
  rep.ok = same_ctx && calls_ok && scores.subword_bits[69] == expect &&
           scores.words[69].bits == expect;
  rep.detail = "calls=" + std::to_string(lm.next_calls.size()) +
               " context_match=" + (same_ctx ? "yes" : "no");
  return rep;
}

}  // namespace srp::mock

#include "srpkit/annotate.hpp"

#include <stdexcept>

#include "srpkit/utf8.hpp"

namespace srp {

namespace {

struct Unit {
  ConlluToken surface;
  std::vector<ConlluToken> expansions;
  std::size_t sentence = 0;
  std::optional<CharSpan> span;
};

// Finds `form` in `text` at or after `cursor`, skipping leading spaces.
std::optional<CharSpan> locate(std::string_view text, std::string_view form, std::size_t& cursor,
                               std::vector<std::string>* warnings) {
  std::size_t at = cursor;
  while (at < text.size() && (text[at] == ' ' || text[at] == '\t' || text[at] == '\n')) ++at;
  if (!form.empty() && text.compare(at, form.size(), form) == 0) {
    cursor = at + form.size();
    return CharSpan{at, cursor};
  }
  std::size_t found = form.empty() ? std::string_view::npos : text.find(form, at);
  if (found != std::string_view::npos) {
    if (warnings) warnings->push_back("skipped text before '" + std::string(form) + "'");
    cursor = found + form.size();
    return CharSpan{found, cursor};
  }
  if (warnings) warnings->push_back("cannot locate '" + std::string(form) + "' in segment text");
  return std::nullopt;
}

}  // namespace

WordRow make_row(const SegmentContext& ctx, long word_number, std::optional<int> sub) {
  WordRow row;
  row.word_id = ctx.segment;
  if (word_number > 0) {
    row.word_id.word = pad_number(word_number, ctx.word_width);
    row.word_id.sub = sub;
  }
  row.doc_id = ctx.segment.doc_key();
  row.seg_id = ctx.segment.segment().str();
  row.lpair = ctx.segment.lpair();
  row.lang = ctx.lang;
  row.mode = std::string(to_string(ctx.segment.mode));
  row.ttype = ctx.segment.ttype;
  row.speaker_id = ctx.speaker_id;
  return row;
}

std::vector<std::size_t> find_fp_positions(std::string_view clean_text) {
  std::vector<std::size_t> out;
  auto toks = utf8::split_ws(clean_text);
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (is_filler_form(toks[i])) out.push_back(i);
  return out;
}

TokenizedSegment annotate_segment(std::string_view clean_text,
                                  const std::vector<std::size_t>& fp_positions,
                                  const SegmentContext& ctx, ParserAdapter& adapter) {
  TokenizedSegment seg;
  seg.parser_identity = adapter.identity();
  const auto tokens = utf8::split_ws(clean_text);
  seg.clean = utf8::join(tokens);

  std::vector<bool> is_fp(tokens.size(), false);
  for (std::size_t p : fp_positions) {
    if (p >= tokens.size())
      throw std::invalid_argument("fp position " + std::to_string(p) + " outside segment of " +
                                  std::to_string(tokens.size()) + " tokens");
    is_fp[p] = true;
  }

  auto finish_row = [&](WordRow& row) {
    if (ctx.with_raw_seg && !seg.clean.empty()) row.raw_seg = seg.clean;
  };

  if (tokens.empty()) {
    WordRow row = make_row(ctx, 0);
    seg.word_rows.push_back(std::move(row));
    return seg;
  }

  // Scored text and the offset each filler particle is anchored to.
  std::vector<std::size_t> fp_anchor(tokens.size(), 0);
  {
    std::vector<std::string> kept;
    std::vector<std::size_t> starts(tokens.size(), 0);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (is_fp[i]) continue;
      if (!kept.empty()) ++offset;
      starts[i] = offset;
      offset += tokens[i].size();
      kept.push_back(tokens[i]);
    }
    seg.text = utf8::join(kept);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!is_fp[i]) continue;
      std::size_t anchor = seg.text.size();
      for (std::size_t j = i + 1; j < tokens.size(); ++j)
        if (!is_fp[j]) {
          anchor = starts[j];
          break;
        }
      fp_anchor[i] = anchor;
    }
  }

  std::vector<Unit> units;
  if (!seg.text.empty()) {
    try {
      auto sentences = adapter.annotate(seg.text, ctx.lang);
      for (std::size_t s = 0; s < sentences.size(); ++s) {
        const auto& sent = sentences[s];
        if (auto why = validate_tree(sent); !why.empty())
          seg.warnings.push_back("sentence " + std::to_string(s + 1) + ": " + why);
        for (std::size_t k = 0; k < sent.size(); ++k) {
          const auto& tok = sent[k];
          Unit u;
          u.sentence = s;
          u.surface = tok;
          if (tok.is_range) {
            while (k + 1 < sent.size() && !sent[k + 1].is_range && sent[k + 1].first <= tok.last) {
              u.expansions.push_back(sent[++k]);
            }
          }
          units.push_back(std::move(u));
        }
      }
      std::size_t cursor = 0;
      for (auto& u : units) {
        const std::string form = u.surface.fields.token.value_or("");
        u.span = locate(seg.text, form, cursor, &seg.warnings);
      }
    } catch (const std::exception& e) {
      seg.parsed = false;
      seg.warnings.push_back(std::string("parser failed: ") + e.what());
      units.clear();
    }
  }

  long word_number = 0;
  auto push_fp = [&](std::size_t i) {
    WordRow row = make_row(ctx, ++word_number);
    row.conllu.token = tokens[i];
    row.conllu.pos = std::string(kFpTag);
    finish_row(row);
    seg.fp_positions.push_back(seg.word_rows.size());
    seg.word_rows.push_back(std::move(row));
  };

  if (!seg.parsed || seg.text.empty()) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (is_fp[i]) {
        push_fp(i);
        continue;
      }
      WordRow row = make_row(ctx, ++word_number);
      row.conllu.token = tokens[i];
      finish_row(row);
      seg.word_rows.push_back(std::move(row));
    }
    return seg;
  }

  std::size_t next_fp = 0;
  auto fps_before = [&](std::size_t limit) {
    while (next_fp < tokens.size()) {
      if (!is_fp[next_fp]) {
        ++next_fp;
        continue;
      }
      if (fp_anchor[next_fp] > limit) break;
      push_fp(next_fp++);
    }
  };

  std::size_t last_end = 0;
  std::optional<std::size_t> current_sentence;
  for (const auto& u : units) {
    std::size_t begin = u.span ? u.span->begin : last_end;
    fps_before(begin);
    if (u.span) last_end = u.span->end;
    if (current_sentence != u.sentence) {
      seg.sentence_boundaries.push_back(seg.word_rows.size());
      current_sentence = u.sentence;
    }
    WordRow row = make_row(ctx, ++word_number);
    if (u.surface.is_range) {
      row.conllu.token = u.surface.fields.token;
      row.conllu.misc = u.surface.fields.misc;
    } else {
      row.conllu = u.surface.fields;
    }
    finish_row(row);
    seg.word_rows.push_back(std::move(row));
    int sub = 0;
    for (const auto& e : u.expansions) {
      WordRow x = make_row(ctx, word_number, ++sub);
      x.conllu = e.fields;
      finish_row(x);
      seg.word_rows.push_back(std::move(x));
    }
  }
  fps_before(std::string::npos);
  return seg;
}

std::map<std::size_t, std::optional<CharSpan>> surface_map(const TokenizedSegment& seg,
                                                           std::vector<std::string>* warnings) {
  std::map<std::size_t, std::optional<CharSpan>> out;
  std::size_t cursor = 0;
  std::optional<CharSpan> parent;
  for (std::size_t i = 0; i < seg.word_rows.size(); ++i) {
    const auto& row = seg.word_rows[i];
    if (is_fp_row(row) || is_placeholder_row(row)) {
      out[i] = std::nullopt;
    } else if (is_expansion_row(row)) {
      out[i] = parent;
    } else {
      parent = locate(seg.text, row.conllu.token.value_or(""), cursor, warnings);
      out[i] = parent;
    }
  }
  return out;
}

std::vector<std::size_t> surface_row_indices(const TokenizedSegment& seg) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seg.word_rows.size(); ++i)
    if (is_surface_row(seg.word_rows[i])) out.push_back(i);
  return out;
}

}  // namespace srp

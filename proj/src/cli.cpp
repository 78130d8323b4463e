#include "srpkit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "srpkit/aligner.hpp"
#include "srpkit/annotate.hpp"
#include "srpkit/config.hpp"
#include "srpkit/corpus_builder.hpp"
#include "srpkit/fp_analysis.hpp"
#include "srpkit/gam.hpp"
#include "srpkit/standardize.hpp"
#include "srpkit/surprisal.hpp"
#include "srpkit/table_io.hpp"
#include "srpkit/transcript.hpp"
#include "srpkit/utf8.hpp"
#include "srpkit/wire.hpp"

namespace srp {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- plain TSV helpers for inputs that are not corpus tables -------------

struct PlainTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
  int require(const std::string& name, const std::string& path) const {
    int c = col(name);
    if (c < 0) throw TableError("'" + path + "' lacks column '" + name + "'");
    return c;
  }
  std::optional<std::string> cell(std::size_t r, int c) const {
    if (c < 0) return std::nullopt;
    const auto& v = rows[r][static_cast<std::size_t>(c)];
    if (v == kNullCell) return std::nullopt;
    return v;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TableError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string data = ss.str();
  return looks_gzipped(data) ? gzip_decompress(data) : data;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

PlainTable read_plain(const std::string& path) {
  PlainTable t;
  std::istringstream in(slurp(path));
  std::string line;
  long n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && (line.empty() || line[0] == '#')) continue;
    if (!have_header) {
      t.header = split_tabs(line);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != t.header.size())
      throw TableError("'" + path + "' line " + std::to_string(n) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(t.header.size()),
                       n);
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw TableError("'" + path + "' has no header row");
  return t;
}

void write_plain(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows,
                 const std::vector<std::string>& provenance, bool gzip) {
  std::string body;
  for (const auto& p : provenance) body += "# " + p + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of("\t\n") != std::string::npos)
        throw TableError("cell contains a tab or line break", -1, header[i]);
      if (i) body += '\t';
      body += cells[i];
    }
    body += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TableError("cannot open '" + path + "' for writing");
  out << (gzip ? gzip_compress(body) : body);
}

std::string str_cell(const std::optional<std::string>& v) {
  return v && !v->empty() ? *v : std::string(kNullCell);
}

std::optional<double> parse_real(const std::optional<std::string>& s, const std::string& what) {
  if (!s) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(*s, &used);
    if (used != s->size()) throw std::invalid_argument(*s);
    return v;
  } catch (const std::exception&) {
    throw TableError("'" + *s + "' is not a number", -1, what);
  }
}

// ---- run context -----------------------------------------------------------

struct Context {
  RunConfig cfg;
  std::string command;
  std::vector<std::string> inputs;
  std::string output;
  std::vector<std::string> adapter_ids;

  bool gzip() const { return cfg.get("gzip") == "true"; }
  unsigned workers() const {
    long w = cfg.get_int("workers");
    if (w > 0) return static_cast<unsigned>(w);
    return std::max(1u, std::thread::hardware_concurrency());
  }
  std::vector<std::string> provenance() const {
    std::vector<std::string> p = {"srpkit " + command, "config_hash " + cfg.hash()};
    for (const auto& a : adapter_ids) p.push_back("adapter " + a);
    for (const auto& [k, v] : cfg.values()) p.push_back("config " + k + "=" + v);
    return p;
  }
  WriteOptions write_options() const { return {provenance(), gzip()}; }
  std::string out_path(const std::string& name) const {
    if (output.empty()) throw UsageError("--output is required");
    fs::create_directories(output);
    return (fs::path(output) / (name + (gzip() ? ".tsv.gz" : ".tsv"))).string();
  }
  const std::string& input() const {
    if (inputs.empty()) throw UsageError("--input is required");
    return inputs.front();
  }
};

// ---- adapters ----------------------------------------------------------------

class NoParser : public ParserAdapter {
 public:
  std::string identity() const override { return "none"; }
  std::vector<ConlluSentence> annotate(std::string_view, std::string_view) override {
    throw AdapterError("no parser configured");
  }
};

std::string strip_scheme(const std::string& spec) {
  if (spec.rfind("replay:", 0) == 0) return spec.substr(7);
  return spec;
}

struct Adapters {
  std::shared_ptr<ParserAdapter> parser;
  std::map<std::string, std::shared_ptr<CausalLMAdapter>> lm;  // "<variant>.<LANG>"
  std::map<std::string, std::shared_ptr<MTAdapter>> mt;         // "<variant>.<LPAIR>"
  std::shared_ptr<EncoderAdapter> encoder;
};

std::optional<std::string> lookup(const RunConfig& cfg, const std::string& role,
                                  const std::string& qualifier) {
  if (auto v = cfg.get_opt(role + "." + qualifier)) return v;
  return cfg.get_opt(role);
}

Adapters open_adapters(Context& ctx, const std::set<std::string>& langs,
                       const std::set<std::string>& lpairs) {
  Adapters a;
  if (auto p = ctx.cfg.get_opt("parser")) {
    std::string spec = strip_scheme(*p);
    if (spec.rfind("cmd:", 0) == 0) throw ConfigError("the parser adapter must be a replay file");
    a.parser = ReplayParserAdapter::from_file(ctx.cfg.resolve_path(spec));
    ctx.adapter_ids.push_back("parser " + a.parser->identity());
  } else {
    a.parser = std::make_shared<NoParser>();
  }
  auto transport = [&](const std::string& spec) {
    if (spec.rfind("cmd:", 0) == 0) return open_transport(spec);
    return open_transport("replay:" + ctx.cfg.resolve_path(strip_scheme(spec)));
  };
  for (const char* variant : {"base", "ft"}) {
    for (const auto& lang : langs)
      if (auto spec = lookup(ctx.cfg, std::string("lm_") + variant, lang)) {
        auto lm = std::make_shared<WireLM>(transport(*spec));
        ctx.adapter_ids.push_back(std::string("lm_") + variant + "." + lang + " " +
                                  lm->info().name);
        a.lm[std::string(variant) + "." + lang] = lm;
      }
    for (const auto& lp : lpairs)
      if (auto spec = lookup(ctx.cfg, std::string("mt_") + variant, lp)) {
        auto mt = std::make_shared<WireMT>(transport(*spec));
        ctx.adapter_ids.push_back(std::string("mt_") + variant + "." + lp + " " + mt->info().name);
        a.mt[std::string(variant) + "." + lp] = mt;
      }
  }
  if (auto spec = ctx.cfg.get_opt("encoder")) {
    a.encoder = std::make_shared<WireEncoder>(transport(*spec));
    ctx.adapter_ids.push_back("encoder " + a.encoder->info().name);
  }
  return a;
}

template <class Fn>
void for_each_parallel(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next++;
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---- normalize -------------------------------------------------------------

int cmd_normalize(Context& ctx, std::ostream& out) {
  const auto& path = ctx.input();
  auto t = read_plain(path);
  int c_id = t.require("seg_id", path);
  int c_raw = t.require("raw", path);
  std::vector<std::vector<std::string>> rows;
  long warnings = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto raw = t.cell(r, c_raw).value_or("");
    auto n = normalize_segment(raw);
    std::vector<std::string> fp;
    for (auto p : n.fp_positions) fp.push_back(std::to_string(p));
    std::string warn;
    for (const auto& w : n.warnings) warn += (warn.empty() ? "" : "; ") + w;
    warnings += static_cast<long>(n.warnings.size());
    rows.push_back({t.rows[r][static_cast<std::size_t>(c_id)], str_cell(n.clean),
                    fp.empty() ? std::string(kNullCell) : utf8::join(fp, kListSeparator),
                    std::to_string(n.counts.disfluencies), std::to_string(n.counts.fillers),
                    std::to_string(n.counts.fillers_plus_3), str_cell(warn)});
  }
  auto dest = ctx.out_path("normalized");
  write_plain(dest,
              {"seg_id", "clean", "fp_positions", "disfluencies", "fillers", "fillers+3",
               "warnings"},
              rows, ctx.provenance(), ctx.gzip());
  out << "normalized " << rows.size() << " segments (" << warnings << " warnings) -> " << dest
      << "\n";
  return 0;
}

// ---- annotate ----------------------------------------------------------------

struct SideInput {
  ItemId id;
  std::string lang;
  std::string text;
  OptString speaker;
  std::optional<SegmentDisfluencyCounts> counts;
  OptReal delivery_rate, delivery_wpm, speech_timing_sec;
  OptString delivery_type;
};

struct PairInput {
  SideInput src, tgt;
};

struct PairOutput {
  std::vector<WordRow> rows;
  SegmentRecord src_long, tgt_long;
  SegmentPairRecord wide;
  std::vector<std::string> warnings;
};

SideInput read_side(const PlainTable& t, std::size_t r, const std::string& side,
                    const std::string& path) {
  SideInput s;
  s.id = parse_item_id(t.cell(r, t.require(side + "_seg_id", path)).value_or(""));
  s.lang = side == "src" ? s.id.src_lang : s.id.tgt_lang;
  auto raw = t.cell(r, t.col(side + "_raw"));
  if (raw) {
    auto n = normalize_segment(*raw);
    s.text = n.clean;
    s.counts = n.counts;
  } else {
    s.text = t.cell(r, t.require(side + "_text", path)).value_or("");
  }
  s.speaker = t.cell(r, t.col(side + "_speaker_id"));
  s.delivery_rate = parse_real(t.cell(r, t.col(side + "_delivery_rate")), "delivery_rate");
  s.delivery_wpm = parse_real(t.cell(r, t.col(side + "_delivery_wpm")), "delivery_wpm");
  s.speech_timing_sec =
      parse_real(t.cell(r, t.col(side + "_speech_timing_sec")), "speech_timing_sec");
  s.delivery_type = t.cell(r, t.col(side + "_source_text_delivery_type"));
  return s;
}

SegmentRecord long_record(const SideInput& in, const TokenizedSegment& seg,
                          const std::optional<SegmentScores>& base,
                          const std::optional<SegmentScores>& ft) {
  SegmentRecord rec;
  rec.doc_id = in.id.doc_key();
  rec.seg_id = in.id.segment().str();
  rec.lpair = in.id.lpair();
  rec.lang = in.lang;
  rec.mode = std::string(to_string(in.id.mode));
  rec.ttype = in.id.ttype;
  rec.speaker_id = in.speaker;
  rec.delivery_rate = in.delivery_rate;
  rec.delivery_wpm = in.delivery_wpm;
  rec.speech_timing_sec = in.speech_timing_sec;
  rec.source_text_delivery_type = in.delivery_type;
  if (base) {
    auto a = segment_aggregates(*base);
    rec.base_gpt_AvS = a.token;
    rec.base_gpt_AvS_subw = a.subword;
  }
  if (ft) {
    auto a = segment_aggregates(*ft);
    rec.ft_gpt_AvS = a.token;
    rec.ft_gpt_AvS_subw = a.subword;
  }
  if (in.counts) {
    rec.disfluencies = in.counts->disfluencies;
    rec.fillers = in.counts->fillers;
    rec.fillers_plus_3 = in.counts->fillers_plus_3;
  }
  if (!seg.clean.empty()) rec.raw_seg = seg.clean;
  std::vector<std::string> toks;
  for (const auto& r : seg.word_rows) {
    if (is_placeholder_row(r) || is_expansion_row(r)) continue;
    toks.push_back(r.conllu.token.value_or(""));
    if (!is_fp_row(r)) ++rec.wc_tok;
  }
  if (!toks.empty()) rec.tokens = utf8::join(toks);
  return rec;
}

PairOutput annotate_pair(const PairInput& in, Adapters& ad, const RunConfig& cfg) {
  PairOutput out;
  const bool window = cfg.get("scoring") == "window";
  const auto cap = static_cast<std::size_t>(cfg.get_int("cap"));
  const auto win = static_cast<std::size_t>(cfg.get_int("window"));
  const int word_width = static_cast<int>(cfg.get_int("width.word"));

  auto prepare = [&](const SideInput& s) {
    std::string text = standardize(s.text, s.lang);
    std::vector<std::size_t> fps;
    if (s.id.mode == Mode::Spoken) fps = find_fp_positions(text);
    SegmentContext c{s.id.segment(), s.lang, s.speaker, word_width, true};
    auto seg = annotate_segment(text, fps, c, *ad.parser);
    for (const auto& w : seg.warnings) out.warnings.push_back(s.id.segment().str() + ": " + w);
    return seg;
  };
  TokenizedSegment src = prepare(in.src), tgt = prepare(in.tgt);

  std::map<std::string, SegmentScores> lm_scores;  // "<side>.<variant>"
  for (const char* variant : {"base", "ft"}) {
    for (auto* side : {&src, &tgt}) {
      const auto& lang = side == &src ? in.src.lang : in.tgt.lang;
      auto it = ad.lm.find(std::string(variant) + "." + lang);
      if (it == ad.lm.end()) continue;
      auto s = window ? score_sliding_window(*side, *it->second, win)
                      : score_segment_bounded(*side, *it->second, cap);
      auto col = std::string(variant) == "base" ? &WordRow::srp_base_gpt2 : &WordRow::srp_ft_gpt2;
      assign_bits(side->word_rows, s, col);
      for (const auto& w : s.warnings)
        out.warnings.push_back(side->word_rows.front().seg_id + ": " + w);
      lm_scores[std::string(side == &src ? "src." : "tgt.") + variant] = std::move(s);
    }
  }

  SegmentPairRecord& wide = out.wide;
  wide.src_doc_id = in.src.id.doc_key();
  wide.src_seg_id = in.src.id.segment().str();
  wide.tgt_doc_id = in.tgt.id.doc_key();
  wide.tgt_seg_id = in.tgt.id.segment().str();
  wide.lpair = in.tgt.id.lpair();
  wide.mode = std::string(to_string(in.tgt.id.mode));
  if (!src.clean.empty()) wide.src_raw_seg = src.clean;
  if (!tgt.clean.empty()) wide.tgt_raw_seg = tgt.clean;
  for (const char* variant : {"base", "ft"}) {
    auto it = ad.mt.find(std::string(variant) + "." + wide.lpair);
    if (it == ad.mt.end()) continue;
    auto s = score_mt(src, tgt, *it->second, cap);
    bool base = std::string(variant) == "base";
    assign_bits(tgt.word_rows, s, base ? &WordRow::srp_base_mt : &WordRow::srp_ft_mt);
    for (const auto& w : s.warnings) out.warnings.push_back(wide.tgt_seg_id + ": " + w);
    auto agg = segment_aggregates(s);
    (base ? wide.base_mt_AvS : wide.ft_mt_AvS) = agg.token;
    (base ? wide.base_mt_AvS_subw : wide.ft_mt_AvS_subw) = agg.subword;
    if (!src.text.empty() && !tgt.text.empty()) {
      try {
        auto b = pseudo_bleu(src.text, tgt.text, *it->second);
        (base ? wide.base_bleu : wide.ft_bleu) = b.score;
        for (const auto& w : b.warnings) out.warnings.push_back(wide.tgt_seg_id + ": " + w);
      } catch (const std::exception& e) {
        out.warnings.push_back(wide.tgt_seg_id + ": pseudo-BLEU failed: " + e.what());
      }
    }
  }

  if (ad.encoder) {
    auto mode = cfg.get("align.mode") == "mean" ? ThresholdMode::Mean : ThresholdMode::BothDirections;
    auto r = align_segments(src, tgt, *ad.encoder, cfg.get_real("align.threshold"), mode);
    for (const auto& w : r.warnings) out.warnings.push_back(wide.src_seg_id + ": " + w);
  }

  auto opt_scores = [&](const std::string& key) -> std::optional<SegmentScores> {
    auto it = lm_scores.find(key);
    if (it == lm_scores.end()) return std::nullopt;
    return it->second;
  };
  out.src_long = long_record(in.src, src, opt_scores("src.base"), opt_scores("src.ft"));
  out.tgt_long = long_record(in.tgt, tgt, opt_scores("tgt.base"), opt_scores("tgt.ft"));
  out.rows = std::move(src.word_rows);
  out.rows.insert(out.rows.end(), std::make_move_iterator(tgt.word_rows.begin()),
                  std::make_move_iterator(tgt.word_rows.end()));
  return out;
}

int cmd_annotate(Context& ctx, std::ostream& out) {
  const auto& path = ctx.input();
  auto t = read_plain(path);
  std::vector<PairInput> pairs;
  std::set<std::string> langs, lpairs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    PairInput p{read_side(t, r, "src", path), read_side(t, r, "tgt", path)};
    if (auto d = ctx.cfg.get_opt("direction"); d && p.tgt.id.lpair() != *d) continue;
    if (auto m = ctx.cfg.get_opt("mode"); m && std::string(to_string(p.tgt.id.mode)) != *m) continue;
    langs.insert(p.src.lang);
    langs.insert(p.tgt.lang);
    lpairs.insert(p.tgt.id.lpair());
    pairs.push_back(std::move(p));
  }
  Adapters ad = open_adapters(ctx, langs, lpairs);

  // Shard by document, keep input order on output.
  std::vector<std::string> doc_order;
  std::map<std::string, std::vector<std::size_t>> by_doc;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto key = pairs[i].src.id.doc_key();
    if (!by_doc.count(key)) doc_order.push_back(key);
    by_doc[key].push_back(i);
  }
  std::vector<PairOutput> results(pairs.size());
  for_each_parallel(doc_order.size(), ctx.workers(), [&](std::size_t d) {
    for (std::size_t i : by_doc[doc_order[d]]) results[i] = annotate_pair(pairs[i], ad, ctx.cfg);
  });

  std::vector<WordRow> vertical;
  std::vector<SegmentRecord> long_rows;
  std::vector<SegmentPairRecord> wide_rows;
  long warnings = 0;
  for (const auto& d : doc_order)
    for (std::size_t i : by_doc[d]) {
      auto& r = results[i];
      vertical.insert(vertical.end(), r.rows.begin(), r.rows.end());
      long_rows.push_back(r.src_long);
      long_rows.push_back(r.tgt_long);
      wide_rows.push_back(r.wide);
      for (const auto& w : r.warnings) {
        ++warnings;
        if (ctx.cfg.get_or("verbose", "false") == "true") std::cerr << "warning: " << w << "\n";
      }
    }
  auto opt = ctx.write_options();
  write_table_file(ctx.out_path("vertical"), vertical, opt);
  write_table_file(ctx.out_path("long"), long_rows, opt);
  write_table_file(ctx.out_path("wide"), wide_rows, opt);
  out << "annotated " << pairs.size() << " segment pairs, " << vertical.size() << " word rows ("
      << warnings << " warnings) -> " << ctx.output << "\n";
  return 0;
}

// ---- aggregate -------------------------------------------------------------

std::vector<WordRow> read_all_vertical(const Context& ctx) {
  if (ctx.inputs.empty()) throw UsageError("--input is required");
  std::vector<WordRow> rows;
  for (const auto& p : ctx.inputs) {
    auto t = std::get<std::vector<WordRow>>(read_table_file(p, TableFormat::Vertical));
    rows.insert(rows.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  return rows;
}

std::optional<double> token_mean(const std::vector<const WordRow*>& rows,
                                 std::optional<double> WordRow::*col) {
  double s = 0.0;
  long n = 0;
  for (const auto* r : rows)
    if (is_surface_row(*r) && r->*col) {
      s += *(r->*col);
      ++n;
    }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

int cmd_aggregate(Context& ctx, std::ostream& out) {
  auto rows = read_all_vertical(ctx);
  std::vector<std::string> order;
  std::map<std::string, std::vector<const WordRow*>> segs;
  for (const auto& r : rows) {
    if (!segs.count(r.seg_id)) order.push_back(r.seg_id);
    segs[r.seg_id].push_back(&r);
  }
  std::vector<SegmentRecord> long_rows;
  // pair key -> (source segment, target segment)
  std::map<std::string, std::pair<std::string, std::string>> pairs;
  std::vector<std::string> pair_order;
  for (const auto& sid : order) {
    const auto& rs = segs[sid];
    const WordRow& f = *rs.front();
    SegmentRecord rec;
    rec.doc_id = f.doc_id;
    rec.seg_id = f.seg_id;
    rec.lpair = f.lpair;
    rec.lang = f.lang;
    rec.mode = f.mode;
    rec.ttype = f.ttype;
    rec.speaker_id = f.speaker_id;
    rec.base_gpt_AvS = token_mean(rs, &WordRow::srp_base_gpt2);
    rec.ft_gpt_AvS = token_mean(rs, &WordRow::srp_ft_gpt2);
    rec.raw_seg = f.raw_seg;
    std::vector<std::string> toks;
    long fillers = 0;
    for (const auto* r : rs) {
      if (is_placeholder_row(*r) || is_expansion_row(*r)) continue;
      toks.push_back(r->conllu.token.value_or(""));
      if (is_fp_row(*r))
        ++fillers;
      else
        ++rec.wc_tok;
    }
    if (f.mode == "SP") rec.fillers = fillers;
    if (!toks.empty()) rec.tokens = utf8::join(toks);
    long_rows.push_back(std::move(rec));

    auto id = parse_item_id(sid);
    std::string key = f.mode + "_" + id.src_lang + "_" + id.tgt_lang + "_" + id.doc + "-" + id.seg;
    if (!pairs.count(key)) pair_order.push_back(key);
    (f.lang == id.src_lang ? pairs[key].first : pairs[key].second) = sid;
  }
  std::vector<SegmentPairRecord> wide_rows;
  for (const auto& key : pair_order) {
    const auto& [s, t] = pairs[key];
    if (s.empty() || t.empty()) continue;
    const auto& srows = segs[s];
    const auto& trows = segs[t];
    SegmentPairRecord w;
    w.src_doc_id = srows.front()->doc_id;
    w.src_seg_id = s;
    w.tgt_doc_id = trows.front()->doc_id;
    w.tgt_seg_id = t;
    w.lpair = trows.front()->lpair;
    w.mode = trows.front()->mode;
    w.src_raw_seg = srows.front()->raw_seg;
    w.tgt_raw_seg = trows.front()->raw_seg;
    w.base_mt_AvS = token_mean(trows, &WordRow::srp_base_mt);
    w.ft_mt_AvS = token_mean(trows, &WordRow::srp_ft_mt);
    wide_rows.push_back(std::move(w));
  }
  auto opt = ctx.write_options();
  write_table_file(ctx.out_path("long"), long_rows, opt);
  write_table_file(ctx.out_path("wide"), wide_rows, opt);
  out << "aggregated " << long_rows.size() << " segments, " << wide_rows.size()
      << " segment pairs -> " << ctx.output << "\n";
  return 0;
}

// ---- build -------------------------------------------------------------------

struct DocMeta {
  std::string lpair, speaker, date;
  std::optional<double> score;
  long segments = 0;
};

std::map<std::string, DocMeta> read_doc_meta(const std::string& path) {
  auto t = read_plain(path);
  int c_id = t.require("doc_id", path);
  int c_lp = t.col("lpair"), c_sp = t.col("speaker"), c_date = t.col("date"),
      c_score = t.col("alignment_score"), c_segs = t.col("segments");
  std::map<std::string, DocMeta> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    DocMeta m;
    m.lpair = t.cell(r, c_lp).value_or("");
    m.speaker = t.cell(r, c_sp).value_or("");
    m.date = t.cell(r, c_date).value_or("");
    m.score = parse_real(t.cell(r, c_score), "alignment_score");
    if (auto s = parse_real(t.cell(r, c_segs), "segments")) m.segments = static_cast<long>(*s);
    out[t.rows[r][static_cast<std::size_t>(c_id)]] = m;
  }
  return out;
}

int cmd_build(Context& ctx, std::ostream& out) {
  auto wide = std::get<std::vector<SegmentPairRecord>>(
      read_table_file(ctx.input(), TableFormat::Wide));
  auto meta_path = ctx.cfg.get_opt("doc_meta");
  auto spoken_path = ctx.cfg.get_opt("spoken_meta");
  if (!meta_path || !spoken_path)
    throw ConfigError("build needs doc_meta and spoken_meta in the configuration");
  auto meta = read_doc_meta(ctx.cfg.resolve_path(*meta_path));
  auto spoken_meta = read_doc_meta(ctx.cfg.resolve_path(*spoken_path));

  std::vector<std::string> order;
  std::map<std::string, DocumentPair> docs;
  std::map<std::string, std::vector<const SegmentPairRecord*>> rows_by_doc;
  for (const auto& w : wide) {
    auto& d = docs[w.src_doc_id];
    if (d.doc_id.empty()) {
      order.push_back(w.src_doc_id);
      d.doc_id = w.src_doc_id;
      d.lpair = w.lpair;
      d.mode = w.mode;
      if (auto it = meta.find(w.src_doc_id); it != meta.end()) {
        d.speaker = it->second.speaker;
        d.date = it->second.date;
        d.alignment_score = it->second.score;
      }
    }
    d.segments.push_back({w.src_seg_id, w.src_raw_seg.value_or(""), w.tgt_raw_seg.value_or("")});
    rows_by_doc[w.src_doc_id].push_back(&w);
  }

  std::map<std::string, std::string> fate;
  std::vector<DocumentPair> stage;
  long removed_segments = 0;
  for (const auto& id : order) {
    auto r = filter_empty_segments(docs[id], docs[id].mode);
    removed_segments += static_cast<long>(r.report.removed_segments.size());
    if (r.kept)
      stage.push_back(std::move(*r.kept));
    else
      fate[id] = "dropped_empty";
  }
  std::map<std::string, double> cutoffs;
  for (const auto& d : stage) cutoffs[d.lpair] = score_cutoff(ctx.cfg, d.lpair);
  auto scored = filter_by_score(stage, cutoffs);
  std::set<std::string> kept_ids;
  for (const auto& d : scored.kept) kept_ids.insert(d.doc_id);
  for (const auto& d : stage)
    if (!kept_ids.count(d.doc_id)) fate[d.doc_id] = "dropped_score";

  std::vector<DocumentPair> spoken;
  std::map<std::string, long> spoken_sizes;
  for (const auto& [id, m] : spoken_meta) {
    DocumentPair d;
    d.doc_id = id;
    d.lpair = m.lpair;
    d.speaker = m.speaker;
    d.date = m.date;
    d.mode = "SP";
    spoken.push_back(d);
    spoken_sizes[m.lpair] += m.segments;
  }
  auto overlap = remove_overlap(scored.kept, spoken);
  for (const auto& id : overlap.removed) fate[id] = "overlap";

  SplitConfig sc;
  sc.seed = static_cast<std::uint64_t>(ctx.cfg.get_int("seed"));
  sc.test_docs = static_cast<std::size_t>(ctx.cfg.get_int("split.test_docs"));
  sc.min_segments = static_cast<std::size_t>(ctx.cfg.get_int("split.min_segments"));
  auto split = make_splits(overlap.kept, spoken_sizes, sc);
  for (const auto& d : split.test) fate[d.doc_id] = "test";
  for (const auto& d : split.train) fate[d.doc_id] = "train";
  for (const auto& id : split.subsampled_out) fate[id] = "subsampled";

  std::map<std::string, std::set<std::string>> kept_segs;
  for (const auto* list : {&split.test, &split.train})
    for (const auto& d : *list)
      for (const auto& s : d.segments) kept_segs[d.doc_id].insert(s.seg_id);

  auto prov = ctx.provenance();
  prov.push_back("split " + split.objective);
  std::vector<std::vector<std::string>> split_rows;
  for (const auto& id : order)
    split_rows.push_back({id, docs[id].lpair, fate[id],
                          std::to_string(kept_segs.count(id) ? kept_segs[id].size() : 0)});
  write_plain(ctx.out_path("splits"), {"doc_id", "lpair", "split", "segments"}, split_rows, prov,
              ctx.gzip());
  for (const char* which : {"test", "train"}) {
    std::vector<SegmentPairRecord> sel;
    for (const auto& id : order)
      if (fate[id] == which)
        for (const auto* w : rows_by_doc[id])
          if (kept_segs[id].count(w->src_seg_id)) sel.push_back(*w);
    write_table_file(ctx.out_path(std::string("wide_") + which), sel, {prov, ctx.gzip()});
  }
  std::vector<std::vector<std::string>> report;
  for (const auto& w : scored.warnings) report.push_back({"warning", w});
  report.push_back({"segments_removed_empty", std::to_string(removed_segments)});
  for (const auto& [dir, n] : split.test_segments)
    report.push_back({"test_segments " + dir, std::to_string(n)});
  for (const auto& [dir, n] : split.train_segments)
    report.push_back({"train_segments " + dir, std::to_string(n)});
  write_plain(ctx.out_path("build_report"), {"item", "value"}, report, prov, ctx.gzip());
  out << "built splits: " << split.test.size() << " test and " << split.train.size()
      << " train documents -> " << ctx.output << "\n";
  return 0;
}

// ---- stats -------------------------------------------------------------------

int cmd_stats(Context& ctx, std::ostream& out) {
  auto rows = read_all_vertical(ctx);
  auto groups = describe(rows);
  std::vector<std::vector<std::string>> table;
  for (const auto& g : groups) {
    std::vector<WordRow> side;
    for (const auto& r : rows)
      if (r.mode == g.mode && r.lpair == g.lpair && r.ttype == g.ttype) side.push_back(r);
    std::string tokens = std::string(kNullCell), unal = tokens, multi = tokens;
    try {
      auto a = alignment_stats(side);
      tokens = std::to_string(a.src_tokens);
      unal = format_real(a.pct_unaligned);
      multi = format_real(a.pct_multi);
    } catch (const std::invalid_argument&) {
    }
    table.push_back({g.mode, g.lpair, g.ttype, std::to_string(g.docs), std::to_string(g.segs),
                     std::to_string(g.words), format_real(g.pct_empty), std::to_string(g.fps),
                     format_real(g.pct_segs_with_fp), format_real(g.len_mean),
                     format_real(g.len_sd), std::to_string(g.len_min), std::to_string(g.len_max),
                     format_real(g.pct_multi_sentence), tokens, unal, multi});
  }
  write_plain(ctx.out_path("stats"),
              {"mode", "lpair", "ttype", "docs", "segs", "words", "pct_empty", "fp",
               "pct_segs_w_fp", "len_mean", "len_sd", "len_min", "len_max",
               "pct_multi_sentence", "tokens", "pct_unaligned", "pct_multi_aligned"},
              table, ctx.provenance(), ctx.gzip());
  out << "described " << groups.size() << " groups -> " << ctx.output << "\n";
  return 0;
}

// ---- fp-analyze ----------------------------------------------------------

int cmd_fp_analyze(Context& ctx, std::ostream& out) {
  auto rows = read_all_vertical(ctx);
  auto dir = ctx.cfg.get_opt("direction");
  if (!dir) throw UsageError("fp-analyze needs --direction");
  std::vector<std::string> random;
  for (auto& f : utf8::split_ws(
           [&] {
             auto s = ctx.cfg.get("random_effects");
             std::replace(s.begin(), s.end(), ',', ' ');
             return s;
           }()))
    random.push_back(f);

  std::string which = ctx.cfg.get("variant");
  std::vector<Variant> variants;
  if (which == "both")
    variants = {Variant::Base, Variant::FineTuned};
  else
    variants = {parse_variant(which)};

  std::vector<std::vector<std::string>> coef_rows, summary_rows;
  std::vector<FitResult> fits;
  for (auto v : variants) {
    auto ds = build_fp_dataset(rows, *dir, v);
    auto fit = fit_logistic(make_problem(ds, random));
    long positives = 0;
    for (const auto& o : ds.obs) positives += o.outcome;
    for (std::size_t c = 0; c < fit.names.size(); ++c) {
      double b = fit.coef(static_cast<Eigen::Index>(c)), se = fit.se(static_cast<Eigen::Index>(c));
      coef_rows.push_back({std::string(to_string(v)), fit.names[c], format_real(b),
                           format_real(se), format_real(b / se)});
    }
    std::string sds;
    for (std::size_t g = 0; g < fit.group_sd.size(); ++g)
      sds += (g ? ", " : "") + fit.group_names[g] + "=" + format_real(fit.group_sd[g]);
    summary_rows.push_back({std::string(to_string(v)), *dir, std::to_string(fit.n_obs),
                            std::to_string(positives), format_real(fit.loglik),
                            format_real(fit.aic), format_real(fit.concordance), str_cell(sds)});
    fits.push_back(std::move(fit));
  }
  auto prov = ctx.provenance();
  write_plain(ctx.out_path("fp_coefficients"), {"variant", "term", "coef", "se", "z"}, coef_rows,
              prov, ctx.gzip());
  if (fits.size() == 2) {
    auto cmp = compare_models(fits[0], fits[1]);
    std::string pref = cmp.preferred == "a" ? "base" : cmp.preferred == "b" ? "ft" : "tie";
    summary_rows.push_back({"base-ft", *dir, std::to_string(fits[0].n_obs), kNullCell.data(),
                            kNullCell.data(), format_real(cmp.delta_aic), format_real(cmp.delta_c),
                            "preferred=" + pref});
  }
  write_plain(ctx.out_path("fp_summary"),
              {"variant", "direction", "n_obs", "positives", "loglik", "aic", "C", "group_sd"},
              summary_rows, prov, ctx.gzip());
  out << "fitted " << fits.size() << " model(s) for " << *dir << " -> " << ctx.output << "\n";
  return 0;
}

// ---- gam -----------------------------------------------------------------------

int cmd_gam(Context& ctx, std::ostream& out) {
  auto rows = read_all_vertical(ctx);
  auto v = parse_variant(ctx.cfg.get("variant"));
  auto lm = v == Variant::Base ? &WordRow::srp_base_gpt2 : &WordRow::srp_ft_gpt2;
  auto mt = v == Variant::Base ? &WordRow::srp_base_mt : &WordRow::srp_ft_mt;
  auto dir = ctx.cfg.get_opt("direction");
  bool lm_on_mt = ctx.cfg.get("gam.orientation") == "lm_on_mt";
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (dir && r.lpair != *dir) continue;
    if (!is_surface_row(r) || !(r.*lm) || !(r.*mt)) continue;
    x.push_back(lm_on_mt ? *(r.*mt) : *(r.*lm));
    y.push_back(lm_on_mt ? *(r.*lm) : *(r.*mt));
  }
  auto fit = fit_gam(x, y, static_cast<int>(ctx.cfg.get_int("gam.splines")));
  std::vector<std::vector<std::string>> curve;
  for (const auto& p : gam_curve(fit))
    curve.push_back({format_real(p.x), format_real(p.yhat), format_real(p.lo), format_real(p.hi)});
  auto prov = ctx.provenance();
  write_plain(ctx.out_path("gam_curve"), {"x", "yhat", "ci_lo", "ci_hi"}, curve, prov, ctx.gzip());
  std::vector<std::string> knots;
  for (double k : fit.knots) knots.push_back(format_real(k));
  write_plain(ctx.out_path("gam_summary"),
              {"n", "n_splines", "lambda", "gcv", "edf", "pseudo_r2", "knots"},
              {{std::to_string(x.size()), std::to_string(fit.n_splines), format_real(fit.lambda),
                format_real(fit.gcv), format_real(fit.edf), format_real(fit.pseudo_r2),
                utf8::join(knots, kListSeparator)}},
              prov, ctx.gzip());
  out << "GAM on " << x.size() << " words: pseudo R2 " << format_real(fit.pseudo_r2)
      << ", lambda " << format_real(fit.lambda) << " -> " << ctx.output << "\n";
  return 0;
}

void load_replay_bundle(RunConfig& cfg, const std::string& path) {
  RunConfig bundle;
  bundle.load_file(path);
  for (const auto& [k, v] : bundle.values()) {
    if (bundle.origin(k) == "default") continue;
    cfg.set(k, "replay:" + bundle.resolve_path(v), "replay");
  }
}

void report_error(std::ostream& err, const std::string& command, const std::string& type,
                  const std::string& message, const nlohmann::json& extra = {}) {
  nlohmann::json j = {{"error", {{"type", type}, {"message", message}, {"command", command}}}};
  if (!extra.is_null())
    for (auto& [k, v] : extra.items()) j["error"][k] = v;
  err << j.dump() << "\n";
}

}  // namespace

int run_cli(int argc, char** argv, char** envp, std::ostream& out, std::ostream& err) {
  CLI::App app{"srpkit: surprisal, alignment and corpus tooling for parallel corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx;
  std::string config_path, direction, mode, variant, replay;
  std::optional<long> seed, workers;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--direction", direction, "language pair, e.g. DE-EN");
  app.add_option("--mode", mode, "SP or WR");
  app.add_option("--variant", variant, "base, ft (fp-analyze also accepts both)");
  app.add_option("--replay", replay, "replay bundle: role = replay file lines");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "worker threads (0: all processors)");
  app.add_option("-i,--input", ctx.inputs, "input file(s)");
  app.add_option("-o,--output", ctx.output, "output directory");
  app.add_option("--set", sets, "extra key=value override");

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(Context&, std::ostream&);
  };
  const Sub subs[] = {
      {"normalize", "annotated transcripts -> clean text and disfluency counts", cmd_normalize},
      {"annotate", "parse, score and align segment pairs -> vertical/long/wide", cmd_annotate},
      {"aggregate", "vertical -> long and wide", cmd_aggregate},
      {"build", "filters, overlap removal and train/test splits", cmd_build},
      {"stats", "corpus and alignment statistics", cmd_stats},
      {"fp-analyze", "filler-particle mixed-effects logistic models", cmd_fp_analyze},
      {"gam", "penalised spline of LM on MT surprisal", cmd_gam},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "", "usage", e.what());
    err << app.help();
    return 2;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;
  ctx.command = chosen->name;

  try {
    if (!config_path.empty()) ctx.cfg.load_file(config_path);
    ctx.cfg.load_env(envp);
    if (!replay.empty()) load_replay_bundle(ctx.cfg, replay);
    if (!direction.empty()) ctx.cfg.set("direction", direction);
    if (!mode.empty()) ctx.cfg.set("mode", mode);
    if (!variant.empty()) ctx.cfg.set("variant", variant);
    if (seed) ctx.cfg.set("seed", std::to_string(*seed));
    if (workers) ctx.cfg.set("workers", std::to_string(*workers));
    for (const auto& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      ctx.cfg.set(utf8::strip_ws(kv.substr(0, eq)), utf8::strip_ws(kv.substr(eq + 1)));
    }
    if (ctx.inputs.empty())
      if (auto in = ctx.cfg.get_opt("input")) ctx.inputs.push_back(ctx.cfg.resolve_path(*in));
    if (ctx.output.empty()) ctx.output = ctx.cfg.get_or("output", "");
    ctx.cfg.validate();
    return chosen->fn(ctx, out);
  } catch (const UsageError& e) {
    report_error(err, ctx.command, "usage", e.what());
    return 2;
  } catch (const TableError& e) {
    report_error(err, ctx.command, "table", e.what(), {{"row", e.row()}, {"column", e.column()}});
  } catch (const ItemIdError& e) {
    report_error(err, ctx.command, "item_id", e.what(), {{"component", e.component()}});
  } catch (const SeparationError& e) {
    report_error(err, ctx.command, "separation", e.what(), {{"predictor", e.predictor()}});
  } catch (const ConvergenceError& e) {
    report_error(err, ctx.command, "convergence", e.what(), {{"trace", e.trace()}});
  } catch (const ConfigError& e) {
    report_error(err, ctx.command, "config", e.what());
  } catch (const AdapterError& e) {
    report_error(err, ctx.command, "adapter", e.what());
  } catch (const std::exception& e) {
    report_error(err, ctx.command, "error", e.what());
  }
  return 1;
}

}  // namespace srp

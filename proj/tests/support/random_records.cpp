#include "random_records.hpp"

#include <cmath>

#include "srpkit/item_id.hpp"

namespace srp::mock {

namespace {

struct Gen {
  std::mt19937_64& rng;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  std::string word() {
    static const char* kAlphabet[] = {"a", "b", "z", "Q", "7", "-", ".", "'", ",", "\xC3\xBC",
                                      "\xC3\x9F", "\xE2\x82\xAC", "\xCE\xBB", "#", "\"", " "};
    std::string s;
    std::size_t n = 1 + pick(8);
    for (std::size_t i = 0; i < n; ++i) s += kAlphabet[pick(std::size(kAlphabet))];
    if (s == "NA") s += "x";
    return s;
  }
  OptString opt_word(double p_null = 0.3) {
    if (coin(p_null)) return std::nullopt;
    return word();
  }
  OptReal real(double p_null = 0.3) {
    if (coin(p_null)) return std::nullopt;
    switch (pick(4)) {
      case 0: return std::uniform_real_distribution<double>(0.0, 60.0)(rng);
      case 1: return std::round(std::uniform_real_distribution<double>(0.0, 600.0)(rng)) / 10.0;
      case 2: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng), static_cast<int>(pick(80)) - 60);
      default: return static_cast<double>(pick(100));
    }
  }
  OptCount count(double p_null = 0.3) {
    if (coin(p_null)) return std::nullopt;
    return static_cast<long>(pick(50));
  }
  OptList list() {
    if (coin(0.4)) return std::nullopt;
    std::vector<std::string> v;
    std::size_t n = 1 + pick(3);
    for (std::size_t i = 0; i < n; ++i) {
      std::string w = word();
      while (w.find(", ") != std::string::npos || w.front() == ' ' || w.back() == ' ' || w.back() == ',') w = word();
      v.push_back(w);
    }
    if (coin(0.1)) v.front() = ",";
    return v;
  }
  ItemId id(bool with_word) {
    static const char* kTypes[] = {"ORG", "SI", "TR"};
    static const char* kLangs[] = {"DE", "EN"};
    ItemId i;
    i.ttype = kTypes[pick(3)];
    i.mode = coin() ? Mode::Spoken : Mode::Written;
    i.src_lang = kLangs[pick(2)];
    i.tgt_lang = i.src_lang == "DE" ? "EN" : "DE";
    i.doc = pad_number(static_cast<long>(pick(400)), 3);
    i.seg = pad_number(static_cast<long>(1 + pick(60)), 2);
    if (with_word && coin(0.9)) {
      i.word = pad_number(static_cast<long>(1 + pick(120)), 3);
      if (coin(0.15)) i.sub = static_cast<int>(1 + pick(3));
    }
    return i;
  }
  ExtraColumns extras(bool on) {
    if (!on) return {};
    return {{"note", word()}, {"batch", std::to_string(pick(9))}};
  }
};

}  // namespace

std::vector<WordRow> random_word_rows(std::mt19937_64& rng, std::size_t n, bool extras) {
  Gen g{rng};
  std::vector<WordRow> out;
  for (std::size_t k = 0; k < n; ++k) {
    WordRow r;
    r.word_id = g.id(true);
    auto& c = r.conllu;
    c.id = g.opt_word();
    c.token = g.opt_word(0.05);
    c.lemma = g.opt_word();
    c.pos = g.opt_word();
    c.xpos = g.opt_word();
    c.feats = g.opt_word();
    c.head_id = g.opt_word();
    c.rel = g.opt_word();
    c.deps = g.opt_word();
    c.misc = g.opt_word();
    r.srp_base_gpt2 = g.real();
    r.srp_ft_gpt2 = g.real();
    r.srp_base_mt = g.real();
    r.srp_ft_mt = g.real();
    r.aligned_word = g.list();
    r.aligned_word_id = g.list();
    r.doc_id = r.word_id.doc_key();
    r.seg_id = r.word_id.segment().str();
    r.lpair = r.word_id.lpair();
    r.lang = g.coin() ? r.word_id.src_lang : r.word_id.tgt_lang;
    r.mode = std::string(to_string(r.word_id.mode));
    r.ttype = r.word_id.ttype;
    r.speaker_id = g.opt_word();
    r.raw_seg = g.opt_word();
    r.extra = g.extras(extras);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SegmentRecord> random_segment_records(std::mt19937_64& rng, std::size_t n, bool extras) {
  Gen g{rng};
  std::vector<SegmentRecord> out;
  for (std::size_t k = 0; k < n; ++k) {
    SegmentRecord r;
    auto id = g.id(false);
    r.doc_id = id.doc_key();
    r.seg_id = id.str();
    r.lpair = id.lpair();
    r.lang = id.src_lang;
    r.mode = std::string(to_string(id.mode));
    r.ttype = id.ttype;
    r.speaker_id = g.opt_word();
    r.delivery_rate = g.real();
    r.delivery_wpm = g.real();
    r.speech_timing_sec = g.real();
    r.source_text_delivery_type = g.opt_word();
    r.base_gpt_AvS = g.real();
    r.base_gpt_AvS_subw = g.real();
    r.ft_gpt_AvS = g.real();
    r.ft_gpt_AvS_subw = g.real();
    r.disfluencies = g.count();
    r.fillers = g.count();
    r.fillers_plus_3 = g.count();
    r.raw_seg = g.opt_word();
    r.tokens = g.opt_word();
    r.wc_tok = static_cast<long>(g.pick(80));
    r.extra = g.extras(extras);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SegmentPairRecord> random_pair_records(std::mt19937_64& rng, std::size_t n, bool extras) {
  Gen g{rng};
  std::vector<SegmentPairRecord> out;
  for (std::size_t k = 0; k < n; ++k) {
    SegmentPairRecord r;
    auto id = g.id(false);
    r.src_doc_id = id.doc_key();
    r.src_seg_id = id.str();
    id.ttype = "SI";
    r.tgt_doc_id = id.doc_key();
    r.tgt_seg_id = id.str();
    r.lpair = id.lpair();
    r.mode = std::string(to_string(id.mode));
    r.src_raw_seg = g.opt_word();
    r.tgt_raw_seg = g.opt_word();
    r.base_mt_AvS = g.real();
    r.base_mt_AvS_subw = g.real();
    r.ft_mt_AvS = g.real();
    r.ft_mt_AvS_subw = g.real();
    r.base_bleu = g.real();
    r.ft_bleu = g.real();
    r.extra = g.extras(extras);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace srp::mock

#include "srpkit/fp_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace srp {

Variant parse_variant(std::string_view s) {
  if (s == "base") return Variant::Base;
  if (s == "ft") return Variant::FineTuned;
  throw std::invalid_argument("variant must be base or ft, got '" + std::string(s) + "'");
}

std::string_view to_string(Variant v) { return v == Variant::Base ? "base" : "ft"; }

namespace {

// Segment identity shared by the source and target sides.
std::string pair_key(const ItemId& id) {
  return std::string(to_string(id.mode)) + "_" + id.src_lang + "_" + id.tgt_lang + "_" + id.doc +
         "-" + id.seg;
}

struct Side {
  std::vector<const WordRow*> rows;
};

std::optional<double> mean_of(const std::vector<const WordRow*>& rows,
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

}  // namespace

FPDataset build_fp_dataset(const std::vector<WordRow>& rows, std::string_view direction,
                           Variant variant, bool zscore) {
  const std::string dir(direction);
  const std::string src_lang = dir.substr(0, dir.find('-'));
  auto lm = variant == Variant::Base ? &WordRow::srp_base_gpt2 : &WordRow::srp_ft_gpt2;
  auto mt = variant == Variant::Base ? &WordRow::srp_base_mt : &WordRow::srp_ft_mt;

  std::map<std::string, Side> src, tgt;
  std::vector<std::string> order;
  std::map<std::string, const WordRow*> src_by_id;
  // target word id -> source rows linking to it
  std::map<std::string, std::vector<const WordRow*>> reverse;
  for (const auto& r : rows) {
    if (r.lpair != dir) continue;
    const std::string key = pair_key(r.word_id);
    if (r.lang == src_lang) {
      src[key].rows.push_back(&r);
      if (is_surface_row(r) && r.aligned_word_id)
        for (const auto& t : *r.aligned_word_id) reverse[t].push_back(&r);
    } else {
      if (!tgt.count(key)) order.push_back(key);
      tgt[key].rows.push_back(&r);
    }
  }

  FPDataset ds;
  for (const auto& key : order) {
    const auto& trows = tgt[key].rows;
    auto avs_tgt = mean_of(trows, lm);
    auto avs_mt = mean_of(trows, mt);
    auto sit = src.find(key);
    std::optional<double> avs_src;
    if (sit != src.end()) avs_src = mean_of(sit->second.rows, lm);

    const WordRow* prev = nullptr;
    for (const auto* r : trows) {
      const WordRow* before = prev;
      if (!is_expansion_row(*r)) prev = r;
      if (!is_surface_row(*r)) continue;
      auto rit = reverse.find(r->word_id.str());
      if (rit == reverse.end()) {
        ++ds.skipped_unaligned;
        continue;
      }
      double s = 0.0;
      long n = 0;
      for (const auto* sr : rit->second)
        if (sr->*lm) {
          s += *(sr->*lm);
          ++n;
        }
      if (!(r->*lm) || !(r->*mt) || n == 0 || !avs_tgt || !avs_mt || !avs_src) {
        ++ds.skipped_unscored;
        continue;
      }
      FPObservation o;
      o.outcome = before && is_fp_row(*before) ? 1 : 0;
      o.x = {*(r->*lm), s / static_cast<double>(n), *(r->*mt), *avs_tgt, *avs_src, *avs_mt};
      o.speaker_id = r->speaker_id.value_or("NA");
      o.doc_id = r->doc_id;
      o.direction = dir;
      o.word_id = r->word_id.str();
      ds.obs.push_back(std::move(o));
    }
  }

  if (!zscore || ds.obs.empty()) return ds;
  const double n = static_cast<double>(ds.obs.size());
  for (std::size_t c = 0; c < 6; ++c) {
    double mean = 0.0;
    for (const auto& o : ds.obs) mean += o.x[c];
    mean /= n;
    double ss = 0.0;
    for (const auto& o : ds.obs) ss += (o.x[c] - mean) * (o.x[c] - mean);
    double sd = ds.obs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean))))
      throw std::runtime_error("predictor " + kFpPredictors[c] +
                               " is constant; z-score undefined");
    ds.scaling[c] = {mean, sd};
    for (auto& o : ds.obs) o.x[c] = (o.x[c] - mean) / sd;
  }
  return ds;
}

GroupingFactor make_factor(std::string name, const std::vector<std::string>& values) {
  GroupingFactor f;
  f.name = std::move(name);
  std::map<std::string, int> ids;
  for (const auto& v : values) ids.emplace(v, 0);
  for (auto& [label, id] : ids) {
    id = static_cast<int>(f.labels.size());
    f.labels.push_back(label);
  }
  f.n_levels = static_cast<int>(f.labels.size());
  for (const auto& v : values) f.level.push_back(ids[v]);
  return f;
}

LogisticProblem make_problem(const FPDataset& data, const std::vector<std::string>& random) {
  LogisticProblem p;
  const auto n = static_cast<Eigen::Index>(data.obs.size());
  p.X.resize(n, 7);
  p.y.resize(n);
  p.names = {"(Intercept)"};
  p.names.insert(p.names.end(), kFpPredictors.begin(), kFpPredictors.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = data.obs[static_cast<std::size_t>(i)];
    p.X(i, 0) = 1.0;
    for (int c = 0; c < 6; ++c) p.X(i, c + 1) = o.x[static_cast<std::size_t>(c)];
    p.y(i) = o.outcome;
  }
  for (const auto& name : random) {
    std::vector<std::string> vals;
    for (const auto& o : data.obs) {
      if (name == "speaker_id")
        vals.push_back(o.speaker_id);
      else if (name == "doc_id")
        vals.push_back(o.doc_id);
      else
        throw std::invalid_argument("unknown grouping factor '" + name + "'");
    }
    p.groups.push_back(make_factor(name, vals));
  }
  return p;
}

double concordance(std::span<const double> probs, std::span<const int> outcomes) {
  if (probs.size() != outcomes.size())
    throw std::invalid_argument("concordance: " + std::to_string(probs.size()) +
                                " probabilities for " + std::to_string(outcomes.size()) +
                                " outcomes");
  std::vector<std::size_t> idx(probs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  double concordant = 0.0;
  double neg_below = 0.0;
  double pos_total = 0.0, neg_total = 0.0;
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k;
    double pos = 0.0, neg = 0.0;
    while (e < idx.size() && probs[idx[e]] == probs[idx[k]]) {
      (outcomes[idx[e]] != 0 ? pos : neg) += 1.0;
      ++e;
    }
    concordant += pos * neg_below + 0.5 * pos * neg;
    neg_below += neg;
    pos_total += pos;
    neg_total += neg;
    k = e;
  }
  if (pos_total == 0.0 || neg_total == 0.0)
    throw std::invalid_argument("concordance needs both outcome classes");
  return concordant / (pos_total * neg_total);
}

ModelComparison compare_models(const FitResult& a, const FitResult& b) {
  if (a.n_obs != b.n_obs)
    throw std::invalid_argument("models fitted on different data: " + std::to_string(a.n_obs) +
                                " vs " + std::to_string(b.n_obs) + " observations");
  ModelComparison c;
  c.delta_aic = a.aic - b.aic;
  c.delta_c = a.concordance - b.concordance;
  if (c.delta_aic < 0)
    c.preferred = "a";
  else if (c.delta_aic > 0)
    c.preferred = "b";
  else
    c.preferred = "tie";
  return c;
}

}  // namespace srp

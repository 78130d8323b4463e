#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace srp {

// The "13a" tokenizer of mteval-v13a / sacrebleu.
std::vector<std::string> tokenize_13a(std::string_view line);

struct BleuStats {
  std::array<long, 4> correct{};
  std::array<long, 4> total{};
  long sys_len = 0;
  long ref_len = 0;
};

BleuStats bleu_stats(std::string_view hypothesis, std::string_view reference);

// Sentence BLEU in [0, 100]: 4-gram, exponential smoothing, effective order.
double sentence_bleu(std::string_view hypothesis, std::string_view reference);
double bleu_from_stats(const BleuStats& s);

}  // namespace srp

#include "srpkit/bleu.hpp"

#include <cmath>
#include <map>

#include "srpkit/utf8.hpp"

namespace srp {

namespace {

bool isdigit_ascii(char c) { return c >= '0' && c <= '9'; }

bool split_symbol(unsigned char c) {
  return (c >= '{' && c <= '~') || (c >= '[' && c <= '`') || (c >= ' ' && c <= '&') ||
         (c >= '(' && c <= '+') || (c >= ':' && c <= '@') || c == '/';
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t at = 0;
  while ((at = s.find(from, at)) != std::string::npos) {
    s.replace(at, from.size(), to);
    at += to.size();
  }
  return s;
}

using Counts = std::map<std::vector<std::string>, long>;

Counts ngrams(const std::vector<std::string>& toks, std::size_t n) {
  Counts c;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++c[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  return c;
}

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view in) {
  std::string line(in);
  line = replace_all(line, "<skipped>", "");
  line = replace_all(line, "-\n", "");
  line = replace_all(line, "\n", " ");
  if (line.find('&') != std::string::npos) {
    line = replace_all(line, "&quot;", "\"");
    line = replace_all(line, "&amp;", "&");
    line = replace_all(line, "&lt;", "<");
    line = replace_all(line, "&gt;", ">");
  }
  line = " " + line + " ";

  std::string a;
  for (char c : line) {
    if (split_symbol(static_cast<unsigned char>(c))) {
      a += ' ';
      a += c;
      a += ' ';
    } else {
      a += c;
    }
  }
  // Each pass mirrors one left-to-right, non-overlapping regex substitution.
  std::string b;
  for (std::size_t i = 0; i < a.size();) {
    if (i + 1 < a.size() && !isdigit_ascii(a[i]) && (a[i + 1] == '.' || a[i + 1] == ',')) {
      b += a[i];
      b += ' ';
      b += a[i + 1];
      b += ' ';
      i += 2;
    } else {
      b += a[i++];
    }
  }
  std::string c;
  for (std::size_t i = 0; i < b.size();) {
    if (i + 1 < b.size() && (b[i] == '.' || b[i] == ',') && !isdigit_ascii(b[i + 1])) {
      c += ' ';
      c += b[i];
      c += ' ';
      c += b[i + 1];
      i += 2;
    } else {
      c += b[i++];
    }
  }
  std::string d;
  for (std::size_t i = 0; i < c.size();) {
    if (i + 1 < c.size() && isdigit_ascii(c[i]) && c[i + 1] == '-') {
      d += c[i];
      d += ' ';
      d += '-';
      d += ' ';
      i += 2;
    } else {
      d += c[i++];
    }
  }
  return utf8::split_ws(d);
}

BleuStats bleu_stats(std::string_view hypothesis, std::string_view reference) {
  auto hyp = tokenize_13a(hypothesis);
  auto ref = tokenize_13a(reference);
  BleuStats s;
  s.sys_len = static_cast<long>(hyp.size());
  s.ref_len = static_cast<long>(ref.size());
  for (std::size_t n = 1; n <= 4; ++n) {
    auto h = ngrams(hyp, n);
    auto r = ngrams(ref, n);
    long correct = 0;
    for (const auto& [g, cnt] : h) {
      auto it = r.find(g);
      if (it != r.end()) correct += std::min(cnt, it->second);
    }
    s.correct[n - 1] = correct;
    s.total[n - 1] = hyp.size() >= n ? static_cast<long>(hyp.size() - n + 1) : 0;
  }
  return s;
}

double bleu_from_stats(const BleuStats& s) {
  if (s.correct[0] == 0) return 0.0;
  double bp = 1.0;
  if (s.sys_len < s.ref_len)
    bp = s.sys_len > 0 ? std::exp(1.0 - static_cast<double>(s.ref_len) / s.sys_len) : 0.0;
  double smooth = 1.0;
  double log_sum = 0.0;
  int order = 0;
  for (int n = 0; n < 4; ++n) {
    if (s.total[n] == 0) break;
    order = n + 1;
    double p;
    if (s.correct[n] == 0) {
      smooth *= 2.0;
      p = 100.0 / (smooth * static_cast<double>(s.total[n]));
    } else {
      p = 100.0 * static_cast<double>(s.correct[n]) / static_cast<double>(s.total[n]);
    }
    log_sum += std::log(p);
  }
  if (order == 0) return 0.0;
  double score = bp * std::exp(log_sum / order);
  return std::min(100.0, std::max(0.0, score));
}

double sentence_bleu(std::string_view hypothesis, std::string_view reference) {
  return bleu_from_stats(bleu_stats(hypothesis, reference));
}

}  // namespace srp

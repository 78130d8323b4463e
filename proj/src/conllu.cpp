#include "srpkit/conllu.hpp"

#include <fstream>
#include <sstream>

#include "srpkit/utf8.hpp"

namespace srp {

namespace {

OptString field(std::string_view s) {
  if (s == "_") return std::nullopt;
  return std::string(s);
}

int to_int(std::string_view s, std::string_view line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConlluError("bad token id '" + std::string(s) + "' in line: " + std::string(line));
  }
}

}  // namespace

ConlluToken parse_conllu_line(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (cols.size() != 10)
    throw ConlluError("expected 10 fields, found " + std::to_string(cols.size()) + ": " +
                      std::string(line));
  ConlluToken tok;
  std::string_view id = cols[0];
  if (auto dash = id.find('-'); dash != std::string_view::npos) {
    tok.is_range = true;
    tok.first = to_int(id.substr(0, dash), line);
    tok.last = to_int(id.substr(dash + 1), line);
    if (tok.last < tok.first) throw ConlluError("inverted range: " + std::string(line));
  } else {
    tok.first = tok.last = to_int(id, line);
  }
  auto& f = tok.fields;
  f.id = std::string(id);
  f.token = field(cols[1]);
  if (cols[1] == "_") f.token = std::string("_");  // an underscore token is a real form
  f.lemma = field(cols[2]);
  f.pos = field(cols[3]);
  f.xpos = field(cols[4]);
  f.feats = field(cols[5]);
  f.head_id = field(cols[6]);
  f.rel = field(cols[7]);
  f.deps = field(cols[8]);
  f.misc = field(cols[9]);
  return tok;
}

std::vector<ConlluSentence> parse_conllu(std::string_view text) {
  std::vector<ConlluSentence> out;
  ConlluSentence cur;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (utf8::strip_ws(line).empty()) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    if (line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab != std::string::npos && line.substr(0, tab).find('.') != std::string::npos) continue;
    cur.push_back(parse_conllu_line(line));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string validate_tree(const ConlluSentence& sentence) {
  std::vector<int> heads;
  for (const auto& t : sentence) {
    if (t.is_range) continue;
    if (t.first != static_cast<int>(heads.size()) + 1) return "word ids are not consecutive";
    if (!t.fields.head_id) return "missing head at word " + std::to_string(t.first);
    try {
      heads.push_back(std::stoi(*t.fields.head_id));
    } catch (const std::exception&) {
      return "non-numeric head at word " + std::to_string(t.first);
    }
  }
  const int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int h : heads) {
    if (h < 0 || h > n) return "head out of range";
    if (h == 0) ++roots;
  }
  if (roots != 1) return "expected one root, found " + std::to_string(roots);
  for (int w = 1; w <= n; ++w) {
    int cur = w;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return "cycle through word " + std::to_string(w);
      cur = heads[static_cast<std::size_t>(cur - 1)];
    }
  }
  return {};
}

ReplayParserAdapter::ReplayParserAdapter(std::string_view conllu_text, std::string identity)
    : identity_(std::move(identity)) {
  static constexpr std::string_view kKey = "# seg_text = ";
  std::istringstream in{std::string(conllu_text)};
  std::string line, key, block;
  bool open = false;
  auto flush = [&] {
    if (open) segments_[key] = parse_conllu(block);
    block.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind(kKey, 0) == 0) {
      flush();
      key = line.substr(kKey.size());
      if (!key.empty() && key.back() == '\r') key.pop_back();
      open = true;
      continue;
    }
    block += line;
    block += '\n';
  }
  flush();
}

std::shared_ptr<ReplayParserAdapter> ReplayParserAdapter::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AdapterError("cannot open parser replay file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return std::make_shared<ReplayParserAdapter>(ss.str(), "replay-parser:" + path);
}

std::vector<ConlluSentence> ReplayParserAdapter::annotate(std::string_view text,
                                                          std::string_view /*lang*/) {
  auto it = segments_.find(text);
  if (it == segments_.end())
    throw AdapterError("no stored parse for segment '" + std::string(text) + "'");
  return it->second;
}

}  // namespace srp

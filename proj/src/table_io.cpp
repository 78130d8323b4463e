#include "srpkit/table_io.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>

namespace srp {

namespace {

template <class R>
struct Column {
  std::string name;
  std::function<OptString(const R&)> get;
  std::function<void(R&, const OptString&)> set;
};

[[noreturn]] void coercion_error(const std::string& column, const std::string& cell,
                                 const char* type) {
  throw TableError("cannot read '" + cell + "' as " + type, -1, column);
}

double parse_real(const std::string& column, const std::string& cell) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) coercion_error(column, cell, "real");
  return v;
}

long parse_count(const std::string& column, const std::string& cell) {
  long v = 0;
  const char* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || p != end) coercion_error(column, cell, "integer");
  return v;
}

const std::string& required(const std::string& column, const OptString& cell) {
  if (!cell) throw TableError("null in required column", -1, column);
  return *cell;
}

template <class R>
Column<R> text(std::string name, std::string R::*field) {
  return {name, [field](const R& r) -> OptString { return r.*field; },
          [field, name](R& r, const OptString& c) { r.*field = required(name, c); }};
}

template <class R>
Column<R> opt_text(std::string name, OptString R::*field) {
  return {name, [field](const R& r) { return r.*field; },
          [field](R& r, const OptString& c) { r.*field = c; }};
}

template <class R>
Column<R> real(std::string name, OptReal R::*field) {
  return {name,
          [field](const R& r) -> OptString {
            if (!(r.*field)) return std::nullopt;
            return format_real(*(r.*field));
          },
          [field, name](R& r, const OptString& c) {
            if (c)
              r.*field = parse_real(name, *c);
            else
              r.*field = std::nullopt;
          }};
}

template <class R>
Column<R> count(std::string name, OptCount R::*field) {
  return {name,
          [field](const R& r) -> OptString {
            if (!(r.*field)) return std::nullopt;
            return std::to_string(*(r.*field));
          },
          [field, name](R& r, const OptString& c) {
            if (c)
              r.*field = parse_count(name, *c);
            else
              r.*field = std::nullopt;
          }};
}

template <class R>
Column<R> list(std::string name, OptList R::*field) {
  return {name,
          [field, name](const R& r) -> OptString {
            const auto& v = r.*field;
            if (!v) return std::nullopt;
            if (v->empty()) throw TableError("empty list is not serializable", -1, name);
            std::string out;
            for (std::size_t i = 0; i < v->size(); ++i) {
              if ((*v)[i].empty()) throw TableError("empty list element", -1, name);
              if (i) out += kListSeparator;
              out += (*v)[i];
            }
            return out;
          },
          [field](R& r, const OptString& c) {
            if (!c) {
              r.*field = std::nullopt;
              return;
            }
            std::vector<std::string> items;
            std::size_t start = 0;
            for (;;) {
              // A leading separator character belongs to the element (a "," token).
              auto pos = c->find(kListSeparator, start + 1);
              if (pos == std::string::npos) {
                items.push_back(c->substr(start));
                break;
              }
              items.push_back(c->substr(start, pos - start));
              start = pos + kListSeparator.size();
            }
            r.*field = std::move(items);
          }};
}

using ConlluMember = OptString ConlluFields::*;

Column<WordRow> conllu(std::string name, ConlluMember m) {
  return {name, [m](const WordRow& r) { return r.conllu.*m; },
          [m](WordRow& r, const OptString& c) { r.conllu.*m = c; }};
}

const std::vector<Column<WordRow>>& vertical_columns() {
  static const std::vector<Column<WordRow>> cols = {
      text<WordRow>("doc_id", &WordRow::doc_id),
      text<WordRow>("seg_id", &WordRow::seg_id),
      {"word_id", [](const WordRow& r) -> OptString { return r.word_id.str(); },
       [](WordRow& r, const OptString& c) {
         const auto& s = required("word_id", c);
         try {
           r.word_id = parse_item_id(s);
         } catch (const ItemIdError& e) {
           throw TableError(e.what(), -1, "word_id");
         }
       }},
      text<WordRow>("lpair", &WordRow::lpair),
      text<WordRow>("lang", &WordRow::lang),
      text<WordRow>("mode", &WordRow::mode),
      text<WordRow>("ttype", &WordRow::ttype),
      opt_text<WordRow>("speaker_id", &WordRow::speaker_id),
      conllu("id", &ConlluFields::id),
      conllu("token", &ConlluFields::token),
      conllu("lemma", &ConlluFields::lemma),
      conllu("pos", &ConlluFields::pos),
      conllu("xpos", &ConlluFields::xpos),
      conllu("feats", &ConlluFields::feats),
      conllu("head_id", &ConlluFields::head_id),
      conllu("rel", &ConlluFields::rel),
      conllu("deps", &ConlluFields::deps),
      conllu("misc", &ConlluFields::misc),
      real<WordRow>("srp_base_gpt2", &WordRow::srp_base_gpt2),
      real<WordRow>("srp_ft_gpt2", &WordRow::srp_ft_gpt2),
      real<WordRow>("srp_base_mt", &WordRow::srp_base_mt),
      real<WordRow>("srp_ft_mt", &WordRow::srp_ft_mt),
      list<WordRow>("aligned_word_id", &WordRow::aligned_word_id),
      list<WordRow>("aligned_word", &WordRow::aligned_word),
      opt_text<WordRow>("raw_seg", &WordRow::raw_seg),
  };
  return cols;
}

const std::vector<Column<SegmentRecord>>& long_columns() {
  using R = SegmentRecord;
  static const std::vector<Column<R>> cols = {
      text<R>("doc_id", &R::doc_id),
      text<R>("seg_id", &R::seg_id),
      text<R>("lpair", &R::lpair),
      text<R>("lang", &R::lang),
      text<R>("mode", &R::mode),
      text<R>("ttype", &R::ttype),
      opt_text<R>("speaker_id", &R::speaker_id),
      real<R>("delivery_rate", &R::delivery_rate),
      real<R>("delivery_wpm", &R::delivery_wpm),
      real<R>("speech_timing_sec", &R::speech_timing_sec),
      opt_text<R>("source_text_delivery_type", &R::source_text_delivery_type),
      real<R>("base_gpt_AvS", &R::base_gpt_AvS),
      real<R>("base_gpt_AvS_subw", &R::base_gpt_AvS_subw),
      real<R>("ft_gpt_AvS", &R::ft_gpt_AvS),
      real<R>("ft_gpt_AvS_subw", &R::ft_gpt_AvS_subw),
      count<R>("disfluencies", &R::disfluencies),
      count<R>("fillers", &R::fillers),
      count<R>("fillers+3", &R::fillers_plus_3),
      opt_text<R>("raw_seg", &R::raw_seg),
      opt_text<R>("tokens", &R::tokens),
      {"wc_tok", [](const R& r) -> OptString { return std::to_string(r.wc_tok); },
       [](R& r, const OptString& c) { r.wc_tok = parse_count("wc_tok", required("wc_tok", c)); }},
  };
  return cols;
}

const std::vector<Column<SegmentPairRecord>>& wide_columns() {
  using R = SegmentPairRecord;
  static const std::vector<Column<R>> cols = {
      text<R>("src_doc_id", &R::src_doc_id),
      text<R>("src_seg_id", &R::src_seg_id),
      text<R>("tgt_doc_id", &R::tgt_doc_id),
      text<R>("tgt_seg_id", &R::tgt_seg_id),
      text<R>("lpair", &R::lpair),
      text<R>("mode", &R::mode),
      opt_text<R>("src_raw_seg", &R::src_raw_seg),
      opt_text<R>("tgt_raw_seg", &R::tgt_raw_seg),
      real<R>("base_mt_AvS", &R::base_mt_AvS),
      real<R>("base_mt_AvS_subw", &R::base_mt_AvS_subw),
      real<R>("ft_mt_AvS", &R::ft_mt_AvS),
      real<R>("ft_mt_AvS_subw", &R::ft_mt_AvS_subw),
      real<R>("base_bleu", &R::base_bleu),
      real<R>("ft_bleu", &R::ft_bleu),
  };
  return cols;
}

template <class R>
const std::vector<Column<R>>& columns_for();
template <>
const std::vector<Column<WordRow>>& columns_for<WordRow>() {
  return vertical_columns();
}
template <>
const std::vector<Column<SegmentRecord>>& columns_for<SegmentRecord>() {
  return long_columns();
}
template <>
const std::vector<Column<SegmentPairRecord>>& columns_for<SegmentPairRecord>() {
  return wide_columns();
}

void check_cell(const std::string& cell, const std::string& column, long row) {
  if (cell == kNullCell)
    throw TableError("literal \"NA\" string would read back as null", row, column);
  if (cell.find_first_of("\t\n\r") != std::string::npos)
    throw TableError("cell contains a tab or line break", row, column);
}

template <class R>
void write_rows(std::span<const R> rows, std::ostream& sink, const WriteOptions& opt) {
  const auto& cols = columns_for<R>();
  std::vector<std::string> extra_names;
  if (!rows.empty())
    for (const auto& [k, v] : rows.front().extra) extra_names.push_back(k);

  std::string out;
  for (const auto& line : opt.provenance) {
    if (line.find('\n') != std::string::npos)
      throw TableError("provenance line contains a line break");
    out += "# " + line + "\n";
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += '\t';
    out += cols[i].name;
  }
  for (const auto& n : extra_names) out += '\t' + n;
  out += '\n';

  long rowno = 0;
  for (const R& r : rows) {
    ++rowno;
    if (r.extra.size() != extra_names.size())
      throw TableError("heterogeneous rows: extra column count differs", rowno);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += '\t';
      OptString cell;
      try {
        cell = cols[i].get(r);
      } catch (const TableError& e) {
        throw TableError(e.what(), rowno, e.column());
      }
      if (cell) {
        check_cell(*cell, cols[i].name, rowno);
        out += *cell;
      } else {
        out += kNullCell;
      }
    }
    for (std::size_t i = 0; i < extra_names.size(); ++i) {
      if (r.extra[i].first != extra_names[i])
        throw TableError("heterogeneous rows: extra column names differ", rowno, r.extra[i].first);
      const auto& cell = r.extra[i].second;
      if (cell.find_first_of("\t\n\r") != std::string::npos)
        throw TableError("cell contains a tab or line break", rowno, extra_names[i]);
      out += '\t' + cell;
    }
    out += '\n';
  }
  if (opt.gzip) out = gzip_compress(out);
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!sink) throw TableError("write to sink failed");
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string slurp(std::istream& in) {
  std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (looks_gzipped(data)) data = gzip_decompress(data);
  return data;
}

template <class R>
std::vector<R> read_rows(std::istream& source, std::vector<std::string>* provenance) {
  const auto& cols = columns_for<R>();
  const std::string data = slurp(source);
  std::vector<R> rows;

  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= data.size()) return false;
    auto nl = data.find('\n', pos);
    if (nl == std::string::npos) nl = data.size();
    line = std::string_view(data).substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    return true;
  };

  std::string_view line;
  bool have_header = false;
  while (next_line(line)) {
    if (!line.empty() && line.front() == '#') {
      if (provenance) {
        std::string_view body = line.substr(1);
        if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        provenance->emplace_back(body);
      }
      continue;
    }
    have_header = true;
    break;
  }
  if (!have_header) throw TableError("missing header row");

  const auto header = split_tabs(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
  std::vector<std::size_t> col_pos;
  std::vector<bool> known(header.size(), false);
  for (const auto& c : cols) {
    auto it = index.find(c.name);
    if (it == index.end()) throw TableError("missing required column '" + c.name + "'", -1, c.name);
    col_pos.push_back(it->second);
    known[it->second] = true;
  }

  long rowno = 0;
  while (next_line(line)) {
    if (line.empty() && pos >= data.size()) break;
    ++rowno;
    const auto cells = split_tabs(line);
    if (cells.size() != header.size())
      throw TableError("expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       rowno);
    R r{};
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::string& cell = cells[col_pos[i]];
      OptString value;
      if (cell != kNullCell) value = cell;
      try {
        cols[i].set(r, value);
      } catch (const TableError& e) {
        throw TableError(std::string(e.what()) + " (row " + std::to_string(rowno) + ", column " +
                             cols[i].name + ")",
                         rowno, cols[i].name);
      }
    }
    for (std::size_t i = 0; i < header.size(); ++i)
      if (!known[i]) r.extra.emplace_back(header[i], cells[i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string_view to_string(TableFormat f) {
  switch (f) {
    case TableFormat::Vertical:
      return "vertical";
    case TableFormat::Long:
      return "long";
    case TableFormat::Wide:
      return "wide";
  }
  return "?";
}

TableFormat parse_table_format(std::string_view s) {
  if (s == "vertical" || s == "vrt") return TableFormat::Vertical;
  if (s == "long") return TableFormat::Long;
  if (s == "wide") return TableFormat::Wide;
  throw TableError("unknown table format '" + std::string(s) + "'");
}

const std::vector<std::string>& columns(TableFormat f) {
  static const auto names = [] {
    auto collect = [](const auto& cols) {
      std::vector<std::string> out;
      for (const auto& c : cols) out.push_back(c.name);
      return out;
    };
    return std::array<std::vector<std::string>, 3>{
        collect(vertical_columns()), collect(long_columns()), collect(wide_columns())};
  }();
  return names[static_cast<std::size_t>(f)];
}

std::string schema_manifest() {
  std::string out = "# srpkit table schema v1: <format>\\t<column>, in file order\n";
  for (auto f : {TableFormat::Vertical, TableFormat::Long, TableFormat::Wide})
    for (const auto& c : columns(f)) out += std::string(to_string(f)) + "\t" + c + "\n";
  return out;
}

std::string format_real(double v) {
  if (!std::isfinite(v)) throw TableError("non-finite real is not serializable");
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw TableError("real formatting failed");
  return std::string(buf, p);
}

void write_table(std::span<const WordRow> rows, std::ostream& sink, const WriteOptions& opt) {
  write_rows(rows, sink, opt);
}
void write_table(std::span<const SegmentRecord> rows, std::ostream& sink,
                 const WriteOptions& opt) {
  write_rows(rows, sink, opt);
}
void write_table(std::span<const SegmentPairRecord> rows, std::ostream& sink,
                 const WriteOptions& opt) {
  write_rows(rows, sink, opt);
}

void write_table(std::span<const AnyRecord> rows, TableFormat format, std::ostream& sink,
                 const WriteOptions& opt) {
  auto gather = [&](auto tag) {
    using R = decltype(tag);
    std::vector<R> typed;
    typed.reserve(rows.size());
    long rowno = 0;
    for (const auto& r : rows) {
      ++rowno;
      const R* p = std::get_if<R>(&r);
      if (!p)
        throw TableError("heterogeneous rows: record type does not match " +
                             std::string(to_string(format)) + " format",
                         rowno);
      typed.push_back(*p);
    }
    write_rows(std::span<const R>(typed), sink, opt);
  };
  switch (format) {
    case TableFormat::Vertical:
      gather(WordRow{});
      break;
    case TableFormat::Long:
      gather(SegmentRecord{});
      break;
    case TableFormat::Wide:
      gather(SegmentPairRecord{});
      break;
  }
}

std::vector<WordRow> read_vertical(std::istream& source) { return read_rows<WordRow>(source, nullptr); }
std::vector<SegmentRecord> read_long(std::istream& source) {
  return read_rows<SegmentRecord>(source, nullptr);
}
std::vector<SegmentPairRecord> read_wide(std::istream& source) {
  return read_rows<SegmentPairRecord>(source, nullptr);
}

Table read_table(std::istream& source, TableFormat format, std::vector<std::string>* provenance) {
  switch (format) {
    case TableFormat::Vertical:
      return read_rows<WordRow>(source, provenance);
    case TableFormat::Long:
      return read_rows<SegmentRecord>(source, provenance);
    case TableFormat::Wide:
      return read_rows<SegmentPairRecord>(source, provenance);
  }
  throw TableError("unknown table format");
}

void write_table_file(const std::string& path, const Table& table, const WriteOptions& opt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TableError("cannot open '" + path + "' for writing");
  std::visit([&](const auto& rows) { write_table(std::span(rows), out, opt); }, table);
}

Table read_table_file(const std::string& path, TableFormat format,
                      std::vector<std::string>* provenance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TableError("cannot open '" + path + "'");
  return read_table(in, format, provenance);
}

bool looks_gzipped(std::string_view data) {
  return data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
         static_cast<unsigned char>(data[1]) == 0x8b;
}

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw TableError("deflateInit2 failed");
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw TableError("gzip compression failed");
  out.resize(zs.total_out);
  return out;
}

std::string gzip_decompress(std::string_view data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw TableError("inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 15];
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw TableError("corrupt gzip stream");
    }
    out.append(buf, sizeof buf - zs.avail_out);
    // Concatenated members: restart after each stream end.
    if (rc == Z_STREAM_END && zs.avail_in > 0) {
      if (inflateReset(&zs) != Z_OK) break;
      rc = Z_OK;
    }
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

}  // namespace srp

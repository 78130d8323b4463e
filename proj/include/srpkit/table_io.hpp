#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "srpkit/records.hpp"

namespace srp {

enum class TableFormat { Vertical, Long, Wide };

std::string_view to_string(TableFormat f);
TableFormat parse_table_format(std::string_view s);

// The sole null marker in every table.
inline constexpr std::string_view kNullCell = "NA";
// Separator used for list-valued cells (aligned_word, aligned_word_id).
inline constexpr std::string_view kListSeparator = ", ";

class TableError : public std::runtime_error {
 public:
  TableError(const std::string& what, long row = -1, std::string column = {})
      : std::runtime_error(what), row_(row), column_(std::move(column)) {}
  // 1-based data row (header excluded), -1 when not row specific.
  long row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  long row_;
  std::string column_;
};

// Fixed column order of each format. Frozen; mirrored in data/schema.txt.
const std::vector<std::string>& columns(TableFormat f);
// Renders the plain-text schema manifest (one "format<TAB>column" line each).
std::string schema_manifest();

using AnyRecord = std::variant<WordRow, SegmentRecord, SegmentPairRecord>;
using Table = std::variant<std::vector<WordRow>, std::vector<SegmentRecord>,
                           std::vector<SegmentPairRecord>>;

struct WriteOptions {
  // Lines written before the header, each prefixed with "# ".
  std::vector<std::string> provenance;
  bool gzip = true;
};

// Writes a header row and one line per record. Output is gzip-compressed
// unless options.gzip is false. All rows must share the same extra columns.
void write_table(std::span<const WordRow> rows, std::ostream& sink, const WriteOptions& opt = {});
void write_table(std::span<const SegmentRecord> rows, std::ostream& sink,
                 const WriteOptions& opt = {});
void write_table(std::span<const SegmentPairRecord> rows, std::ostream& sink,
                 const WriteOptions& opt = {});
// Generic entry point; rejects rows whose type does not match `format`.
void write_table(std::span<const AnyRecord> rows, TableFormat format, std::ostream& sink,
                 const WriteOptions& opt = {});

// Reads plain or gzip-compressed TSV. Leading "#" lines are skipped (and
// returned through `provenance` when given).
Table read_table(std::istream& source, TableFormat format,
                 std::vector<std::string>* provenance = nullptr);
std::vector<WordRow> read_vertical(std::istream& source);
std::vector<SegmentRecord> read_long(std::istream& source);
std::vector<SegmentPairRecord> read_wide(std::istream& source);

void write_table_file(const std::string& path, const Table& table, const WriteOptions& opt = {});
Table read_table_file(const std::string& path, TableFormat format,
                      std::vector<std::string>* provenance = nullptr);

// Real-number cell text: shortest representation that parses back exactly.
std::string format_real(double v);

// Whole-buffer gzip helpers (deterministic header: mtime 0).
std::string gzip_compress(std::string_view data);
std::string gzip_decompress(std::string_view data);
bool looks_gzipped(std::string_view data);

}  // namespace srp

#include "srpkit/records.hpp"

namespace srp {

bool is_filler_form(std::string_view token) {
  for (const char* f : kFillerForms)
    if (token == f) return true;
  return false;
}

bool is_fp_row(const WordRow& row) {
  return row.conllu.pos && *row.conllu.pos == kFpTag && row.conllu.token &&
         is_filler_form(*row.conllu.token);
}

bool is_expansion_row(const WordRow& row) { return row.word_id.sub.has_value(); }

bool is_placeholder_row(const WordRow& row) { return !row.word_id.word.has_value(); }

bool is_surface_row(const WordRow& row) {
  return !is_fp_row(row) && !is_expansion_row(row) && !is_placeholder_row(row);
}

}  // namespace srp

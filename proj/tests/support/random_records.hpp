#pragma once

#include <random>
#include <vector>

#include "srpkit/records.hpp"

namespace srp::mock {

// Randomised records covering nulls, unicode, list cells and extra columns.
std::vector<WordRow> random_word_rows(std::mt19937_64& rng, std::size_t n, bool extras = true);
std::vector<SegmentRecord> random_segment_records(std::mt19937_64& rng, std::size_t n,
                                                  bool extras = true);
std::vector<SegmentPairRecord> random_pair_records(std::mt19937_64& rng, std::size_t n,
                                                   bool extras = true);

}  // namespace srp::mock

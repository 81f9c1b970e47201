#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace scale {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

struct Segment {
  std::size_t index = 0;  // 1-based
  std::size_t start = 0;  // 0-based source offset, inclusive
  TokenSequence tokens;

  std::size_t end() const { return start + tokens.size(); }
};

// Overlapping windows over a token sequence. All segments except possibly
// the last advance by stride = L - O. The last one is anchored to end at the
// final token, so it only has fewer than L tokens when the whole input does.
struct SegmentSet {
  std::size_t chunk_len = 0;  // L
  std::size_t overlap = 0;    // O
  std::size_t source_len = 0;
  std::vector<Segment> segments;

  std::size_t stride() const { return chunk_len - overlap; }
  std::size_t count() const { return segments.size(); }
};

// Number of segments segment() emits for an input of n tokens.
std::size_t segment_count(std::size_t n, std::size_t chunk_len, std::size_t overlap);

// Throws ConfigError unless chunk_len >= 2 and overlap < chunk_len, and
// InputError for an empty input.
SegmentSet segment(const TokenSequence& tokens, std::size_t chunk_len, std::size_t overlap);

// Inverse of segment(): first segment whole, then from each later segment
// only the positions not yet emitted. Throws ContractViolation on gaps or
// out-of-order offsets.
TokenSequence reconstruct(const SegmentSet& set);

// {"L":…, "O":…, "segments":[{"i":…, "start":…, "len":…[, "tokens":[…]]}]}
nlohmann::ordered_json to_json(const SegmentSet& set, bool with_tokens = false);

}  // namespace scale

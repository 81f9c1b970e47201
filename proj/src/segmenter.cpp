#include "scale/segmenter.hpp"

#include <string>

#include "scale/errors.hpp"

namespace scale {

namespace {

void validate_window(std::size_t chunk_len, std::size_t overlap) {
  if (chunk_len < 2) {
    throw ConfigError("chunk length must be at least 2, got " + std::to_string(chunk_len));
  }
  if (overlap >= chunk_len) {
    throw ConfigError("overlap " + std::to_string(overlap) + " >= chunk length " +
                      std::to_string(chunk_len) + ": stride would be non-positive");
  }
}

}  // namespace

std::size_t segment_count(std::size_t n, std::size_t chunk_len, std::size_t overlap) {
  validate_window(chunk_len, overlap);
  if (n <= chunk_len) return 1;
  const std::size_t stride = chunk_len - overlap;
  return (n - overlap + stride - 1) / stride;
}

SegmentSet segment(const TokenSequence& tokens, std::size_t chunk_len, std::size_t overlap) {
  validate_window(chunk_len, overlap);
  if (tokens.empty()) throw InputError("cannot segment an empty token sequence");

  SegmentSet set;
  set.chunk_len = chunk_len;
  set.overlap = overlap;
  set.source_len = tokens.size();

  const std::size_t n = tokens.size();
  auto emit = [&](std::size_t start, std::size_t len) {
    Segment s;
    s.index = set.segments.size() + 1;
    s.start = start;
    s.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                    tokens.begin() + static_cast<std::ptrdiff_t>(start + len));
    set.segments.push_back(std::move(s));
  };

  if (n <= chunk_len) {
    emit(0, n);
    return set;
  }
  const std::size_t stride = chunk_len - overlap;
  std::size_t start = 0;
  while (start + chunk_len < n) {
    emit(start, chunk_len);
    start += stride;
  }
  emit(n - chunk_len, chunk_len);
  return set;
}

TokenSequence reconstruct(const SegmentSet& set) {
  TokenSequence out;
  out.reserve(set.source_len);
  std::size_t emitted = 0;
  for (const Segment& s : set.segments) {
    if (s.start > emitted) {
      throw ContractViolation("segment " + std::to_string(s.index) + " starts at " +
                              std::to_string(s.start) + " leaving a gap after position " +
                              std::to_string(emitted));
    }
    if (!out.empty() && s.start + s.tokens.size() < emitted) {
      throw ContractViolation("segment " + std::to_string(s.index) +
                              " ends before already emitted positions");
    }
    for (std::size_t p = emitted; p < s.end(); ++p) out.push_back(s.tokens[p - s.start]);
    if (s.end() > emitted) emitted = s.end();
  }
  if (set.source_len != 0 && out.size() != set.source_len) {
    throw ContractViolation("segments cover " + std::to_string(out.size()) + " of " +
                            std::to_string(set.source_len) + " source tokens");
  }
  return out;
}

nlohmann::ordered_json to_json(const SegmentSet& set, bool with_tokens) {
  nlohmann::ordered_json j;
  j["L"] = set.chunk_len;
  j["O"] = set.overlap;
  auto& segs = j["segments"] = nlohmann::ordered_json::array();
  for (const Segment& s : set.segments) {
    nlohmann::ordered_json e;
    e["i"] = s.index;
    e["start"] = s.start;
    e["len"] = s.tokens.size();
    if (with_tokens) e["tokens"] = s.tokens;
    segs.push_back(std::move(e));
  }
  return j;
}

}  // namespace scale

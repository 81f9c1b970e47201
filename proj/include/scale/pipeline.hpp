#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scale/cumulation.hpp"
#include "scale/decoder.hpp"
#include "scale/encoder.hpp"
#include "scale/segmenter.hpp"

namespace scale {

// Every hyperparameter of a run. Defaults follow the reference setting:
// L = 1024, O = 150, k = 1, m = 300, alpha = 0.5, on toy-sized models.
struct PipelineConfig {
  std::size_t chunk_len = 1024;
  std::size_t overlap = 150;
  FusionConfig fusion;
  EncoderConfig encoder;
  DecoderConfig decoder;
  std::uint64_t seed = 0;

  // O < L, 2k + m <= L, 0 <= alpha <= 1, encoder.max_len >= L, matching
  // encoder/decoder widths. Throws ConfigError.
  void validate() const;
};

// Re-derives the encoder, decoder and middle-sampling seeds from `seed` so a
// single number pins the whole run.
PipelineConfig with_seed(PipelineConfig cfg, std::uint64_t seed);

struct StageTimings {
  double encode_seconds = 0.0;
  // Boundary extraction, contexts, fusion, middle sampling and assembly.
  double fuse_seconds = 0.0;
};

struct DocumentResult {
  SegmentSet segments;
  std::vector<ChunkEncoding> encodings;
  BoundarySet boundaries;
  FusedSequence fused;
  StageTimings timings;
};

// segment -> encode_all -> extract -> fuse -> sample middles -> assemble.
// `middle_seed` overrides cfg.fusion.middle_seed (callers mix in a document
// key so documents draw independent middles).
DocumentResult run_document(const TokenSequence& tokens, const PipelineConfig& cfg,
                            const EncoderWeights& weights, std::uint64_t middle_seed,
                            std::size_t workers = 1);

// C * (2k + m) and C * L for an input of n tokens, from arithmetic alone.
struct RowCounts {
  std::size_t chunks = 0;
  std::size_t scale_rows = 0;
  std::size_t naive_rows = 0;

  double ratio() const {
    return static_cast<double>(scale_rows) / static_cast<double>(naive_rows);
  }
};
RowCounts compare_naive_concat(std::size_t n, const PipelineConfig& cfg);

}  // namespace scale

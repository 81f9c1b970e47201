#include "scale/pipeline.hpp"

#include <chrono>
#include <string>

#include "scale/errors.hpp"

namespace scale {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (chunk_len < 2) throw ConfigError("chunk length L must be at least 2");
  if (overlap >= chunk_len) {
    throw ConfigError("overlap O = " + std::to_string(overlap) + " must be below L = " +
                      std::to_string(chunk_len));
  }
  fusion.validate(chunk_len);
  encoder.validate();
  decoder.validate();
  if (encoder.max_len < chunk_len) {
    throw ConfigError("encoder max_len " + std::to_string(encoder.max_len) +
                      " is shorter than L = " + std::to_string(chunk_len));
  }
  if (decoder.d_model != encoder.d_model) {
    throw ConfigError("decoder d_model must equal encoder d_model");
  }
}

PipelineConfig with_seed(PipelineConfig cfg, std::uint64_t seed) {
  const SeededRng root(seed);
  cfg.seed = seed;
  cfg.encoder.seed = root.split(1);
  cfg.decoder.seed = root.split(2);
  cfg.fusion.middle_seed = root.split(3);
  return cfg;
}

DocumentResult run_document(const TokenSequence& tokens, const PipelineConfig& cfg,
                            const EncoderWeights& weights, std::uint64_t middle_seed,
                            std::size_t workers) {
  DocumentResult r;
  r.segments = segment(tokens, cfg.chunk_len, cfg.overlap);

  auto t0 = Clock::now();
  r.encodings = encode_all(r.segments, weights, cfg.encoder, workers);
  r.timings.encode_seconds = seconds_since(t0);

  t0 = Clock::now();
  r.boundaries = fuse(extract_all(r.encodings, cfg.fusion.k, cfg.fusion.allow_short_chunks),
                      cfg.fusion.alpha);
  const auto middles = sample_all_middles(r.encodings, cfg.fusion.m, cfg.fusion.k, middle_seed);
  r.fused = assemble(r.boundaries, middles, cfg.fusion.m);
  r.timings.fuse_seconds = seconds_since(t0);
  return r;
}

RowCounts compare_naive_concat(std::size_t n, const PipelineConfig& cfg) {
  RowCounts rc;
  rc.chunks = segment_count(n, cfg.chunk_len, cfg.overlap);
  rc.scale_rows = rc.chunks * (2 * cfg.fusion.k + cfg.fusion.m);
  rc.naive_rows = rc.chunks * cfg.chunk_len;
  return rc;
}

}  // namespace scale

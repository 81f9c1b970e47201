#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scale/cumulation.hpp"
#include "scale/encoder.hpp"
#include "scale/pipeline.hpp"
#include "scale/segmenter.hpp"

namespace scale {

// Plain ROUGE: exact token match, no stemming, no stopword removal.
struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge(double precision, double recall);

// Clipped n-gram overlap. Either side shorter than n gives an all-zero score.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n);

// LCS-based; empty input on either side gives zero.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

std::vector<std::string> split_whitespace(const std::string& line);

// Linear readout from fused left boundaries to (centered) chunk index.
struct ProbeResult {
  double alpha = 0.0;
  double mse = 0.0;
  std::vector<double> targets;      // chunk index minus the per-document mean
  std::vector<double> predictions;  // same order as targets
};

constexpr double kProbeRidge = 1e-8;

// Fits w minimizing |X w - y|^2 + ridge |w|^2 in closed form, where each row
// of X is one chunk's flattened L'_i and y its centered index, pooled over
// all given documents. Documents with fewer than `min_chunks` are skipped.
// Throws NumericalError if no rows remain or the normal equations are
// singular even after the ridge.
ProbeResult fit_position_probe(std::span<const BoundarySet> fused_docs, double alpha,
                               std::size_t min_chunks = 1);

// Runs the pipeline on each document and fits the probe. Every document must
// split into at least 3 chunks with identical token content, otherwise
// ContractViolation.
ProbeResult position_probe(std::span<const TokenSequence> docs, double alpha,
                           const PipelineConfig& cfg, const EncoderWeights& weights);

// A document of exactly `chunks` segments under (L, O) whose segments all
// hold the same tokens: period L - O repeated until length (C - 1)(L - O) + L.
TokenSequence identical_chunk_document(std::size_t chunks, std::size_t chunk_len,
                                       std::size_t overlap, std::size_t vocab_size,
                                       std::uint64_t seed);

}  // namespace scale

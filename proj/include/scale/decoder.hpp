#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scale/cumulation.hpp"
#include "scale/matrix.hpp"
#include "scale/segmenter.hpp"
#include "scale/transformer.hpp"

namespace scale {

struct DecoderConfig {
  std::size_t vocab_size = 1024;
  std::size_t d_model = 32;
  std::size_t n_heads = 4;
  std::size_t n_layers = 2;
  std::size_t d_ff = 64;
  std::size_t max_len = 256;  // longest prefix accepted
  std::uint64_t seed = 1;

  void validate() const;
};

struct DecoderLayer {
  nn::AttentionWeights self_attention;
  nn::AttentionWeights cross_attention;
  nn::FeedForwardWeights ffn;
};

struct DecoderWeights {
  Matrix embedding;  // vocab_size x d_model
  std::vector<DecoderLayer> layers;
  Matrix output;     // d_model x vocab_size
};

DecoderWeights init_decoder_weights(const DecoderConfig& cfg);

struct DecodeStep {
  Matrix logits;           // 1 x vocab_size, for the token after the prefix
  Matrix cross_attention;  // prefix length x memory rows, last layer, head mean
};

// One pre-norm decoder pass: causal self-attention over the prefix, then
// cross-attention over every row of the fused memory as-is, then the
// feed-forward block.
// Throws ConfigError when the memory width differs from d_model and
// ContractViolation when the memory's provenance does not cover its rows.
DecodeStep decode_step(std::span<const TokenId> prefix, const FusedSequence& memory,
                       const DecoderWeights& w, const DecoderConfig& cfg);

// Repeated argmax decoding starting from `start`; returns the generated
// tokens (not including `start`).
std::vector<TokenId> greedy_decode(TokenId start, std::size_t steps, const FusedSequence& memory,
                                   const DecoderWeights& w, const DecoderConfig& cfg);

// Sums attention columns by source chunk. Result is queries x chunk_count;
// chunk_count defaults to the largest chunk index in the provenance.
Matrix attention_mass_by_chunk(const Matrix& cross_attention,
                               std::span<const RowProvenance> provenance,
                               std::size_t chunk_count = 0);

}  // namespace scale

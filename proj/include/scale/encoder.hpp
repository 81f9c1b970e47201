#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "scale/matrix.hpp"
#include "scale/segmenter.hpp"
#include "scale/transformer.hpp"

namespace scale {

struct EncoderConfig {
  std::size_t vocab_size = 1024;
  std::size_t d_model = 32;
  std::size_t n_heads = 4;
  std::size_t n_layers = 2;
  std::size_t d_ff = 64;
  std::size_t max_len = 1024;
  std::uint64_t seed = 0;

  // Throws ConfigError on d_model % n_heads != 0 or zero-sized dimensions.
  void validate() const;
};

struct EncoderLayer {
  nn::AttentionWeights attention;
  nn::FeedForwardWeights ffn;
};

// Frozen random stand-in for a pretrained encoder. The embedding table is
// drawn N(0, 1) (a lookup has fan-in 1); every projection is N(0, 1/fan_in).
struct EncoderWeights {
  Matrix embedding;  // vocab_size x d_model
  std::vector<EncoderLayer> layers;

  friend bool operator==(const EncoderWeights& a, const EncoderWeights& b);
};

// Top-layer hidden states of one segment; one row per token.
struct ChunkEncoding {
  std::size_t chunk_index = 0;  // 1-based, matches Segment::index
  std::size_t start = 0;        // source offset of row 0
  Matrix hidden;

  std::size_t length() const { return hidden.rows(); }
};

EncoderWeights init_weights(const EncoderConfig& cfg);

// Pre-norm transformer forward pass. Positions restart at 0 for every call.
// Throws InputError for token ids >= vocab_size and ConfigError when the
// segment exceeds max_len.
ChunkEncoding encode(const Segment& seg, const EncoderWeights& w, const EncoderConfig& cfg,
                     const nn::AttentionHook& hook = {});

// Encodes each segment independently. workers > 1 spreads chunks over
// threads; output order and values do not depend on the worker count.
std::vector<ChunkEncoding> encode_all(const SegmentSet& set, const EncoderWeights& w,
                                      const EncoderConfig& cfg, std::size_t workers = 1);

// Dumps every tensor as <name>.txt in the matrix text format plus a
// manifest.txt with one "name rows cols" line per tensor.
void save_weights(const std::filesystem::path& dir, const EncoderWeights& w);
EncoderWeights load_weights(const std::filesystem::path& dir, const EncoderConfig& cfg);

}  // namespace scale

#include "scale/decoder.hpp"

#include <algorithm>
#include <string>

#include "scale/errors.hpp"

namespace scale {

void DecoderConfig::validate() const {
  if (vocab_size == 0 || d_model == 0 || n_heads == 0 || n_layers == 0 || d_ff == 0 ||
      max_len == 0) {
    throw ConfigError("decoder dimensions must all be positive");
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("decoder d_model " + std::to_string(d_model) +
                      " is not divisible by n_heads " + std::to_string(n_heads));
  }
}

DecoderWeights init_decoder_weights(const DecoderConfig& cfg) {
  cfg.validate();
  SeededRng rng(cfg.seed);
  DecoderWeights w;
  w.embedding = Matrix(cfg.vocab_size, cfg.d_model);
  for (double& v : w.embedding.data()) v = rng.normal();
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    DecoderLayer layer;
    layer.self_attention = nn::init_attention(rng, cfg.d_model);
    layer.cross_attention = nn::init_attention(rng, cfg.d_model);
    layer.ffn = nn::init_feed_forward(rng, cfg.d_model, cfg.d_ff);
    w.layers.push_back(std::move(layer));
  }
  w.output = nn::gaussian_init(rng, cfg.d_model, cfg.vocab_size);
  return w;
}

DecodeStep decode_step(std::span<const TokenId> prefix, const FusedSequence& memory,
                       const DecoderWeights& w, const DecoderConfig& cfg) {
  if (prefix.empty()) throw ContractViolation("decode_step: empty prefix");
  if (prefix.size() > cfg.max_len) {
    throw ConfigError("decode_step: prefix of " + std::to_string(prefix.size()) +
                      " tokens exceeds decoder max_len " + std::to_string(cfg.max_len));
  }
  if (memory.width() != cfg.d_model) {
    throw ConfigError("decode_step: memory width " + std::to_string(memory.width()) +
                      " does not match decoder d_model " + std::to_string(cfg.d_model));
  }
  std::size_t block_rows = 0;
  for (const Matrix& b : memory.blocks) block_rows += b.rows();
  if (memory.rows() == 0 || memory.provenance.size() != memory.rows() ||
      block_rows != memory.rows()) {
    throw ContractViolation("decode_step: memory has " + std::to_string(memory.rows()) +
                            " rows but " + std::to_string(memory.provenance.size()) +
                            " provenance entries and " + std::to_string(block_rows) +
                            " block rows");
  }

  const std::size_t n = prefix.size();
  Matrix x = nn::sinusoidal_positions(n, cfg.d_model);
  for (std::size_t p = 0; p < n; ++p) {
    if (prefix[p] >= w.embedding.rows()) {
      throw InputError("decode_step: token id " + std::to_string(prefix[p]) +
                       " is outside the decoder vocabulary");
    }
    auto emb = w.embedding.row(prefix[p]);
    auto dst = x.row(p);
    for (std::size_t c = 0; c < cfg.d_model; ++c) dst[c] += emb[c];
  }

  DecodeStep out;
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const DecoderLayer& layer = w.layers[l];
    const bool last = l + 1 == w.layers.size();
    const Matrix normed = layer_norm(x);
    x += nn::multi_head_attention(normed, normed, layer.self_attention, cfg.n_heads, true).output;
    auto cross = nn::multi_head_attention(layer_norm(x), memory.flattened, layer.cross_attention,
                                          cfg.n_heads, false, last);
    x += cross.output;
    if (last) out.cross_attention = std::move(cross.mean_weights);
    x += nn::feed_forward(layer_norm(x), layer.ffn);
  }
  const Matrix final_state = layer_norm(x).slice_rows(n - 1, n);
  out.logits = matmul(final_state, w.output);
  return out;
}

std::vector<TokenId> greedy_decode(TokenId start, std::size_t steps, const FusedSequence& memory,
                                   const DecoderWeights& w, const DecoderConfig& cfg) {
  std::vector<TokenId> prefix{start};
  for (std::size_t s = 0; s < steps && prefix.size() < cfg.max_len; ++s) {
    const DecodeStep step = decode_step(prefix, memory, w, cfg);
    auto logits = step.logits.row(0);
    // max_element returns the first maximum, so ties go to the lowest id.
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    prefix.push_back(static_cast<TokenId>(best));
  }
  return {prefix.begin() + 1, prefix.end()};
}

Matrix attention_mass_by_chunk(const Matrix& cross_attention,
                               std::span<const RowProvenance> provenance,
                               std::size_t chunk_count) {
  if (cross_attention.cols() != provenance.size()) {
    throw ContractViolation("attention_mass_by_chunk: " + std::to_string(cross_attention.cols()) +
                            " attention columns vs " + std::to_string(provenance.size()) +
                            " provenance rows");
  }
  std::size_t max_chunk = 0;
  for (const RowProvenance& p : provenance) {
    if (p.chunk == 0) throw ContractViolation("attention_mass_by_chunk: chunk indices are 1-based");
    max_chunk = std::max(max_chunk, p.chunk);
  }
  if (chunk_count == 0) chunk_count = max_chunk;
  if (max_chunk > chunk_count) {
    throw ContractViolation("attention_mass_by_chunk: provenance names chunk " +
                            std::to_string(max_chunk) + " of " + std::to_string(chunk_count));
  }
  Matrix mass(cross_attention.rows(), chunk_count);
  for (std::size_t q = 0; q < cross_attention.rows(); ++q) {
    auto row = cross_attention.row(q);
    for (std::size_t c = 0; c < row.size(); ++c) mass(q, provenance[c].chunk - 1) += row[c];
  }
  return mass;
}

}  // namespace scale

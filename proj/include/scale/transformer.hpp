#pragma once

#include <cstddef>
#include <functional>

#include "scale/matrix.hpp"
#include "scale/rng.hpp"

// Building blocks shared by the toy encoder and decoder.
namespace scale::nn {

// Called with the post-softmax weights of one head (queries x keys).
using AttentionHook =
    std::function<void(std::size_t layer, std::size_t head, const Matrix& weights)>;

struct AttentionWeights {
  Matrix wq, wk, wv, wo;  // d_model x d_model each
};

struct FeedForwardWeights {
  Matrix w1;  // d_model x d_ff
  Matrix w2;  // d_ff x d_model
};

// rows x cols matrix of N(0, 1/fan_in) draws, fan_in = rows.
Matrix gaussian_init(SeededRng& rng, std::size_t rows, std::size_t cols);

AttentionWeights init_attention(SeededRng& rng, std::size_t d_model);
FeedForwardWeights init_feed_forward(SeededRng& rng, std::size_t d_model, std::size_t d_ff);

// Standard sin/cos table; row p encodes position p.
Matrix sinusoidal_positions(std::size_t len, std::size_t d_model);

struct AttentionResult {
  Matrix output;        // queries x d_model
  Matrix mean_weights;  // queries x keys, averaged over heads (only if requested)
};

// Scaled dot-product multi-head attention from `queries` onto `memory`.
// With `causal`, query i only sees keys 0..i.
AttentionResult multi_head_attention(const Matrix& queries, const Matrix& memory,
                                     const AttentionWeights& w, std::size_t n_heads, bool causal,
                                     bool keep_mean_weights = false,
                                     const AttentionHook& hook = {}, std::size_t layer = 0);

// GELU(x W1) W2
Matrix feed_forward(const Matrix& x, const FeedForwardWeights& w);

}  // namespace scale::nn

#include "scale/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scale/errors.hpp"

namespace scale::nn {

Matrix gaussian_init(SeededRng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& v : m.data()) v = rng.normal() * scale;
  return m;
}

AttentionWeights init_attention(SeededRng& rng, std::size_t d_model) {
  AttentionWeights w;
  w.wq = gaussian_init(rng, d_model, d_model);
  w.wk = gaussian_init(rng, d_model, d_model);
  w.wv = gaussian_init(rng, d_model, d_model);
  w.wo = gaussian_init(rng, d_model, d_model);
  return w;
}

FeedForwardWeights init_feed_forward(SeededRng& rng, std::size_t d_model, std::size_t d_ff) {
  FeedForwardWeights w;
  w.w1 = gaussian_init(rng, d_model, d_ff);
  w.w2 = gaussian_init(rng, d_ff, d_model);
  return w;
}

Matrix sinusoidal_positions(std::size_t len, std::size_t d_model) {
  Matrix pe(len, d_model);
  for (std::size_t p = 0; p < len; ++p) {
    for (std::size_t i = 0; i < d_model; ++i) {
      const double pair = static_cast<double>(i / 2 * 2);
      const double angle =
          static_cast<double>(p) / std::pow(10000.0, pair / static_cast<double>(d_model));
      pe(p, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

AttentionResult multi_head_attention(const Matrix& queries, const Matrix& memory,
                                     const AttentionWeights& w, std::size_t n_heads, bool causal,
                                     bool keep_mean_weights, const AttentionHook& hook,
                                     std::size_t layer) {
  const std::size_t d = w.wq.rows();
  if (queries.cols() != d || memory.cols() != d) {
    throw ConfigError("attention: input width does not match d_model " + std::to_string(d));
  }
  if (n_heads == 0 || d % n_heads != 0) {
    throw ConfigError("attention: d_model must be divisible by n_heads");
  }
  const std::size_t nq = queries.rows();
  const std::size_t nk = memory.rows();
  const std::size_t dh = d / n_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  const Matrix q = matmul(queries, w.wq);
  const Matrix kt = matmul(memory, w.wk).transpose();  // d x nk
  const Matrix v = matmul(memory, w.wv);

  AttentionResult result;
  Matrix heads(nq, d);
  if (keep_mean_weights) result.mean_weights = Matrix(nq, nk);
  Matrix scores(nq, nk);

  for (std::size_t h = 0; h < n_heads; ++h) {
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < nq; ++i) {
      double* row = scores.row(i).data();
      std::fill(row, row + nk, 0.0);
      for (std::size_t t = 0; t < dh; ++t) {
        const double qv = q(i, off + t) * inv_sqrt;
        const double* krow = kt.row(off + t).data();
        for (std::size_t j = 0; j < nk; ++j) row[j] += qv * krow[j];
      }
      if (causal) {
        for (std::size_t j = i + 1; j < nk; ++j) row[j] = -std::numeric_limits<double>::infinity();
      }
    }
    const Matrix probs = row_softmax(scores);
    if (hook) hook(layer, h, probs);
    if (keep_mean_weights) result.mean_weights += probs;

    for (std::size_t i = 0; i < nq; ++i) {
      double* dst = heads.row(i).data() + off;
      const double* prow = probs.row(i).data();
      for (std::size_t j = 0; j < nk; ++j) {
        const double p = prow[j];
        const double* vrow = v.row(j).data() + off;
        for (std::size_t t = 0; t < dh; ++t) dst[t] += p * vrow[t];
      }
    }
  }
  if (keep_mean_weights) result.mean_weights *= 1.0 / static_cast<double>(n_heads);
  result.output = matmul(heads, w.wo);
  return result;
}

Matrix feed_forward(const Matrix& x, const FeedForwardWeights& w) {
  Matrix hidden = matmul(x, w.w1);
  for (double& v : hidden.data()) v = 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2));
  return matmul(hidden, w.w2);
}

}  // namespace scale::nn

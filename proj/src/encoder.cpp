#include "scale/encoder.hpp"

#include <fstream>
#include <string>
#include <utility>

#include "scale/errors.hpp"
#include "scale/parallel.hpp"

namespace scale {

namespace {

// Canonical tensor order for dumps; works for const and mutable weights.
template <typename Weights>
auto named_tensors(Weights& w) {
  using Ptr = decltype(&w.embedding);
  std::vector<std::pair<std::string, Ptr>> out;
  out.emplace_back("embedding", &w.embedding);
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    auto& layer = w.layers[l];
    out.emplace_back(p + "wq", &layer.attention.wq);
    out.emplace_back(p + "wk", &layer.attention.wk);
    out.emplace_back(p + "wv", &layer.attention.wv);
    out.emplace_back(p + "wo", &layer.attention.wo);
    out.emplace_back(p + "w1", &layer.ffn.w1);
    out.emplace_back(p + "w2", &layer.ffn.w2);
  }
  return out;
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size == 0 || d_model == 0 || n_heads == 0 || n_layers == 0 || d_ff == 0 ||
      max_len == 0) {
    throw ConfigError("encoder dimensions must all be positive");
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("d_model " + std::to_string(d_model) + " is not divisible by n_heads " +
                      std::to_string(n_heads));
  }
}

bool operator==(const EncoderWeights& a, const EncoderWeights& b) {
  if (a.layers.size() != b.layers.size()) return false;
  const auto ta = named_tensors(a);
  const auto tb = named_tensors(b);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!(*ta[i].second == *tb[i].second)) return false;
  }
  return true;
}

EncoderWeights init_weights(const EncoderConfig& cfg) {
  cfg.validate();
  SeededRng rng(cfg.seed);
  EncoderWeights w;
  w.embedding = Matrix(cfg.vocab_size, cfg.d_model);
  for (double& v : w.embedding.data()) v = rng.normal();
  w.layers.reserve(cfg.n_layers);
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    EncoderLayer layer;
    layer.attention = nn::init_attention(rng, cfg.d_model);
    layer.ffn = nn::init_feed_forward(rng, cfg.d_model, cfg.d_ff);
    w.layers.push_back(std::move(layer));
  }
  return w;
}

ChunkEncoding encode(const Segment& seg, const EncoderWeights& w, const EncoderConfig& cfg,
                     const nn::AttentionHook& hook) {
  const std::size_t len = seg.tokens.size();
  if (len > cfg.max_len) {
    throw ConfigError("segment of " + std::to_string(len) + " tokens exceeds encoder max_len " +
                      std::to_string(cfg.max_len));
  }
  if (w.embedding.cols() != cfg.d_model || w.layers.size() != cfg.n_layers) {
    throw ConfigError("encoder weights do not match the encoder config");
  }

  Matrix x = nn::sinusoidal_positions(len, cfg.d_model);
  for (std::size_t p = 0; p < len; ++p) {
    const TokenId tok = seg.tokens[p];
    if (tok >= w.embedding.rows()) {
      throw InputError("token id " + std::to_string(tok) + " at chunk " +
                       std::to_string(seg.index) + " position " + std::to_string(p) +
                       " is outside the vocabulary of " + std::to_string(w.embedding.rows()));
    }
    auto emb = w.embedding.row(tok);
    auto dst = x.row(p);
    for (std::size_t c = 0; c < cfg.d_model; ++c) dst[c] += emb[c];
  }

  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const EncoderLayer& layer = w.layers[l];
    const Matrix normed = layer_norm(x);
    x += nn::multi_head_attention(normed, normed, layer.attention, cfg.n_heads, false, false,
                                  hook, l)
             .output;
    x += nn::feed_forward(layer_norm(x), layer.ffn);
  }

  ChunkEncoding out;
  out.chunk_index = seg.index;
  out.start = seg.start;
  out.hidden = layer_norm(x);
  return out;
}

std::vector<ChunkEncoding> encode_all(const SegmentSet& set, const EncoderWeights& w,
                                      const EncoderConfig& cfg, std::size_t workers) {
  std::vector<ChunkEncoding> out(set.segments.size());
  parallel_for(set.segments.size(), workers,
               [&](std::size_t i) { out[i] = encode(set.segments[i], w, cfg); });
  return out;
}

void save_weights(const std::filesystem::path& dir, const EncoderWeights& w) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw InputError("cannot write " + (dir / "manifest.txt").string());
  for (const auto& [name, m] : named_tensors(w)) {
    manifest << name << ' ' << m->rows() << ' ' << m->cols() << '\n';
    std::ofstream f(dir / (name + ".txt"));
    if (!f) throw InputError("cannot write tensor " + name);
    write_matrix(f, *m);
  }
}

EncoderWeights load_weights(const std::filesystem::path& dir, const EncoderConfig& cfg) {
  cfg.validate();
  EncoderWeights w;
  w.layers.resize(cfg.n_layers);
  std::ifstream manifest(dir / "manifest.txt");
  if (!manifest) throw InputError("missing " + (dir / "manifest.txt").string());

  std::size_t loaded = 0;
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  const auto expected = named_tensors(w);
  while (manifest >> name >> rows >> cols) {
    if (loaded >= expected.size() || expected[loaded].first != name) {
      throw InputError("unexpected tensor '" + name + "' in weight manifest");
    }
    std::ifstream f(dir / (name + ".txt"));
    if (!f) throw InputError("missing tensor file for " + name);
    Matrix m = read_matrix(f);
    if (m.rows() != rows || m.cols() != cols) {
      throw InputError("tensor " + name + " shape disagrees with manifest");
    }
    *expected[loaded].second = std::move(m);
    ++loaded;
  }
  if (loaded != expected.size()) {
    throw InputError("weight manifest lists " + std::to_string(loaded) + " of " +
                     std::to_string(expected.size()) + " tensors");
  }
  if (w.embedding.rows() != cfg.vocab_size || w.embedding.cols() != cfg.d_model) {
    throw ConfigError("loaded embedding shape does not match the encoder config");
  }
  return w;
}

}  // namespace scale

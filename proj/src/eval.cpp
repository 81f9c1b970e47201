#include "scale/eval.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "scale/errors.hpp"
#include "scale/rng.hpp"

namespace scale {

namespace {

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  std::map<Gram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                  tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

RougeScore make_rouge(double precision, double recall) {
  RougeScore s{precision, recall, 0.0};
  if (precision + recall > 0.0) s.f1 = 2.0 * precision * recall / (precision + recall);
  return s;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n) {
  if (n < 1) throw ConfigError("rouge_n: n must be at least 1");
  if (candidate.size() < n || reference.size() < n) return {};
  const auto cand = count_ngrams(candidate, n);
  const auto ref = count_ngrams(reference, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const double cand_total = static_cast<double>(candidate.size() - n + 1);
  const double ref_total = static_cast<double>(reference.size() - n + 1);
  return make_rouge(static_cast<double>(overlap) / cand_total,
                    static_cast<double>(overlap) / ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  return make_rouge(lcs / static_cast<double>(candidate.size()),
                    lcs / static_cast<double>(reference.size()));
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

ProbeResult fit_position_probe(std::span<const BoundarySet> fused_docs, double alpha,
                               std::size_t min_chunks) {
  std::vector<std::vector<double>> features;
  ProbeResult result;
  result.alpha = alpha;
  for (const BoundarySet& doc : fused_docs) {
    if (!doc.is_fused()) throw ContractViolation("position probe needs fused boundaries");
    const std::size_t c = doc.count();
    if (c < min_chunks || c == 0) continue;
    const double mean = static_cast<double>(c + 1) / 2.0;
    for (std::size_t i = 1; i <= c; ++i) {
      auto data = doc.fused_left[i - 1].data();
      features.emplace_back(data.begin(), data.end());
      result.targets.push_back(static_cast<double>(i) - mean);
    }
  }
  if (features.empty()) throw NumericalError("position probe: no documents with enough chunks");
  const std::size_t dim = features.front().size();
  for (const auto& f : features) {
    if (f.size() != dim) throw ConfigError("position probe: feature widths differ across chunks");
  }

  Matrix gram(dim, dim);
  std::vector<double> rhs(dim, 0.0);
  for (std::size_t r = 0; r < features.size(); ++r) {
    const auto& f = features[r];
    for (std::size_t a = 0; a < dim; ++a) {
      rhs[a] += f[a] * result.targets[r];
      for (std::size_t b = 0; b < dim; ++b) gram(a, b) += f[a] * f[b];
    }
  }
  const std::vector<double> w = solve_spd(gram, rhs, kProbeRidge);

  double sse = 0.0;
  for (std::size_t r = 0; r < features.size(); ++r) {
    double pred = 0.0;
    for (std::size_t a = 0; a < dim; ++a) pred += features[r][a] * w[a];
    result.predictions.push_back(pred);
    sse += (pred - result.targets[r]) * (pred - result.targets[r]);
  }
  result.mse = sse / static_cast<double>(features.size());
  return result;
}

ProbeResult position_probe(std::span<const TokenSequence> docs, double alpha,
                           const PipelineConfig& cfg, const EncoderWeights& weights) {
  PipelineConfig run = cfg;
  run.fusion.alpha = alpha;
  run.fusion.m = 0;
  std::vector<BoundarySet> fused;
  fused.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const SegmentSet segs = segment(docs[d], run.chunk_len, run.overlap);
    if (segs.count() < 3) {
      throw ContractViolation("position probe: document " + std::to_string(d) + " has " +
                              std::to_string(segs.count()) + " chunks, need at least 3");
    }
    for (const Segment& s : segs.segments) {
      if (s.tokens != segs.segments.front().tokens) {
        throw ContractViolation("position probe: document " + std::to_string(d) +
                                " does not consist of identical chunks");
      }
    }
    const auto encodings = encode_all(segs, weights, run.encoder);
    fused.push_back(fuse(extract_all(encodings, run.fusion.k), alpha));
  }
  return fit_position_probe(fused, alpha);
}

TokenSequence identical_chunk_document(std::size_t chunks, std::size_t chunk_len,
                                       std::size_t overlap, std::size_t vocab_size,
                                       std::uint64_t seed) {
  if (chunks < 1 || overlap >= chunk_len || vocab_size == 0) {
    throw ConfigError("identical_chunk_document: invalid shape");
  }
  const std::size_t stride = chunk_len - overlap;
  SeededRng rng(seed);
  TokenSequence period(stride);
  for (TokenId& t : period) t = static_cast<TokenId>(rng.uniform_index(vocab_size));
  TokenSequence doc((chunks - 1) * stride + chunk_len);
  for (std::size_t p = 0; p < doc.size(); ++p) doc[p] = period[p % stride];
  return doc;
}

}  // namespace scale

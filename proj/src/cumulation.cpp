#include "scale/cumulation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "scale/errors.hpp"

namespace scale {

namespace {

void check_index(const BoundarySet& b, std::size_t i, const char* what) {
  if (i < 1 || i > b.count()) {
    throw ContractViolation(std::string(what) + ": chunk index " + std::to_string(i) +
                            " outside [1, " + std::to_string(b.count()) + "]");
  }
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

// acc += L_j + R_j for the chunk in `slot`. The per-index and scan paths both
// walk slots in the same order through this, so they round identically.
void accumulate_pairs(const BoundarySet& b, std::size_t slot, Matrix& acc) {
  Matrix pair = b.left[slot];
  pair += b.right[slot];
  acc += pair;
}

Matrix blend(const Matrix& local, const Matrix& ctx, double alpha) {
  Matrix out = local;
  auto dst = out.data();
  auto src = ctx.data();
  for (std::size_t e = 0; e < dst.size(); ++e) dst[e] = alpha * dst[e] + (1.0 - alpha) * src[e];
  return out;
}

Matrix average(Matrix own, const Matrix& others, std::size_t count) {
  own += others;
  for (double& v : own.data()) v /= static_cast<double>(count);
  return own;
}

}  // namespace

void FusionConfig::validate(std::size_t chunk_len) const {
  if (k < 1) throw ConfigError("boundary width k must be at least 1");
  check_alpha(alpha);
  if (2 * k + m > chunk_len) {
    throw ConfigError("2k + m = " + std::to_string(2 * k + m) + " exceeds chunk length " +
                      std::to_string(chunk_len));
  }
}

BoundarySet BoundarySet::from_blocks(std::vector<Matrix> left, std::vector<Matrix> right) {
  if (left.size() != right.size()) {
    throw ContractViolation("from_blocks: " + std::to_string(left.size()) + " left vs " +
                            std::to_string(right.size()) + " right blocks");
  }
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (left[i].rows() != left[0].rows() || left[i].cols() != left[0].cols() ||
        right[i].rows() != left[0].rows() || right[i].cols() != left[0].cols()) {
      throw ConfigError("from_blocks: boundary blocks must share one k x d shape");
    }
  }
  BoundarySet b;
  b.left = std::move(left);
  b.right = std::move(right);
  const std::size_t k = b.left.empty() ? 0 : b.left[0].rows();
  for (std::size_t i = 0; i < b.left.size(); ++i) b.spans.push_back({i + 1, 0, 2 * k});
  b.overlapping.assign(b.left.size(), false);
  return b;
}

BoundaryPair extract_boundaries(const ChunkEncoding& h, std::size_t k, bool allow_short) {
  if (k < 1) throw ConfigError("boundary width k must be at least 1");
  const std::size_t len = h.length();
  if (len == 0) throw ContractViolation("extract_boundaries: empty chunk encoding");
  BoundaryPair out;
  if (len < 2 * k) {
    if (!allow_short) {
      throw DegenerateChunkError("chunk " + std::to_string(h.chunk_index) + " has " +
                                 std::to_string(len) + " rows, fewer than 2k = " +
                                 std::to_string(2 * k));
    }
    const std::size_t w = std::min(k, len);
    out.left = h.hidden.slice_rows(0, w);
    out.right = h.hidden.slice_rows(len - w, len);
    out.overlapping = true;
    return out;
  }
  out.left = h.hidden.slice_rows(0, k);
  out.right = h.hidden.slice_rows(len - k, len);
  return out;
}

BoundarySet extract_all(std::span<const ChunkEncoding> encodings, std::size_t k,
                        bool allow_short) {
  BoundarySet b;
  for (const ChunkEncoding& h : encodings) {
    BoundaryPair pair = extract_boundaries(h, k, allow_short);
    if (!b.left.empty() && (pair.left.rows() != b.left[0].rows() ||
                            pair.left.cols() != b.left[0].cols())) {
      throw DegenerateChunkError("chunk " + std::to_string(h.chunk_index) +
                                 " yields boundaries of a different shape than chunk 1");
    }
    b.left.push_back(std::move(pair.left));
    b.right.push_back(std::move(pair.right));
    b.spans.push_back({h.chunk_index, h.start, h.length()});
    b.overlapping.push_back(pair.overlapping);
  }
  return b;
}

Matrix backward_context(const BoundarySet& b, std::size_t i) {
  check_index(b, i, "backward_context");
  if (i == 1) return b.left[0];
  Matrix acc(b.left[0].rows(), b.left[0].cols());
  for (std::size_t slot = 0; slot + 1 < i; ++slot) accumulate_pairs(b, slot, acc);
  return average(b.left[i - 1], acc, 2 * i - 1);
}

Matrix forward_context(const BoundarySet& b, std::size_t i) {
  check_index(b, i, "forward_context");
  const std::size_t c = b.count();
  if (i == c) return b.right[c - 1];
  Matrix acc(b.right[0].rows(), b.right[0].cols());
  for (std::size_t slot = c; slot-- > i;) accumulate_pairs(b, slot, acc);
  return average(b.right[i - 1], acc, 2 * (c - i) + 1);
}

BoundarySet compute_contexts(BoundarySet b) {
  const std::size_t c = b.count();
  b.back_ctx.assign(c, Matrix());
  b.fwd_ctx.assign(c, Matrix());
  if (c == 0) return b;

  Matrix acc(b.left[0].rows(), b.left[0].cols());
  b.back_ctx[0] = b.left[0];
  for (std::size_t i = 2; i <= c; ++i) {
    accumulate_pairs(b, i - 2, acc);
    b.back_ctx[i - 1] = average(b.left[i - 1], acc, 2 * i - 1);
  }

  acc = Matrix(b.right[0].rows(), b.right[0].cols());
  b.fwd_ctx[c - 1] = b.right[c - 1];
  for (std::size_t i = c - 1; i >= 1; --i) {
    accumulate_pairs(b, i, acc);
    b.fwd_ctx[i - 1] = average(b.right[i - 1], acc, 2 * (c - i) + 1);
  }
  return b;
}

BoundarySet fuse(BoundarySet b, double alpha) {
  check_alpha(alpha);
  if (!b.has_contexts()) b = compute_contexts(std::move(b));
  const std::size_t c = b.count();
  b.fused_left.resize(c);
  b.fused_right.resize(c);
  for (std::size_t s = 0; s < c; ++s) {
    b.fused_left[s] = blend(b.left[s], b.back_ctx[s], alpha);
    b.fused_right[s] = blend(b.right[s], b.fwd_ctx[s], alpha);
  }
  b.alpha = alpha;
  return b;
}

MiddleSample sample_middle(const ChunkEncoding& h, std::size_t m, std::size_t k, SeededRng& rng) {
  const std::size_t len = h.length();
  const std::size_t lo = std::min(k, len);
  const std::size_t hi = len >= 2 * k ? len - k : lo;

  std::vector<std::size_t> interior(hi - lo);
  std::iota(interior.begin(), interior.end(), lo);

  MiddleSample out;
  const std::size_t take = std::min(m, interior.size());
  out.shortfall = m - take;
  if (take < interior.size()) {
    // Partial Fisher-Yates: the first `take` slots end up a uniform subset.
    for (std::size_t t = 0; t < take; ++t) {
      const std::size_t j = t + static_cast<std::size_t>(rng.uniform_index(interior.size() - t));
      std::swap(interior[t], interior[j]);
    }
    interior.resize(take);
    std::sort(interior.begin(), interior.end());
  }
  out.row_indices = std::move(interior);

  out.rows = Matrix(take, h.hidden.cols());
  for (std::size_t r = 0; r < take; ++r) {
    auto src = h.hidden.row(out.row_indices[r]);
    std::copy(src.begin(), src.end(), out.rows.row(r).begin());
  }
  return out;
}

std::vector<MiddleSample> sample_all_middles(std::span<const ChunkEncoding> encodings,
                                             std::size_t m, std::size_t k, std::uint64_t seed) {
  const SeededRng root(seed);
  std::vector<MiddleSample> out;
  out.reserve(encodings.size());
  for (const ChunkEncoding& h : encodings) {
    SeededRng rng(root.split(h.chunk_index));
    out.push_back(sample_middle(h, m, k, rng));
  }
  return out;
}

std::string_view to_string(RowRole role) {
  switch (role) {
    case RowRole::left:
      return "left";
    case RowRole::middle:
      return "middle";
    case RowRole::right:
      return "right";
  }
  return "?";
}

FusedSequence assemble(const BoundarySet& b, std::span<const MiddleSample> middles,
                       std::size_t m) {
  const std::size_t c = b.count();
  if (!b.is_fused()) throw ContractViolation("assemble: boundaries have not been fused");
  if (middles.size() != c) {
    throw ContractViolation("assemble: " + std::to_string(middles.size()) +
                            " middle blocks for " + std::to_string(c) + " chunks");
  }
  if (b.spans.size() != c) throw ContractViolation("assemble: missing chunk spans");

  FusedSequence seq;
  seq.chunk_count = c;
  seq.k = c ? b.left[0].rows() : 0;
  seq.m = m;
  seq.alpha = b.alpha;
  seq.blocks.reserve(3 * c);
  for (std::size_t s = 0; s < c; ++s) {
    const ChunkSpan& span = b.spans[s];
    const std::size_t width = b.fused_left[s].rows();
    const MiddleSample& mid = middles[s];
    if (mid.rows.rows() != mid.row_indices.size()) {
      throw ContractViolation("assemble: middle block of chunk " + std::to_string(span.index) +
                              " has inconsistent provenance");
    }

    seq.blocks.push_back(b.fused_left[s]);
    for (std::size_t r = 0; r < width; ++r) {
      seq.provenance.push_back({span.index, RowRole::left, span.start + r});
    }
    seq.blocks.push_back(mid.rows);
    for (std::size_t r : mid.row_indices) {
      seq.provenance.push_back({span.index, RowRole::middle, span.start + r});
    }
    seq.blocks.push_back(b.fused_right[s]);
    for (std::size_t r = 0; r < width; ++r) {
      seq.provenance.push_back({span.index, RowRole::right, span.start + span.length - width + r});
    }
    seq.shortfall.push_back(mid.shortfall);
    seq.overlapping.push_back(s < b.overlapping.size() && b.overlapping[s]);
  }
  seq.flattened = vstack(seq.blocks);
  if (seq.flattened.rows() != seq.provenance.size()) {
    throw ContractViolation("assemble: provenance does not align with flattened rows");
  }
  return seq;
}

nlohmann::ordered_json manifest_json(const FusedSequence& seq) {
  nlohmann::ordered_json j;
  j["C"] = seq.chunk_count;
  j["k"] = seq.k;
  j["m"] = seq.m;
  j["alpha"] = seq.alpha;
  j["rows"] = seq.rows();
  j["d"] = seq.width();
  j["shortfall"] = seq.shortfall;
  j["overlapping"] = seq.overlapping;
  j["provenance_columns"] = {"chunk", "role", "source_position"};
  auto& rows = j["provenance"] = nlohmann::ordered_json::array();
  for (const RowProvenance& p : seq.provenance) {
    rows.push_back({p.chunk, std::string(to_string(p.role)), p.source_position});
  }
  return j;
}

FusionJacobian fusion_jacobian(const BoundarySet& b, double alpha, std::size_t i) {
  check_index(b, i, "fusion_jacobian");
  check_alpha(alpha);
  const std::size_t c = b.count();
  FusionJacobian jac;
  jac.chunk = i;
  jac.left_wrt_left.assign(c, 0.0);
  jac.left_wrt_right.assign(c, 0.0);
  jac.right_wrt_left.assign(c, 0.0);
  jac.right_wrt_right.assign(c, 0.0);

  if (i == 1) {
    jac.left_wrt_left[0] = 1.0;
  } else {
    const double share = (1.0 - alpha) / static_cast<double>(2 * i - 1);
    jac.left_wrt_left[i - 1] = alpha + share;
    for (std::size_t j = 1; j < i; ++j) {
      jac.left_wrt_left[j - 1] = share;
      jac.left_wrt_right[j - 1] = share;
    }
  }

  if (i == c) {
    jac.right_wrt_right[c - 1] = 1.0;
  } else {
    const double share = (1.0 - alpha) / static_cast<double>(2 * (c - i) + 1);
    jac.right_wrt_right[i - 1] = alpha + share;
    for (std::size_t j = i + 1; j <= c; ++j) {
      jac.right_wrt_left[j - 1] = share;
      jac.right_wrt_right[j - 1] = share;
    }
  }
  return jac;
}

}  // namespace scale

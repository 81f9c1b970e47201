#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scale/encoder.hpp"
#include "scale/matrix.hpp"
#include "scale/rng.hpp"

namespace scale {

struct FusionConfig {
  std::size_t k = 1;    // boundary width in tokens
  std::size_t m = 300;  // middle rows sampled per chunk
  double alpha = 0.5;   // weight of the local boundary against its directional context
  std::uint64_t middle_seed = 0;
  // Accept chunks shorter than 2k by letting left and right share rows.
  bool allow_short_chunks = false;

  // Throws ConfigError unless k >= 1, 0 <= alpha <= 1 and 2k + m <= chunk_len.
  void validate(std::size_t chunk_len) const;
};

// Where a chunk's rows came from in the source document.
struct ChunkSpan {
  std::size_t index = 0;  // 1-based
  std::size_t start = 0;
  std::size_t length = 0;
};

// Per-chunk boundary blocks. left/right are filled at extraction time,
// back_ctx/fwd_ctx by compute_contexts(), fused_left/fused_right by fuse().
// All blocks are k x d. Chunk i lives at slot i - 1.
struct BoundarySet {
  std::vector<Matrix> left;
  std::vector<Matrix> right;
  std::vector<Matrix> back_ctx;
  std::vector<Matrix> fwd_ctx;
  std::vector<Matrix> fused_left;
  std::vector<Matrix> fused_right;
  std::vector<ChunkSpan> spans;
  std::vector<bool> overlapping;  // left and right share rows (short chunk)
  double alpha = 1.0;             // valid once fused

  std::size_t count() const { return left.size(); }
  bool has_contexts() const { return back_ctx.size() == count() && fwd_ctx.size() == count(); }
  bool is_fused() const { return fused_left.size() == count() && fused_right.size() == count(); }

  // Builds a set straight from boundary blocks. Spans are synthetic: chunk i
  // is treated as 2k rows with left at [0, k) and right at [k, 2k).
  static BoundarySet from_blocks(std::vector<Matrix> left, std::vector<Matrix> right);
};

struct BoundaryPair {
  Matrix left;   // rows [0, k)
  Matrix right;  // rows [len - k, len)
  bool overlapping = false;
};

// Throws DegenerateChunkError when the chunk has fewer than 2k rows unless
// allow_short is set; then both blocks take min(k, len) rows and may overlap.
BoundaryPair extract_boundaries(const ChunkEncoding& h, std::size_t k, bool allow_short = false);

BoundarySet extract_all(std::span<const ChunkEncoding> encodings, std::size_t k,
                        bool allow_short = false);

// (L_i + sum_{j<i} (L_j + R_j)) / (2i - 1); exactly L_1 for i = 1.
// i is 1-based; throws ContractViolation when out of range.
Matrix backward_context(const BoundarySet& b, std::size_t i);

// (R_i + sum_{j>i} (L_j + R_j)) / (2(C - i) + 1); exactly R_C for i = C.
Matrix forward_context(const BoundarySet& b, std::size_t i);

// Both directions for every chunk in one prefix and one suffix pass.
// Produces the same bits as the per-index functions above.
BoundarySet compute_contexts(BoundarySet b);

// L'_i = alpha L_i + (1 - alpha) back_i, R'_i = alpha R_i + (1 - alpha) fwd_i.
// Computes contexts first if they are missing. Throws ConfigError for alpha
// outside [0, 1].
BoundarySet fuse(BoundarySet b, double alpha);

struct MiddleSample {
  Matrix rows;                          // selected hidden states, ascending source order
  std::vector<std::size_t> row_indices; // chunk-relative row of each selected state
  std::size_t shortfall = 0;            // m minus the number of rows actually taken
};

// Draws m distinct rows uniformly from the interior [k, len - k) and keeps
// them in ascending order. Takes the whole interior when it is smaller than m.
MiddleSample sample_middle(const ChunkEncoding& h, std::size_t m, std::size_t k, SeededRng& rng);

// One sample per chunk, chunk i drawing from its own stream split off `seed`
// so the result does not depend on evaluation order.
std::vector<MiddleSample> sample_all_middles(std::span<const ChunkEncoding> encodings,
                                             std::size_t m, std::size_t k, std::uint64_t seed);

enum class RowRole { left, middle, right };
std::string_view to_string(RowRole role);

struct RowProvenance {
  std::size_t chunk = 0;  // 1-based
  RowRole role = RowRole::left;
  std::size_t source_position = 0;

  friend bool operator==(const RowProvenance&, const RowProvenance&) = default;
};

// The decoder memory: [L'_1, M_1, R'_1, ..., L'_C, M_C, R'_C] flattened row-wise.
struct FusedSequence {
  std::size_t chunk_count = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  double alpha = 0.0;
  std::vector<Matrix> blocks;
  Matrix flattened;
  std::vector<RowProvenance> provenance;  // one entry per flattened row
  std::vector<std::size_t> shortfall;     // per chunk
  std::vector<bool> overlapping;          // per chunk

  std::size_t rows() const { return flattened.rows(); }
  std::size_t width() const { return flattened.cols(); }
};

// Throws ContractViolation if the set is not fused or the number of middle
// blocks differs from the chunk count.
FusedSequence assemble(const BoundarySet& b, std::span<const MiddleSample> middles,
                       std::size_t m);

// Manifest half of the on-disk export; the flattened matrix is written
// separately in the matrix text format.
nlohmann::ordered_json manifest_json(const FusedSequence& seq);

// Exact partial derivatives of chunk i's fused blocks. Fusion acts on each
// (row, column) coordinate independently, so one scalar per source block
// describes the whole Jacobian; cross-coordinate entries are zero.
// Slot j - 1 holds the coefficient on chunk j.
struct FusionJacobian {
  std::size_t chunk = 0;
  std::vector<double> left_wrt_left;    // dL'_i / dL_j
  std::vector<double> left_wrt_right;   // dL'_i / dR_j
  std::vector<double> right_wrt_left;   // dR'_i / dL_j
  std::vector<double> right_wrt_right;  // dR'_i / dR_j
};

FusionJacobian fusion_jacobian(const BoundarySet& b, double alpha, std::size_t i);

}  // namespace scale

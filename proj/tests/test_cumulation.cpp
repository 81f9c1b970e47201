#include <algorithm>
#include <cmath>
#include <vector>

#include "cumulation_oracles.hpp"
#include "doctest.h"
#include "scale/cumulation.hpp"
#include "scale/errors.hpp"

using scale::BoundarySet;
using scale::Matrix;

namespace {

BoundarySet scalar_trace() {
  return BoundarySet::from_blocks({Matrix{{1}}, Matrix{{3}}, Matrix{{5}}},
                                  {Matrix{{2}}, Matrix{{4}}, Matrix{{6}}});
}

scale::ChunkEncoding chunk_with_rows(std::size_t rows, std::size_t d, std::size_t index = 1) {
  scale::ChunkEncoding h;
  h.chunk_index = index;
  h.hidden = Matrix(rows, d);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < d; ++c) h.hidden(r, c) = static_cast<double>(100 * r + c);
  return h;
}

}  // namespace

TEST_CASE("extract_boundaries") {
  const auto h = chunk_with_rows(5, 3);
  auto p = scale::extract_boundaries(h, 1);
  CHECK(p.left == h.hidden.slice_rows(0, 1));
  CHECK(p.right == h.hidden.slice_rows(4, 5));
  p = scale::extract_boundaries(h, 2);
  CHECK(p.left == h.hidden.slice_rows(0, 2));
  CHECK(p.right == h.hidden.slice_rows(3, 5));
  CHECK_FALSE(p.overlapping);

  CHECK_THROWS_AS(scale::extract_boundaries(h, 3), scale::DegenerateChunkError);
  p = scale::extract_boundaries(h, 3, true);
  CHECK(p.overlapping);
  CHECK(p.left == h.hidden.slice_rows(0, 3));
  CHECK(p.right == h.hidden.slice_rows(2, 5));
}

TEST_CASE("hand-evaluated scalar trace") {
  const BoundarySet b = scalar_trace();
  CHECK(scale::backward_context(b, 1) == Matrix{{1}});
  CHECK(scale::backward_context(b, 2) == Matrix{{2}});
  CHECK(scale::backward_context(b, 3) == Matrix{{3}});
  CHECK(scale::forward_context(b, 1) == Matrix{{4}});
  CHECK(scale::forward_context(b, 2) == Matrix{{5}});
  CHECK(scale::forward_context(b, 3) == Matrix{{6}});
  const BoundarySet f = scale::fuse(b, 0.5);
  CHECK(f.fused_left[1] == Matrix{{2.5}});
  CHECK_THROWS_AS(scale::backward_context(b, 0), scale::ContractViolation);
  CHECK_THROWS_AS(scale::forward_context(b, 4), scale::ContractViolation);
}

TEST_CASE("single chunk contexts are the local boundaries") {
  scale::SeededRng rng(1);
  const BoundarySet b = oracle::random_boundaries(rng, 1, 2, 4);
  CHECK(scale::backward_context(b, 1) == b.left[0]);
  CHECK(scale::forward_context(b, 1) == b.right[0]);
}

TEST_CASE("constant boundaries give constant contexts") {
  for (std::size_t c = 1; c <= 7; ++c) {
    const Matrix block{{0.75, -1.5}};
    const BoundarySet b = BoundarySet::from_blocks(std::vector<Matrix>(c, block),
                                                   std::vector<Matrix>(c, block));
    for (std::size_t i = 1; i <= c; ++i) {
      CHECK(scale::backward_context(b, i) == block);
      CHECK(scale::forward_context(b, i) == block);
    }
  }
}

TEST_CASE("contexts match the brute-force oracle; scan matches per-index") {
  scale::SeededRng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const std::size_t k = 1 + rng.uniform_index(3);
    const std::size_t d = 1 + rng.uniform_index(8);
    const BoundarySet b = compute_contexts(oracle::random_boundaries(rng, c, k, d));
    for (std::size_t i = 1; i <= c; ++i) {
      const Matrix back = scale::backward_context(b, i);
      const Matrix fwd = scale::forward_context(b, i);
      REQUIRE(max_abs_diff(back, oracle::naive_backward(b, i)) <= 1e-12);
      REQUIRE(max_abs_diff(fwd, oracle::naive_forward(b, i)) <= 1e-12);
      REQUIRE(b.back_ctx[i - 1] == back);
      REQUIRE(b.fwd_ctx[i - 1] == fwd);
    }
  }
}

TEST_CASE("reversal duality") {
  scale::SeededRng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const BoundarySet b = oracle::random_boundaries(rng, c, 1 + rng.uniform_index(3), 3);
    std::vector<Matrix> rev_left(b.right.rbegin(), b.right.rend());
    std::vector<Matrix> rev_right(b.left.rbegin(), b.left.rend());
    const BoundarySet r = BoundarySet::from_blocks(rev_left, rev_right);
    for (std::size_t i = 1; i <= c; ++i) {
      CHECK(max_abs_diff(scale::forward_context(r, c + 1 - i), scale::backward_context(b, i)) <=
            1e-12);
    }
  }
}

TEST_CASE("fusion edge identities") {
  scale::SeededRng rng(4);
  const BoundarySet b = oracle::random_boundaries(rng, 5, 2, 3);
  const BoundarySet id = scale::fuse(b, 1.0);
  for (std::size_t s = 0; s < 5; ++s) {
    CHECK(id.fused_left[s] == b.left[s]);
    CHECK(id.fused_right[s] == b.right[s]);
  }
  const BoundarySet zero = scale::fuse(b, 0.0);
  CHECK(zero.fused_left[0] == b.left[0]);
  CHECK(zero.fused_right[4] == b.right[4]);
  CHECK(zero.back_ctx[0] == b.left[0]);
  CHECK(zero.fwd_ctx[4] == b.right[4]);
  CHECK_THROWS_AS(scale::fuse(b, 1.5), scale::ConfigError);
  CHECK_THROWS_AS(scale::fuse(b, -0.1), scale::ConfigError);
}

TEST_CASE("fusion is linear in the boundaries") {
  scale::SeededRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const std::size_t k = 1 + rng.uniform_index(3);
    const BoundarySet b1 = oracle::random_boundaries(rng, c, k, 4);
    const BoundarySet b2 = oracle::random_boundaries(rng, c, k, 4);
    const double a = 3.0 * rng.uniform() - 1.5;
    const double bb = 3.0 * rng.uniform() - 1.5;
    const double alpha = rng.uniform();
    std::vector<Matrix> l;
    std::vector<Matrix> r;
    for (std::size_t s = 0; s < c; ++s) {
      l.push_back(a * b1.left[s] + bb * b2.left[s]);
      r.push_back(a * b1.right[s] + bb * b2.right[s]);
    }
    const BoundarySet mixed = scale::fuse(BoundarySet::from_blocks(l, r), alpha);
    const BoundarySet f1 = scale::fuse(b1, alpha);
    const BoundarySet f2 = scale::fuse(b2, alpha);
    for (std::size_t s = 0; s < c; ++s) {
      CHECK(max_abs_diff(mixed.fused_left[s], a * f1.fused_left[s] + bb * f2.fused_left[s]) <=
            1e-12);
      CHECK(max_abs_diff(mixed.fused_right[s], a * f1.fused_right[s] + bb * f2.fused_right[s]) <=
            1e-12);
    }
  }
}

TEST_CASE("fused left entries stay inside the contributing range (k=1)") {
  scale::SeededRng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const std::size_t d = 1 + rng.uniform_index(5);
    const BoundarySet f = scale::fuse(oracle::random_boundaries(rng, c, 1, d), rng.uniform());
    for (std::size_t i = 1; i <= c; ++i) {
      for (std::size_t col = 0; col < d; ++col) {
        double lo = f.left[i - 1](0, col);
        double hi = lo;
        for (std::size_t j = 1; j < i; ++j) {
          lo = std::min({lo, f.left[j - 1](0, col), f.right[j - 1](0, col)});
          hi = std::max({hi, f.left[j - 1](0, col), f.right[j - 1](0, col)});
        }
        const double v = f.fused_left[i - 1](0, col);
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("prefix consistency") {
  scale::SeededRng rng(12);
  const std::size_t c = 6;
  const BoundarySet b = oracle::random_boundaries(rng, c, 2, 3);
  for (std::size_t i = 1; i <= c; ++i) {
    BoundarySet later = b;
    for (std::size_t j = i + 1; j <= c; ++j) {
      later.left[j - 1] = oracle::random_block(rng, 2, 3);
      later.right[j - 1] = oracle::random_block(rng, 2, 3);
    }
    CHECK(scale::backward_context(later, i) == scale::backward_context(b, i));
    BoundarySet earlier = b;
    for (std::size_t j = 1; j < i; ++j) {
      earlier.left[j - 1] = oracle::random_block(rng, 2, 3);
      earlier.right[j - 1] = oracle::random_block(rng, 2, 3);
    }
    CHECK(scale::forward_context(earlier, i) == scale::forward_context(b, i));
  }
}

TEST_CASE("identical chunks: alpha=1 blind to position, alpha=0.5 position-aware") {
  const std::size_t c = 5;
  const Matrix l{{1.0, 0.0, 2.0}};
  const Matrix r{{-1.0, 3.0, 0.5}};
  const BoundarySet b = BoundarySet::from_blocks(std::vector<Matrix>(c, l),
                                                 std::vector<Matrix>(c, r));
  const BoundarySet local = scale::fuse(b, 1.0);
  for (std::size_t s = 1; s < c; ++s) CHECK(local.fused_left[s] == local.fused_left[0]);
  const BoundarySet mixed = scale::fuse(b, 0.5);
  for (std::size_t s = 1; s < c; ++s) {
    for (std::size_t t = s + 1; t < c; ++t) {
      CHECK(max_abs_diff(mixed.fused_left[s], mixed.fused_left[t]) > 0.0);
    }
  }
}

TEST_CASE("fusion_jacobian closed forms") {
  scale::SeededRng rng(2);
  const BoundarySet b = oracle::random_boundaries(rng, 3, 1, 1);
  for (double alpha : {0.0, 0.3, 1.0}) {
    CHECK(scale::fusion_jacobian(b, alpha, 1).left_wrt_left[0] == 1.0);
  }
  const auto j2 = scale::fusion_jacobian(b, 0.5, 2);
  CHECK(j2.left_wrt_left[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(j2.left_wrt_right[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(j2.left_wrt_left[1] == doctest::Approx(0.5 + 1.0 / 6.0).epsilon(1e-15));
  CHECK(j2.left_wrt_right[1] == 0.0);
  CHECK(j2.left_wrt_left[2] == 0.0);
  CHECK(j2.right_wrt_right[1] == doctest::Approx(0.5 + 1.0 / 6.0).epsilon(1e-15));
  CHECK(j2.right_wrt_left[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(scale::fusion_jacobian(b, 0.5, 4), scale::ContractViolation);
}

TEST_CASE("fusion_jacobian agrees with central differences") {
  scale::SeededRng rng(31);
  const double h = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const std::size_t k = 1 + rng.uniform_index(2);
    const std::size_t d = 1 + rng.uniform_index(3);
    const double alpha = rng.uniform();
    const BoundarySet b = oracle::random_boundaries(rng, c, k, d);
    const std::size_t i = 1 + rng.uniform_index(c);
    const auto jac = scale::fusion_jacobian(b, alpha, i);
    for (std::size_t j = 1; j <= c; ++j) {
      for (int side = 0; side < 2; ++side) {
        // Perturb coordinate (0, 0) of L_j or R_j; compare all of L'_i, R'_i.
        BoundarySet plus = b;
        BoundarySet minus = b;
        auto& p = side == 0 ? plus.left[j - 1] : plus.right[j - 1];
        auto& m = side == 0 ? minus.left[j - 1] : minus.right[j - 1];
        p(0, 0) += h;
        m(0, 0) -= h;
        const Matrix dl = (1.0 / (2 * h)) * (oracle::naive_fused_left(plus, i, alpha) -
                                             oracle::naive_fused_left(minus, i, alpha));
        const Matrix dr = (1.0 / (2 * h)) * (oracle::naive_fused_right(plus, i, alpha) -
                                             oracle::naive_fused_right(minus, i, alpha));
        const double el = side == 0 ? jac.left_wrt_left[j - 1] : jac.left_wrt_right[j - 1];
        const double er = side == 0 ? jac.right_wrt_left[j - 1] : jac.right_wrt_right[j - 1];
        CHECK(std::abs(dl(0, 0) - el) <= 1e-6);
        CHECK(std::abs(dr(0, 0) - er) <= 1e-6);
        // Other coordinates are untouched.
        for (std::size_t e = 1; e < dl.size(); ++e) {
          CHECK(std::abs(dl.data()[e]) <= 1e-6);
          CHECK(std::abs(dr.data()[e]) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("sample_middle") {
  const auto h = chunk_with_rows(20, 2);
  scale::SeededRng rng(1);
  const auto none = scale::sample_middle(h, 0, 1, rng);
  CHECK(none.rows.rows() == 0);
  CHECK(none.shortfall == 0);

  const auto all = scale::sample_middle(h, 50, 2, rng);
  CHECK(all.row_indices.size() == 16);
  CHECK(all.shortfall == 34);
  for (std::size_t t = 0; t < 16; ++t) CHECK(all.row_indices[t] == t + 2);
  CHECK(all.rows == h.hidden.slice_rows(2, 18));

  scale::SeededRng a(42);
  scale::SeededRng b(42);
  const auto s1 = scale::sample_middle(h, 6, 1, a);
  const auto s2 = scale::sample_middle(h, 6, 1, b);
  CHECK(s1.row_indices == s2.row_indices);
  CHECK(s1.row_indices.size() == 6);
  CHECK(std::is_sorted(s1.row_indices.begin(), s1.row_indices.end()));
  CHECK(std::adjacent_find(s1.row_indices.begin(), s1.row_indices.end()) ==
        s1.row_indices.end());
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(s1.row_indices[t] >= 1);
    CHECK(s1.row_indices[t] < 19);
    CHECK(s1.rows.slice_rows(t, t + 1) ==
          h.hidden.slice_rows(s1.row_indices[t], s1.row_indices[t] + 1));
  }
}

TEST_CASE("sample_middle is uniform over the interior") {
  const auto h = chunk_with_rows(12, 1);
  scale::SeededRng rng(100);
  std::vector<int> hits(12, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    for (std::size_t r : scale::sample_middle(h, 3, 1, rng).row_indices) ++hits[r];
  }
  CHECK(hits[0] == 0);
  CHECK(hits[11] == 0);
  // Each of the 10 interior rows is picked with probability 3/10.
  for (std::size_t r = 1; r < 11; ++r) CHECK(std::abs(hits[r] / double(trials) - 0.3) < 0.02);
}

TEST_CASE("assemble block order, length and provenance") {
  std::vector<scale::ChunkEncoding> enc;
  for (std::size_t i = 0; i < 3; ++i) {
    auto h = chunk_with_rows(6, 8, i + 1);
    h.start = 4 * i;
    for (double& v : h.hidden.data()) v += 1000.0 * static_cast<double>(i);
    enc.push_back(h);
  }
  const BoundarySet f = scale::fuse(scale::extract_all(enc, 1), 0.5);
  const auto middles = scale::sample_all_middles(enc, 2, 1, 9);
  const auto seq = scale::assemble(f, middles, 2);
  CHECK(seq.rows() == 12);
  CHECK(seq.width() == 8);
  REQUIRE(seq.blocks.size() == 9);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(seq.blocks[3 * i] == f.fused_left[i]);
    CHECK(seq.blocks[3 * i + 1] == middles[i].rows);
    CHECK(seq.blocks[3 * i + 2] == f.fused_right[i]);
    CHECK(seq.provenance[4 * i] == scale::RowProvenance{i + 1, scale::RowRole::left, 4 * i});
    CHECK(seq.provenance[4 * i + 3] ==
          scale::RowProvenance{i + 1, scale::RowRole::right, 4 * i + 5});
    CHECK(seq.provenance[4 * i + 1].role == scale::RowRole::middle);
    CHECK(seq.provenance[4 * i + 1].source_position ==
          4 * i + middles[i].row_indices[0]);
  }
  CHECK(seq.flattened.slice_rows(4, 5) == f.fused_left[1]);

  CHECK_THROWS_AS(scale::assemble(f, std::span(middles).first(2), 2), scale::ContractViolation);
  CHECK_THROWS_AS(scale::assemble(scale::extract_all(enc, 1), middles, 2),
                  scale::ContractViolation);
}

TEST_CASE("single chunk without middles assembles to two rows") {
  std::vector<scale::ChunkEncoding> enc{chunk_with_rows(5, 4)};
  const BoundarySet f = scale::fuse(scale::extract_all(enc, 1), 0.5);
  const auto seq = scale::assemble(f, scale::sample_all_middles(enc, 0, 1, 1), 0);
  CHECK(seq.rows() == 2);
  CHECK(seq.flattened.slice_rows(0, 1) == enc[0].hidden.slice_rows(0, 1));
  CHECK(seq.flattened.slice_rows(1, 2) == enc[0].hidden.slice_rows(4, 5));
}

TEST_CASE("manifest JSON carries the provenance table") {
  std::vector<scale::ChunkEncoding> enc{chunk_with_rows(5, 2)};
  const BoundarySet f = scale::fuse(scale::extract_all(enc, 1), 0.25);
  const auto seq = scale::assemble(f, scale::sample_all_middles(enc, 1, 1, 3), 1);
  const auto j = scale::manifest_json(seq);
  CHECK(j["C"] == 1);
  CHECK(j["rows"] == 3);
  CHECK(j["alpha"] == 0.25);
  CHECK(j["provenance"][0].dump() == R"([1,"left",0])");
  CHECK(j["provenance"][2].dump() == R"([1,"right",4])");
}

TEST_CASE("FusionConfig validation") {
  scale::FusionConfig f;
  f.k = 1;
  f.m = 300;
  CHECK_NOTHROW(f.validate(1024));
  CHECK_NOTHROW(f.validate(302));
  CHECK_THROWS_AS(f.validate(301), scale::ConfigError);
  f.k = 0;
  CHECK_THROWS_AS(f.validate(1024), scale::ConfigError);
  f.k = 1;
  f.alpha = 2.0;
  CHECK_THROWS_AS(f.validate(1024), scale::ConfigError);
}

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cumulation_oracles.hpp"
#include "eval_oracles.hpp"
#include "scale/bench.hpp"
#include "scale/commands.hpp"
#include "scale/cumulation.hpp"
#include "scale/eval.hpp"
#include "scale/pipeline.hpp"
#include "scale/segmenter.hpp"

namespace fs = std::filesystem;
using scale::BoundarySet;
using scale::Matrix;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Verdict context_oracle() {
  const auto t0 = Clock::now();
  scale::SeededRng rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const std::size_t k = 1 + rng.uniform_index(3);
    const std::size_t d = 1 + rng.uniform_index(8);
    const BoundarySet b = oracle::random_boundaries(rng, c, k, d);
    for (std::size_t i = 1; i <= c; ++i) {
      worst = std::max(worst, max_abs_diff(scale::backward_context(b, i), oracle::naive_backward(b, i)));
      worst = std::max(worst, max_abs_diff(scale::forward_context(b, i), oracle::naive_forward(b, i)));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 5.0, "max err " + fmt(worst) + ", " + fmt(t) + " s"};
}

Verdict edge_identities() {
  scale::SeededRng rng(3);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const BoundarySet b = oracle::random_boundaries(rng, c, 1 + rng.uniform_index(3), 4);
    ok &= scale::backward_context(b, 1) == b.left[0];
    ok &= scale::forward_context(b, c) == b.right[c - 1];
    const BoundarySet id = scale::fuse(b, 1.0);
    for (std::size_t s = 0; s < c; ++s) {
      ok &= id.fused_left[s] == b.left[s];
      ok &= id.fused_right[s] == b.right[s];
    }
    ok &= scale::fuse(b, 0.0).fused_left[0] == b.left[0];
  }
  return {ok, "bitwise over 100 sets"};
}

Verdict scalar_trace() {
  const BoundarySet b = BoundarySet::from_blocks({Matrix{{1}}, Matrix{{3}}, Matrix{{5}}},
                                                 {Matrix{{2}}, Matrix{{4}}, Matrix{{6}}});
  const BoundarySet f = scale::fuse(b, 0.5);
  bool ok = true;
  for (std::size_t i = 0; i < 3; ++i) {
    ok &= f.back_ctx[i] == Matrix{{static_cast<double>(i + 1)}};
    ok &= f.fwd_ctx[i] == Matrix{{static_cast<double>(i + 4)}};
  }
  ok &= f.fused_left[1] == Matrix{{2.5}};
  return {ok, "L'_2 = " + fmt(f.fused_left[1](0, 0))};
}

Verdict jacobian_check() {
  scale::SeededRng rng(404);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 1 + rng.uniform_index(6);
    const std::size_t k = 1 + rng.uniform_index(3);
    const std::size_t d = 1 + rng.uniform_index(4);
    const double alpha = rng.uniform();
    const BoundarySet b = oracle::random_boundaries(rng, c, k, d);
    const std::size_t i = 1 + rng.uniform_index(c);
    const std::size_t row = rng.uniform_index(k);
    const std::size_t col = rng.uniform_index(d);
    const auto jac = scale::fusion_jacobian(b, alpha, i);
    for (std::size_t j = 1; j <= c; ++j) {
      for (int side = 0; side < 2; ++side) {
        BoundarySet plus = b;
        BoundarySet minus = b;
        (side == 0 ? plus.left : plus.right)[j - 1](row, col) += h;
        (side == 0 ? minus.left : minus.right)[j - 1](row, col) -= h;
        const double dl = (oracle::naive_fused_left(plus, i, alpha)(row, col) -
                           oracle::naive_fused_left(minus, i, alpha)(row, col)) / (2 * h);
        const double dr = (oracle::naive_fused_right(plus, i, alpha)(row, col) -
                           oracle::naive_fused_right(minus, i, alpha)(row, col)) / (2 * h);
        const double el = side == 0 ? jac.left_wrt_left[j - 1] : jac.left_wrt_right[j - 1];
        const double er = side == 0 ? jac.right_wrt_left[j - 1] : jac.right_wrt_right[j - 1];
        worst = std::max({worst, std::abs(dl - el), std::abs(dr - er)});
      }
    }
  }
  return {worst <= 1e-6, "max err " + fmt(worst)};
}

Verdict assembly_length() {
  std::size_t cases = 0;
  std::size_t bad = 0;
  const std::size_t d = 3;
  for (std::size_t c = 1; c <= 8; ++c) {
    for (std::size_t k = 1; k <= 3; ++k) {
      for (std::size_t m = 0; m <= 16; ++m) {
        // Chunk lengths from the minimum 2k + m up to a few rows more.
        std::vector<scale::ChunkEncoding> enc;
        for (std::size_t i = 0; i < c; ++i) {
          scale::ChunkEncoding h;
          h.chunk_index = i + 1;
          h.start = 10 * i;
          h.hidden = Matrix(2 * k + m + (i % 3), d, static_cast<double>(i));
          enc.push_back(std::move(h));
        }
        const BoundarySet f = scale::fuse(scale::extract_all(enc, k), 0.5);
        const auto seq = scale::assemble(f, scale::sample_all_middles(enc, m, k, c + k + m), m);
        ++cases;
        if (seq.rows() != c * (2 * k + m) || seq.provenance.size() != seq.rows()) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(cases) + " grid points, " + std::to_string(bad) + " wrong"};
}

Verdict segmentation_round_trip() {
  scale::SeededRng rng(606);
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(20000);
    const std::size_t l = 2 + rng.uniform_index(2047);
    const std::size_t o = rng.uniform_index(l);
    scale::TokenSequence x(n);
    for (auto& t : x) t = static_cast<scale::TokenId>(rng.uniform_index(1u << 20));
    const auto s = scale::segment(x, l, o);
    bool ok = scale::reconstruct(s) == x;
    ok &= s.segments.front().start == 0 && s.segments.back().end() == n;
    for (std::size_t i = 0; i + 1 < s.count(); ++i) {
      const std::size_t shared = s.segments[i].end() - s.segments[i + 1].start;
      ok &= s.segments[i + 1].start <= s.segments[i].end();
      ok &= i + 2 < s.count() ? shared == o : shared >= o;
    }
    for (const auto& seg : s.segments) ok &= seg.tokens.size() == std::min(n, l);
    bad += !ok;
  }
  return {bad == 0, "200 triples, " + std::to_string(bad) + " failures"};
}

scale::PipelineConfig reference_pipeline() {
  scale::PipelineConfig cfg;
  cfg.chunk_len = 1024;
  cfg.overlap = 150;
  cfg.fusion.k = 1;
  cfg.fusion.m = 300;
  cfg.fusion.alpha = 0.5;
  cfg.encoder.vocab_size = 1024;
  cfg.encoder.d_model = 32;
  cfg.encoder.n_heads = 4;
  cfg.encoder.n_layers = 2;
  cfg.encoder.d_ff = 64;
  cfg.encoder.max_len = 1024;
  cfg.decoder.vocab_size = 1024;
  cfg.decoder.d_model = 32;
  return scale::with_seed(cfg, 0);
}

Verdict linear_scaling() {
  const auto t0 = Clock::now();
  const std::vector<std::size_t> ns{8192, 16384, 32768, 65536};
  scale::BenchOptions opts;
  opts.workers = 1;
  const auto report = scale::run_scaling(ns, reference_pipeline(), opts);
  const double t = seconds_since(t0);
  const bool ok = report.slope >= 0.8 && report.slope <= 1.3 && report.fuse_encode_ratio < 0.05 &&
                  t < 300.0;
  return {ok, "slope " + fmt(report.slope) + ", fuse/encode " + fmt(report.fuse_encode_ratio) +
                  ", " + fmt(t) + " s"};
}

Verdict compression() {
  const auto cfg = reference_pipeline();
  bool ok = true;
  for (std::size_t n = 1; n <= 200000; n += 997) {
    const auto counts = scale::compare_naive_concat(n, cfg);
    ok &= counts.ratio() == 302.0 / 1024.0;
    ok &= counts.scale_rows == counts.chunks * 302;
  }
  return {ok, "ratio 302/1024 for every C tested"};
}

Verdict structural_awareness() {
  scale::PipelineConfig cfg;
  cfg.chunk_len = 64;
  cfg.overlap = 16;
  cfg.fusion.k = 1;
  cfg.fusion.m = 0;
  cfg.encoder.vocab_size = 128;
  cfg.encoder.d_model = 32;
  cfg.encoder.n_heads = 4;
  cfg.encoder.d_ff = 64;
  cfg.encoder.max_len = 64;
  cfg.decoder.vocab_size = 128;
  cfg.decoder.d_model = 32;
  cfg = scale::with_seed(cfg, 9);
  const auto w = scale::init_weights(cfg.encoder);
  const std::size_t c = 5;

  std::vector<scale::TokenSequence> docs;
  for (std::uint64_t s = 0; s < 4; ++s) {
    docs.push_back(scale::identical_chunk_document(c, 64, 16, 128, 100 + s));
  }
  const auto doc = scale::run_document(docs[0], cfg, w, 1);
  if (doc.segments.count() != c) return {false, "identical-chunk document has wrong chunk count"};
  const BoundarySet half = scale::fuse(doc.boundaries, 0.5);
  const BoundarySet one = scale::fuse(doc.boundaries, 1.0);
  bool distinct = true;
  bool identical = true;
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a + 1; b < c; ++b) {
      distinct &= !(half.fused_left[a] == half.fused_left[b]);
      identical &= one.fused_left[a] == one.fused_left[b];
    }
  }
  const double pooled_half = scale::position_probe(docs, 0.5, cfg, w).mse;
  const double pooled_one = scale::position_probe(docs, 1.0, cfg, w).mse;
  const std::vector<scale::TokenSequence> single{docs[0]};
  const double single_half = scale::position_probe(single, 0.5, cfg, w).mse;
  const bool ok = distinct && identical && pooled_half < pooled_one && single_half < 1e-6;
  return {ok, std::string("distinct@0.5 ") + (distinct ? "yes" : "no") + ", identical@1.0 " +
                  (identical ? "yes" : "no") + ", mse(0.5)=" + fmt(pooled_half) +
                  " mse(1.0)=" + fmt(pooled_one) + ", single-doc mse(0.5)=" + fmt(single_half) +
                  " (needs < 1e-6)"};
}

Verdict rouge_correctness() {
  using scale::split_whitespace;
  bool ok = true;
  ok &= scale::rouge_n(split_whitespace("the cat"), split_whitespace("the cat sat"), 1).f1 ==
        2.0 * (2.0 / 3.0) / (1.0 + 2.0 / 3.0);
  ok &= std::abs(scale::rouge_n(split_whitespace("the cat"), split_whitespace("the cat sat"), 1).f1 -
                 0.8) <= 1e-15;
  ok &= scale::rouge_l(split_whitespace("a b c d"), split_whitespace("a c b d")).f1 == 0.75;
  const auto same = split_whitespace("x y z w");
  ok &= scale::rouge_n(same, same, 1).f1 == 1.0 && scale::rouge_n(same, same, 2).f1 == 1.0 &&
        scale::rouge_l(same, same).f1 == 1.0;
  const auto other = split_whitespace("p q r");
  ok &= scale::rouge_n(same, other, 1).f1 == 0.0 && scale::rouge_l(same, other).f1 == 0.0;

  scale::SeededRng rng(1010);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> a(rng.uniform_index(13));
    std::vector<std::string> b(rng.uniform_index(13));
    for (auto& t : a) t = std::string(1, static_cast<char>('a' + rng.uniform_index(4)));
    for (auto& t : b) t = std::string(1, static_cast<char>('a' + rng.uniform_index(4)));
    disagreements += scale::lcs_length(a, b) != oracle::brute_force_lcs(a, b);
  }
  ok &= disagreements == 0;
  return {ok, "hand cases exact, " + std::to_string(disagreements) + "/200 LCS disagreements"};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "scale_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path corpus = dir / "corpus.jsonl";
  {
    std::ofstream out(corpus);
    const auto doc = scale::random_document(3000, 500, 17);
    out << R"({"id": "random", "tokens": [)";
    for (std::size_t i = 0; i < doc.size(); ++i) out << (i ? "," : "") << doc[i];
    out << "]}\n";
    out << R"({"id": "prose", "text": "it was the best of times it was the worst of times )"
           R"(it was the age of wisdom it was the age of foolishness"})" "\n";
  }
  scale::RunConfig cfg;
  cfg.pipeline.chunk_len = 256;
  cfg.pipeline.overlap = 32;
  cfg.pipeline.fusion.m = 40;
  cfg.pipeline.seed = 5;
  std::ostringstream log;
  cfg.out_dir = (dir / "run_a").string();
  scale::cmd_pipeline(cfg, corpus, log);
  cfg.out_dir = (dir / "run_b").string();
  cfg.workers = 4;
  scale::cmd_pipeline(cfg, corpus, log);
  const auto a = snapshot(dir / "run_a");
  const auto b = snapshot(dir / "run_b");
  fs::remove_all(dir);
  return {!a.empty() && a == b, std::to_string(a.size()) + " files compared"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"context equations match brute-force oracle", context_oracle},
      {"edge identities", edge_identities},
      {"hand-worked scalar trace", scalar_trace},
      {"fusion Jacobian vs central differences", jacobian_check},
      {"assembly length C(2k+m)", assembly_length},
      {"segmentation round-trip", segmentation_round_trip},
      {"linear scaling", linear_scaling},
      {"compression ratio 302/1024", compression},
      {"structural awareness", structural_awareness},
      {"ROUGE correctness", rouge_correctness},
      {"determinism of pipeline artifacts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first
              << " (" << v.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}

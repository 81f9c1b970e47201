#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"
#include "scale/pipeline.hpp"

namespace scale {

struct BenchOptions {
  std::size_t repeats = 3;  // median over this many timed runs per N
  bool warmup = true;       // one discarded run before timing each N
  std::size_t workers = 1;  // > 1 parallelizes chunk encoding; slope is then not judged
  std::uint64_t doc_seed = 7;
  double min_smallest_total = 0.05;  // seconds; below this the fit is flagged unreliable
  double slope_lo = 0.8;
  double slope_hi = 1.3;
  double max_fuse_ratio = 0.05;  // fuse / encode at the largest N
};

struct ScalingRow {
  std::size_t n = 0;
  std::size_t chunks = 0;
  double encode_seconds = 0.0;
  double fuse_seconds = 0.0;
  double total_seconds = 0.0;
  std::size_t scale_rows = 0;  // rows of the assembled decoder memory
  std::size_t naive_rows = 0;  // C * L
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // least-squares slope of log(total) against log(N)
  double fuse_encode_ratio = 0.0;
  double compression_ratio = 0.0;  // scale_rows / naive_rows at the largest N
  bool reliable = true;
  bool slope_checked = true;
  bool pass = false;
};

// Least-squares slope of log(y) on log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

// Median of a non-empty sample.
double median(std::vector<double> values);

// Times the full encode + fuse pipeline on uniform random documents of each
// length. Ns must be strictly increasing with at least 4 points
// (ConfigError otherwise).
ScalingReport run_scaling(std::span<const std::size_t> ns, const PipelineConfig& cfg,
                          const BenchOptions& opts = {});

// Columns: N,C,encode_s,fuse_s,total_s,scale_rows,naive_rows
void write_scaling_csv(std::ostream& out, const ScalingReport& report);

// {"slope": …, "pass": …} plus the supporting figures.
nlohmann::ordered_json verdict_json(const ScalingReport& report);

TokenSequence random_document(std::size_t n, std::size_t vocab_size, std::uint64_t seed);

}  // namespace scale

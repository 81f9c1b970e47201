#include "scale/bench.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "scale/errors.hpp"
#include "scale/matrix.hpp"
#include "scale/rng.hpp"

namespace scale {

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("fit_loglog_slope: need at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("fit_loglog_slope: non-positive value");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw NumericalError("fit_loglog_slope: all x values coincide");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractViolation("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

TokenSequence random_document(std::size_t n, std::size_t vocab_size, std::uint64_t seed) {
  SeededRng rng(seed);
  TokenSequence doc(n);
  for (TokenId& t : doc) t = static_cast<TokenId>(rng.uniform_index(vocab_size));
  return doc;
}

ScalingReport run_scaling(std::span<const std::size_t> ns, const PipelineConfig& cfg,
                          const BenchOptions& opts) {
  if (ns.size() < 4) throw ConfigError("run_scaling: need at least 4 input lengths");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) throw ConfigError("run_scaling: lengths must be strictly increasing");
  }
  if (opts.repeats == 0) throw ConfigError("run_scaling: repeats must be positive");
  cfg.validate();

  const EncoderWeights weights = init_weights(cfg.encoder);
  ScalingReport report;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const std::size_t n = ns[idx];
    const TokenSequence doc = random_document(n, cfg.encoder.vocab_size, opts.doc_seed + idx);
    if (opts.warmup) run_document(doc, cfg, weights, cfg.fusion.middle_seed, opts.workers);

    std::vector<double> encode;
    std::vector<double> fuse_s;
    std::vector<double> total;
    ScalingRow row;
    row.n = n;
    for (std::size_t r = 0; r < opts.repeats; ++r) {
      const DocumentResult res = run_document(doc, cfg, weights, cfg.fusion.middle_seed,
                                              opts.workers);
      encode.push_back(res.timings.encode_seconds);
      fuse_s.push_back(res.timings.fuse_seconds);
      total.push_back(res.timings.encode_seconds + res.timings.fuse_seconds);
      row.chunks = res.segments.count();
      row.scale_rows = res.fused.rows();
    }
    row.naive_rows = row.chunks * cfg.chunk_len;
    row.encode_seconds = median(encode);
    row.fuse_seconds = median(fuse_s);
    row.total_seconds = median(total);
    report.rows.push_back(row);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const ScalingRow& r : report.rows) {
    xs.push_back(static_cast<double>(r.n));
    ys.push_back(r.total_seconds);
  }
  report.slope = fit_loglog_slope(xs, ys);
  const ScalingRow& last = report.rows.back();
  report.fuse_encode_ratio = last.fuse_seconds / last.encode_seconds;
  report.compression_ratio =
      static_cast<double>(last.scale_rows) / static_cast<double>(last.naive_rows);
  report.reliable = report.rows.front().total_seconds >= opts.min_smallest_total;
  report.slope_checked = opts.workers <= 1;

  const bool slope_ok = !report.slope_checked ||
                        (report.slope >= opts.slope_lo && report.slope <= opts.slope_hi);
  report.pass = report.reliable && slope_ok && report.fuse_encode_ratio < opts.max_fuse_ratio;
  return report;
}

void write_scaling_csv(std::ostream& out, const ScalingReport& report) {
  out << "N,C,encode_s,fuse_s,total_s,scale_rows,naive_rows\n";
  for (const ScalingRow& r : report.rows) {
    out << r.n << ',' << r.chunks << ',' << format_double(r.encode_seconds) << ','
        << format_double(r.fuse_seconds) << ',' << format_double(r.total_seconds) << ','
        << r.scale_rows << ',' << r.naive_rows << '\n';
  }
}

nlohmann::ordered_json verdict_json(const ScalingReport& report) {
  nlohmann::ordered_json j;
  j["slope"] = report.slope;
  j["pass"] = report.pass;
  j["fuse_encode_ratio"] = report.fuse_encode_ratio;
  j["compression_ratio"] = report.compression_ratio;
  j["reliable"] = report.reliable;
  j["slope_checked"] = report.slope_checked;
  return j;
}

}  // namespace scale

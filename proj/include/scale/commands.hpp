#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "scale/bench.hpp"
#include "scale/run_config.hpp"

// Implementations behind the `scale` command-line subcommands.
namespace scale {

struct PipelineRunSummary {
  std::size_t documents = 0;
  std::string config_hash;
  std::filesystem::path out_dir;
};

// Writes, under cfg.out_dir:
//   config.json, config_hash.txt, run.json, vocab.txt (text corpora only)
//   docs/<id>/manifest.json   FusedSequence manifest plus segment table
//   docs/<id>/fused.txt       flattened decoder memory, matrix text format
//   docs/<id>/decode.json     greedy decoder demo tokens
//   docs/<id>/attention_mass.csv
// Nothing time- or machine-dependent is written, so equal configs give
// byte-identical directories. An empty corpus only logs a warning.
PipelineRunSummary cmd_pipeline(const RunConfig& cfg, const std::filesystem::path& corpus,
                                std::ostream& log);

// One JSON line per document: {"id":…, "L":…, "O":…, "segments":[…]}.
void cmd_segment(const RunConfig& cfg, const std::filesystem::path& corpus, bool with_tokens,
                 std::ostream& out);

// axis is one of "alpha", "m", "O". Invalid values are reported on `log` and
// skipped. CSV columns: <axis>,probe_mse,scale_rows,fuse_seconds. probe_mse
// pools every document with at least 3 chunks and is "nan" when none has.
void cmd_ablate(const RunConfig& cfg, std::string_view axis, std::span<const std::string> values,
                const std::filesystem::path& corpus, std::ostream& csv, std::ostream& log);

ScalingReport cmd_bench(const RunConfig& cfg, std::span<const std::size_t> ns,
                        const BenchOptions& opts, std::ostream& csv, std::ostream& verdict);

// Both files hold one summary per line. CSV: line,rouge1_f1,rouge2_f1,rougeL_f1
// with a final "mean" row. Throws InputError if the line counts differ.
void cmd_rouge(const std::filesystem::path& candidates, const std::filesystem::path& references,
               std::ostream& csv);

// Position probe on generated identical-chunk documents, one result per alpha.
nlohmann::ordered_json cmd_probe(const RunConfig& cfg, std::size_t chunks, std::size_t docs,
                                 std::span<const double> alphas);

// The documents cmd_probe uses, as a JSONL corpus.
void write_identical_chunk_corpus(const RunConfig& cfg, std::size_t chunks, std::size_t docs,
                                  std::ostream& out);

}  // namespace scale

// scale: command-line front end for the span-cumulation pipeline.
//
//   scale segment  corpus.jsonl [--with-tokens]
//   scale pipeline corpus.jsonl [--out-dir DIR]
//   scale ablate   corpus.jsonl --axis alpha|m|O --values v1,v2,...
//   scale bench    [--ns 8192,16384,32768,65536] [--csv-out FILE]
//   scale rouge    candidates.txt references.txt
//   scale probe    [--chunks 5] [--docs 1] [--alphas 0.5,1.0] [--write-corpus FILE]
//
// Hyperparameter flags (--chunk-len, --overlap, --k, --m, --alpha, --seed,
// --workers, --out-dir, ...) are accepted before or after the subcommand.
// Each can also come from a --config JSON file or a SCALE_<NAME> environment
// variable; flags win over the environment, which wins over the file.
//
// Exit codes: 0 success, 1 input or configuration error, 2 internal contract
// violation.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scale/commands.hpp"
#include "scale/errors.hpp"

namespace {

using scale::RunConfig;

RunConfig build_config(const std::string& config_path,
                       const std::map<std::string, std::optional<std::string>>& flags) {
  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw scale::InputError("cannot open config file " + config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw scale::ConfigError("config file " + config_path + ": " + e.what());
    }
    scale::apply_json_config(cfg, j);
  }
  scale::apply_environment(cfg);
  for (const auto& [key, value] : flags) {
    if (value) scale::apply_setting(cfg, key, *value);
  }
  return cfg;
}

std::ostream* open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path);
  if (!file) throw scale::InputError("cannot write " + path);
  return &file;
}

int run(int argc, char** argv) {
  CLI::App app{"Span representation cumulation for long inputs: segment, encode, fuse, score."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON file of settings (same keys as the flags)");
  std::map<std::string, std::optional<std::string>> flags;
  for (const std::string& key : scale::setting_keys()) {
    app.add_option("--" + key, flags[key],
                   "overrides env " + scale::env_name(key));
  }

  std::string corpus;
  bool with_tokens = false;
  auto* seg = app.add_subcommand("segment", "Print the overlapping segments of each document");
  seg->add_option("corpus", corpus, "JSONL corpus")->required();
  seg->add_flag("--with-tokens", with_tokens, "Include token payloads");

  auto* pipe = app.add_subcommand("pipeline", "Run the full pipeline and write artifacts");
  pipe->add_option("corpus", corpus, "JSONL corpus")->required();

  std::string axis;
  std::vector<std::string> values;
  auto* ablate = app.add_subcommand("ablate", "Sweep one hyperparameter; CSV on stdout");
  ablate->add_option("corpus", corpus, "JSONL corpus")->required();
  ablate->add_option("--axis", axis, "alpha, m or O")
      ->required()
      ->check(CLI::IsMember({"alpha", "m", "O"}));
  ablate->add_option("--values", values, "Values to sweep")->required()->delimiter(',');

  std::vector<std::size_t> ns{8192, 16384, 32768, 65536};
  scale::BenchOptions bench_opts;
  bool no_warmup = false;
  std::string csv_out;
  auto* bench = app.add_subcommand("bench", "Measure scaling of encode + fuse with input length");
  bench->add_option("--ns", ns, "Input lengths, strictly increasing")->delimiter(',');
  bench->add_option("--repeats", bench_opts.repeats, "Timed runs per length (median)");
  bench->add_flag("--no-warmup", no_warmup, "Skip the discarded warm-up run");
  bench->add_option("--csv-out", csv_out, "CSV destination (default stdout)");

  std::string cand_path;
  std::string ref_path;
  auto* rouge = app.add_subcommand("rouge", "ROUGE-1/2/L per line and corpus mean");
  rouge->add_option("candidates", cand_path, "One candidate summary per line")->required();
  rouge->add_option("references", ref_path, "One reference summary per line")->required();

  std::size_t chunks = 5;
  std::size_t docs = 1;
  std::vector<double> alphas{0.5, 1.0};
  std::string write_corpus;
  auto* probe = app.add_subcommand("probe", "Position probe on identical-chunk documents");
  probe->add_option("--chunks", chunks, "Chunks per generated document");
  probe->add_option("--docs", docs, "Number of generated documents");
  probe->add_option("--alphas", alphas, "Fusion ratios to probe")->delimiter(',');
  probe->add_option("--write-corpus", write_corpus,
                    "Also write the generated documents as a JSONL corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const RunConfig cfg = build_config(config_path, flags);
  if (*seg) {
    scale::cmd_segment(cfg, corpus, with_tokens, std::cout);
  } else if (*pipe) {
    const auto summary = scale::cmd_pipeline(cfg, corpus, std::cerr);
    std::cerr << "wrote " << summary.documents << " document(s) to " << summary.out_dir
              << " (config " << summary.config_hash << ")\n";
  } else if (*ablate) {
    scale::cmd_ablate(cfg, axis, values, corpus, std::cout, std::cerr);
  } else if (*bench) {
    bench_opts.warmup = !no_warmup;
    bench_opts.workers = cfg.workers;
    std::ofstream file;
    std::ostream* csv = open_or_stdout(csv_out, file);
    scale::cmd_bench(cfg, ns, bench_opts, *csv, std::cout);
  } else if (*rouge) {
    scale::cmd_rouge(cand_path, ref_path, std::cout);
  } else if (*probe) {
    if (!write_corpus.empty()) {
      std::ofstream out(write_corpus);
      if (!out) throw scale::InputError("cannot write " + write_corpus);
      scale::write_identical_chunk_corpus(cfg, chunks, docs, out);
    }
    std::cout << scale::cmd_probe(cfg, chunks, docs, alphas).dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const scale::ContractViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const scale::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const scale::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const scale::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

#include "scale/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <vector>

#include "scale/corpus.hpp"
#include "scale/decoder.hpp"
#include "scale/errors.hpp"
#include "scale/eval.hpp"
#include "scale/parallel.hpp"
#include "scale/pipeline.hpp"

namespace scale {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kDefaultSyntheticVocab = 1024;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
  if (!out) throw InputError("failed writing " + path.string());
}

std::uint64_t document_seed(std::uint64_t base, const std::string& id) {
  return mix64(base ^ fnv1a64(id));
}

std::string attention_mass_csv(const Matrix& mass) {
  std::string out = "query";
  for (std::size_t c = 0; c < mass.cols(); ++c) out += ",chunk_" + std::to_string(c + 1);
  out += '\n';
  for (std::size_t q = 0; q < mass.rows(); ++q) {
    out += std::to_string(q);
    for (double v : mass.row(q)) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string axis_key(std::string_view axis) {
  if (axis == "alpha") return "alpha";
  if (axis == "m") return "m";
  if (axis == "O") return "overlap";
  throw ConfigError("unknown ablation axis '" + std::string(axis) + "' (expected alpha, m or O)");
}

}  // namespace

PipelineRunSummary cmd_pipeline(const RunConfig& cfg, const fs::path& corpus_path,
                                std::ostream& log) {
  resolve(cfg, cfg.vocab_size ? cfg.vocab_size : 1);  // fail on bad settings before any I/O
  const Corpus corpus = load_corpus(corpus_path);
  const PipelineConfig pcfg = resolve(cfg, corpus.vocab_size);

  PipelineRunSummary summary;
  summary.out_dir = cfg.out_dir;
  summary.config_hash = config_hash(cfg);
  summary.documents = corpus.documents.size();
  if (corpus.documents.empty()) log << "warning: corpus " << corpus_path << " has no documents\n";

  fs::create_directories(summary.out_dir);
  write_file(summary.out_dir / "config.json", config_json(cfg).dump(2) + "\n");
  write_file(summary.out_dir / "config_hash.txt", summary.config_hash + "\n");

  nlohmann::ordered_json run;
  run["config"] = config_json(cfg);
  run["config_hash"] = summary.config_hash;
  run["seeds"] = {{"base", pcfg.seed},
                  {"encoder", pcfg.encoder.seed},
                  {"decoder", pcfg.decoder.seed},
                  {"middle", pcfg.fusion.middle_seed}};
  run["vocab_size"] = pcfg.encoder.vocab_size;
  run["text_id_offset"] = corpus.text_id_offset;
  auto& ids = run["documents"] = nlohmann::ordered_json::array();
  for (const Document& d : corpus.documents) ids.push_back(d.id);
  write_file(summary.out_dir / "run.json", run.dump(2) + "\n");

  if (!corpus.vocabulary.empty()) {
    std::string vocab;
    for (std::size_t i = 0; i < corpus.vocabulary.size(); ++i) {
      vocab += std::to_string(corpus.text_id_offset + i) + '\t' + corpus.vocabulary[i] + '\n';
    }
    write_file(summary.out_dir / "vocab.txt", vocab);
  }

  const EncoderWeights enc = init_weights(pcfg.encoder);
  const DecoderWeights dec = init_decoder_weights(pcfg.decoder);
  parallel_for(corpus.documents.size(), cfg.workers, [&](std::size_t i) {
    const Document& doc = corpus.documents[i];
    const DocumentResult res =
        run_document(doc.tokens, pcfg, enc, document_seed(pcfg.fusion.middle_seed, doc.id));

    const fs::path dir = summary.out_dir / "docs" / safe_file_name(doc.id);
    fs::create_directories(dir);

    nlohmann::ordered_json manifest;
    manifest["id"] = doc.id;
    manifest["N"] = doc.tokens.size();
    manifest["segments"] = to_json(res.segments)["segments"];
    const auto fused_manifest = manifest_json(res.fused);
    for (const auto& [key, value] : fused_manifest.items()) manifest[key] = value;
    write_file(dir / "manifest.json", manifest.dump() + "\n");
    write_file(dir / "fused.txt", to_text(res.fused.flattened));

    constexpr TokenId start = 0;
    const auto generated = greedy_decode(start, cfg.decode_steps, res.fused, dec, pcfg.decoder);
    std::vector<TokenId> prefix{start};
    prefix.insert(prefix.end(), generated.begin(), generated.end());
    if (prefix.size() > pcfg.decoder.max_len) prefix.resize(pcfg.decoder.max_len);
    const DecodeStep step = decode_step(prefix, res.fused, dec, pcfg.decoder);
    nlohmann::ordered_json decode;
    decode["start_token"] = start;
    decode["generated"] = generated;
    write_file(dir / "decode.json", decode.dump() + "\n");
    write_file(dir / "attention_mass.csv",
               attention_mass_csv(attention_mass_by_chunk(step.cross_attention,
                                                          res.fused.provenance,
                                                          res.fused.chunk_count)));
  });
  return summary;
}

void cmd_segment(const RunConfig& cfg, const fs::path& corpus_path, bool with_tokens,
                 std::ostream& out) {
  const Corpus corpus = load_corpus(corpus_path);
  for (const Document& doc : corpus.documents) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    const auto segments =
        to_json(segment(doc.tokens, cfg.pipeline.chunk_len, cfg.pipeline.overlap), with_tokens);
    for (const auto& [key, value] : segments.items()) j[key] = value;
    out << j.dump() << '\n';
  }
}

void cmd_ablate(const RunConfig& cfg, std::string_view axis, std::span<const std::string> values,
                const fs::path& corpus_path, std::ostream& csv, std::ostream& log) {
  const std::string key = axis_key(axis);
  const Corpus corpus = load_corpus(corpus_path);
  csv << axis << ",probe_mse,scale_rows,fuse_seconds\n";
  for (const std::string& value : values) {
    RunConfig run = cfg;
    PipelineConfig pcfg;
    try {
      apply_setting(run, key, value);
      pcfg = resolve(run, corpus.vocab_size);
    } catch (const ConfigError& e) {
      log << "warning: skipping " << axis << "=" << value << ": " << e.what() << '\n';
      continue;
    }
    const EncoderWeights enc = init_weights(pcfg.encoder);
    std::vector<DocumentResult> results(corpus.documents.size());
    parallel_for(corpus.documents.size(), run.workers, [&](std::size_t i) {
      const Document& doc = corpus.documents[i];
      results[i] =
          run_document(doc.tokens, pcfg, enc, document_seed(pcfg.fusion.middle_seed, doc.id));
    });

    std::size_t rows = 0;
    double fuse_seconds = 0.0;
    std::vector<BoundarySet> probe_docs;
    for (DocumentResult& r : results) {
      rows += r.fused.rows();
      fuse_seconds += r.timings.fuse_seconds;
      if (r.boundaries.count() >= 3) probe_docs.push_back(std::move(r.boundaries));
    }
    std::string mse = "nan";
    if (!probe_docs.empty()) {
      mse = format_double(fit_position_probe(probe_docs, pcfg.fusion.alpha, 3).mse);
    }
    csv << value << ',' << mse << ',' << rows << ',' << format_double(fuse_seconds) << '\n';
  }
}

ScalingReport cmd_bench(const RunConfig& cfg, std::span<const std::size_t> ns,
                        const BenchOptions& opts, std::ostream& csv, std::ostream& verdict) {
  const PipelineConfig pcfg =
      resolve(cfg, cfg.vocab_size ? cfg.vocab_size : kDefaultSyntheticVocab);
  const ScalingReport report = run_scaling(ns, pcfg, opts);
  write_scaling_csv(csv, report);
  verdict << verdict_json(report).dump() << '\n';
  return report;
}

void cmd_rouge(const fs::path& candidates, const fs::path& references, std::ostream& csv) {
  const auto cand = read_lines(candidates);
  const auto ref = read_lines(references);
  if (cand.size() != ref.size()) {
    throw InputError("candidate file has " + std::to_string(cand.size()) +
                     " lines but reference file has " + std::to_string(ref.size()));
  }
  csv << "line,rouge1_f1,rouge2_f1,rougeL_f1\n";
  double sum1 = 0.0;
  double sum2 = 0.0;
  double suml = 0.0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const auto c = split_whitespace(cand[i]);
    const auto r = split_whitespace(ref[i]);
    const double r1 = rouge_n(c, r, 1).f1;
    const double r2 = rouge_n(c, r, 2).f1;
    const double rl = rouge_l(c, r).f1;
    sum1 += r1;
    sum2 += r2;
    suml += rl;
    csv << i + 1 << ',' << format_double(r1) << ',' << format_double(r2) << ','
        << format_double(rl) << '\n';
  }
  const double n = cand.empty() ? 1.0 : static_cast<double>(cand.size());
  csv << "mean," << format_double(sum1 / n) << ',' << format_double(sum2 / n) << ','
      << format_double(suml / n) << '\n';
}

namespace {

std::vector<TokenSequence> probe_documents(const RunConfig& cfg, const PipelineConfig& pcfg,
                                           std::size_t chunks, std::size_t docs) {
  if (chunks < 3) throw ConfigError("probe needs at least 3 chunks per document");
  if (docs < 1) throw ConfigError("probe needs at least one document");
  std::vector<TokenSequence> out;
  const SeededRng root(cfg.pipeline.seed);
  for (std::size_t d = 0; d < docs; ++d) {
    out.push_back(identical_chunk_document(chunks, pcfg.chunk_len, pcfg.overlap,
                                           pcfg.encoder.vocab_size, root.split(100 + d)));
  }
  return out;
}

}  // namespace

nlohmann::ordered_json cmd_probe(const RunConfig& cfg, std::size_t chunks, std::size_t docs,
                                 std::span<const double> alphas) {
  const PipelineConfig pcfg =
      resolve(cfg, cfg.vocab_size ? cfg.vocab_size : kDefaultSyntheticVocab);
  const auto documents = probe_documents(cfg, pcfg, chunks, docs);
  const EncoderWeights enc = init_weights(pcfg.encoder);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (double alpha : alphas) {
    const ProbeResult r = position_probe(documents, alpha, pcfg, enc);
    nlohmann::ordered_json row;
    row["alpha"] = alpha;
    row["mse"] = r.mse;
    row["target_variance"] = [&] {
      double v = 0.0;
      for (double t : r.targets) v += t * t;
      return v / static_cast<double>(r.targets.size());
    }();
    row["predictions"] = r.predictions;
    out.push_back(std::move(row));
  }
  return out;
}

void write_identical_chunk_corpus(const RunConfig& cfg, std::size_t chunks, std::size_t docs,
                                  std::ostream& out) {
  const PipelineConfig pcfg =
      resolve(cfg, cfg.vocab_size ? cfg.vocab_size : kDefaultSyntheticVocab);
  const auto documents = probe_documents(cfg, pcfg, chunks, docs);
  for (std::size_t d = 0; d < documents.size(); ++d) {
    nlohmann::ordered_json j;
    j["id"] = "identical-" + std::to_string(d + 1);
    j["tokens"] = documents[d];
    out << j.dump() << '\n';
  }
}

}  // namespace scale

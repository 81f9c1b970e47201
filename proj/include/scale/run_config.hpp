#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scale/pipeline.hpp"

namespace scale {

// Pipeline hyperparameters plus run plumbing. Each field has a kebab-case
// key (see setting_keys()) usable as a --flag, a JSON config entry, or an
// environment variable SCALE_<KEY> with dashes turned into underscores.
// Precedence, lowest first: built-in defaults, --config file, environment,
// command-line flags.
struct RunConfig {
  PipelineConfig pipeline;
  std::size_t vocab_size = 0;  // 0: derive from the corpus
  std::size_t workers = 1;
  std::size_t decode_steps = 8;
  std::string out_dir = "scale_out";

  RunConfig();
};

inline constexpr std::string_view kEnvPrefix = "SCALE_";

const std::vector<std::string>& setting_keys();

// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
void apply_json_config(RunConfig& cfg, const nlohmann::json& j);
void apply_environment(RunConfig& cfg);

std::string env_name(std::string_view key);

// Resolves derived fields (vocab, max_len, decoder width, seeds) and checks
// every invariant. `corpus_vocab` replaces vocab_size when that is 0.
PipelineConfig resolve(const RunConfig& cfg, std::size_t corpus_vocab);

// Canonical form of everything that influences artifacts (not out-dir or
// workers), and its FNV-1a 64-bit hash as 16 hex digits.
nlohmann::ordered_json config_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace scale

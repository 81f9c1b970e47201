#include "scale/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <map>

#include "scale/errors.hpp"

namespace scale {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

template <typename T, typename Field>
Setter number_setter(Field field) {
  return [field](RunConfig& c, std::string_view key, std::string_view v) {
    field(c) = parse_number<T>(key, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"chunk-len", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.chunk_len;
       })},
      {"overlap", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.overlap;
       })},
      {"k", number_setter<std::size_t>([](RunConfig& c) -> auto& { return c.pipeline.fusion.k; })},
      {"m", number_setter<std::size_t>([](RunConfig& c) -> auto& { return c.pipeline.fusion.m; })},
      {"alpha", number_setter<double>([](RunConfig& c) -> auto& {
         return c.pipeline.fusion.alpha;
       })},
      {"allow-short-chunks",
       [](RunConfig& c, std::string_view key, std::string_view v) {
         c.pipeline.fusion.allow_short_chunks = parse_bool(key, v);
       }},
      {"d-model", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.encoder.d_model;
       })},
      {"n-heads", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.encoder.n_heads;
       })},
      {"enc-layers", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.encoder.n_layers;
       })},
      {"dec-layers", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.decoder.n_layers;
       })},
      {"d-ff", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.pipeline.encoder.d_ff;
       })},
      {"vocab-size", number_setter<std::size_t>([](RunConfig& c) -> auto& { return c.vocab_size; })},
      {"seed", number_setter<std::uint64_t>([](RunConfig& c) -> auto& { return c.pipeline.seed; })},
      {"workers", number_setter<std::size_t>([](RunConfig& c) -> auto& { return c.workers; })},
      {"decode-steps", number_setter<std::size_t>([](RunConfig& c) -> auto& {
         return c.decode_steps;
       })},
      {"out-dir",
       [](RunConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(v); }},
  };
  return table;
}

}  // namespace

RunConfig::RunConfig() {
  pipeline.chunk_len = 1024;
  pipeline.overlap = 150;
  pipeline.fusion.k = 1;
  pipeline.fusion.m = 300;
  pipeline.fusion.alpha = 0.5;
  pipeline.fusion.allow_short_chunks = true;
  pipeline.encoder.d_model = 32;
  pipeline.encoder.n_heads = 4;
  pipeline.encoder.n_layers = 2;
  pipeline.encoder.d_ff = 64;
  pipeline.decoder.n_layers = 2;
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown setting '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

void apply_json_config(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      apply_setting(cfg, key, value.get<std::string>());
    } else if (value.is_boolean()) {
      apply_setting(cfg, key, value.get<bool>() ? "true" : "false");
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      apply_setting(cfg, key, value.dump());
    } else if (value.is_number_float()) {
      apply_setting(cfg, key, value.dump());
    } else {
      throw ConfigError("config key '" + key + "' must be a scalar");
    }
  }
}

std::string env_name(std::string_view key) {
  std::string name(kEnvPrefix);
  for (char ch : key) {
    name.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  return name;
}

void apply_environment(RunConfig& cfg) {
  for (const std::string& key : setting_keys()) {
    if (const char* v = std::getenv(env_name(key).c_str())) apply_setting(cfg, key, v);
  }
}

PipelineConfig resolve(const RunConfig& cfg, std::size_t corpus_vocab) {
  PipelineConfig p = with_seed(cfg.pipeline, cfg.pipeline.seed);
  p.encoder.vocab_size = cfg.vocab_size ? cfg.vocab_size : std::max<std::size_t>(corpus_vocab, 1);
  p.encoder.max_len = p.chunk_len;
  p.decoder.vocab_size = p.encoder.vocab_size;
  p.decoder.d_model = p.encoder.d_model;
  p.decoder.n_heads = p.encoder.n_heads;
  p.decoder.d_ff = p.encoder.d_ff;
  p.decoder.max_len = std::max<std::size_t>(cfg.decode_steps + 1, 1);
  p.validate();
  return p;
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  const PipelineConfig& p = cfg.pipeline;
  nlohmann::ordered_json j;
  j["chunk-len"] = p.chunk_len;
  j["overlap"] = p.overlap;
  j["k"] = p.fusion.k;
  j["m"] = p.fusion.m;
  j["alpha"] = p.fusion.alpha;
  j["allow-short-chunks"] = p.fusion.allow_short_chunks;
  j["d-model"] = p.encoder.d_model;
  j["n-heads"] = p.encoder.n_heads;
  j["enc-layers"] = p.encoder.n_layers;
  j["dec-layers"] = p.decoder.n_layers;
  j["d-ff"] = p.encoder.d_ff;
  j["vocab-size"] = cfg.vocab_size;
  j["seed"] = p.seed;
  j["decode-steps"] = cfg.decode_steps;
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_json(cfg).dump())));
  return buf;
}

}  // namespace scale

#include "scale/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"
#include "scale/errors.hpp"
#include "scale/eval.hpp"

namespace scale {

namespace {

struct RawDoc {
  std::string id;
  TokenSequence tokens;
  std::vector<std::string> words;
  bool is_text = false;
};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw InputError("corpus line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  std::vector<RawDoc> raw;
  std::set<std::string> seen_ids;
  std::set<std::string> seen_files;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(lineno, std::string("invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) fail(lineno, "expected a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) fail(lineno, "missing string field \"id\"");

    RawDoc doc;
    doc.id = j["id"].get<std::string>();
    if (doc.id.empty()) fail(lineno, "empty id");
    if (!seen_ids.insert(doc.id).second) fail(lineno, "duplicate id '" + doc.id + "'");
    if (!seen_files.insert(safe_file_name(doc.id)).second) {
      fail(lineno, "id '" + doc.id + "' collides with another id after file-name sanitizing");
    }

    const bool has_tokens = j.contains("tokens");
    const bool has_text = j.contains("text");
    if (has_tokens == has_text) fail(lineno, "need exactly one of \"tokens\" or \"text\"");
    if (has_tokens) {
      if (!j["tokens"].is_array()) fail(lineno, "\"tokens\" must be an array");
      for (const auto& t : j["tokens"]) {
        if (!t.is_number_integer()) fail(lineno, "token ids must be integers");
        const auto v = t.get<long long>();
        if (v < 0 || static_cast<unsigned long long>(v) >= std::numeric_limits<TokenId>::max()) {
          fail(lineno, "token id " + std::to_string(v) + " out of range");
        }
        doc.tokens.push_back(static_cast<TokenId>(v));
      }
      if (doc.tokens.empty()) fail(lineno, "document has no tokens");
    } else {
      if (!j["text"].is_string()) fail(lineno, "\"text\" must be a string");
      doc.words = split_whitespace(j["text"].get<std::string>());
      if (doc.words.empty()) fail(lineno, "document has no tokens");
      doc.is_text = true;
    }
    raw.push_back(std::move(doc));
  }

  Corpus corpus;
  std::size_t max_raw = 0;
  bool any_raw = false;
  std::set<std::string> words;
  for (const RawDoc& d : raw) {
    if (d.is_text) {
      words.insert(d.words.begin(), d.words.end());
    } else {
      any_raw = true;
      max_raw = std::max<std::size_t>(max_raw, *std::max_element(d.tokens.begin(), d.tokens.end()));
    }
  }
  corpus.text_id_offset = any_raw ? max_raw + 1 : 0;
  corpus.vocabulary.assign(words.begin(), words.end());
  corpus.vocab_size = corpus.text_id_offset + corpus.vocabulary.size();

  std::map<std::string, TokenId> index;
  for (std::size_t i = 0; i < corpus.vocabulary.size(); ++i) {
    index[corpus.vocabulary[i]] = static_cast<TokenId>(corpus.text_id_offset + i);
  }
  for (RawDoc& d : raw) {
    Document doc;
    doc.id = std::move(d.id);
    if (d.is_text) {
      for (const std::string& w : d.words) doc.tokens.push_back(index.at(w));
    } else {
      doc.tokens = std::move(d.tokens);
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus " + path.string());
  return parse_corpus(in);
}

std::string safe_file_name(const std::string& id) {
  std::string out = id;
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' || ch == '-';
    if (!ok) ch = '_';
  }
  if (out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace scale

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "scale/segmenter.hpp"

namespace scale {

struct Document {
  std::string id;
  TokenSequence tokens;
};

// Parsed JSONL corpus. Lines are {"id": str, "tokens": [int, …]} or
// {"id": str, "text": str}. Text is split on whitespace and mapped through a
// vocabulary of the corpus' distinct words in sorted order; those ids start
// right after the largest raw token id so the two kinds never collide.
struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> vocabulary;  // word of text id (text_id_offset + i)
  std::size_t text_id_offset = 0;
  std::size_t vocab_size = 0;           // one past the largest id in use
};

// Throws InputError naming the 1-based line for malformed lines, missing or
// duplicate ids, and empty documents. Blank lines are skipped.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

// Maps an id onto [A-Za-z0-9._-]; anything else becomes '_'.
std::string safe_file_name(const std::string& id);

}  // namespace scale

/**
 * @file corpus.hpp
 * @brief Line-delimited JSON corpora: one {doc_id, source, context_tag, text}
 *        object per line.
 */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dkg/extraction/extractor.hpp"

namespace dkg::extraction {

/// Blank lines are skipped. Throws CorruptDocument (with the 1-based line
/// number) on malformed records or duplicate doc_ids.
std::vector<Document> parse_corpus(std::string_view jsonl);
std::string to_jsonl(const std::vector<Document>& docs);

std::vector<Document> load_corpus_file(const std::filesystem::path& path);
Lexicon load_lexicon_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace dkg::extraction

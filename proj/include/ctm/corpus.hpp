#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace ctm {

struct Document {
  std::string id;
  std::string lang;
  std::string text;

  bool operator==(const Document&) const = default;
};

// Ordered, duplicate-free token list. Position in `tokens()` is the word index
// used by BoW vectors and by the topic-word matrix.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }

  // Returns -1 when the token is out of vocabulary.
  std::int64_t index(const std::string& token) const;
  bool contains(const std::string& token) const { return index(token) >= 0; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct BowVector {
  std::map<std::size_t, std::uint32_t> counts;  // absent = 0, stored counts >= 1
  std::size_t vocab_size = 0;

  std::uint64_t total() const;
  bool empty() const { return counts.empty(); }
  bool operator==(const BowVector&) const = default;
};

struct ParallelCorpus {
  std::string train_lang;
  // entity id -> lang -> document; std::map keeps iteration deterministic.
  std::map<std::string, std::map<std::string, Document>> entities;
  // lang -> number of entities that have a document in that language.
  std::map<std::string, std::size_t> coverage;
};

struct LoadOptions {
  // Documents with fewer code points than this (after trimming) are dropped.
  std::size_t min_chars = 0;
};

struct LoadResult {
  std::vector<Document> documents;
  std::size_t dropped_empty = 0;
  std::size_t dropped_short = 0;
};

// Reads a JSON Lines corpus. A non-empty `lang` overrides the per-record field.
LoadResult load_corpus(const std::filesystem::path& path, const std::string& lang,
                       const LoadOptions& options = {});

void write_corpus(const std::vector<Document>& docs, const std::filesystem::path& path);

Document truncate_tokens(const Document& doc, std::size_t max_tokens);

std::set<std::string> load_stopwords(const std::filesystem::path& path);

Vocabulary build_vocabulary(const std::vector<Document>& docs,
                            const std::set<std::string>& stopwords, std::size_t size);

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary read_vocabulary(const std::filesystem::path& path);

BowVector to_bow(const Document& doc, const Vocabulary& vocab);

ParallelCorpus align_parallel(const std::map<std::string, std::vector<Document>>& corpora,
                              const std::string& train_lang);

}  // namespace ctm

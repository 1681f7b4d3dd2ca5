#include "ctm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "ctm/error.hpp"
#include "ctm/text.hpp"

namespace ctm {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw InvalidArgument("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

std::int64_t Vocabulary::index(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::uint64_t BowVector::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
}

LoadResult load_corpus(const std::filesystem::path& path, const std::string& lang,
                       const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path.string());

  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ": malformed JSON: " + e.what(), line_no);
    }
    if (!record.is_object() || !record.contains("id") || !record["id"].is_string() ||
        !record.contains("text") || !record["text"].is_string()) {
      throw ParseError(path.string() + ": record needs string fields \"id\" and \"text\"",
                       line_no);
    }
    Document doc;
    doc.id = record["id"].get<std::string>();
    if (doc.id.empty()) throw ParseError(path.string() + ": empty document id", line_no);
    if (!lang.empty()) {
      doc.lang = lang;
    } else if (record.contains("lang") && record["lang"].is_string()) {
      doc.lang = record["lang"].get<std::string>();
    }
    doc.text = text::trim(record["text"].get<std::string>());
    if (doc.text.empty()) {
      ++result.dropped_empty;
      continue;
    }
    if (options.min_chars > 0 && text::code_point_count(doc.text) < options.min_chars) {
      ++result.dropped_short;
      continue;
    }
    result.documents.push_back(std::move(doc));
  }
  if (in.bad()) throw IoError("error reading corpus file: " + path.string());
  return result;
}

void write_corpus(const std::vector<Document>& docs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path.string());
  for (const auto& d : docs) {
    nlohmann::json record = {{"id", d.id}, {"lang", d.lang}, {"text", d.text}};
    out << record.dump() << '\n';
  }
  if (!out) throw IoError("error writing corpus file: " + path.string());
}

Document truncate_tokens(const Document& doc, std::size_t max_tokens) {
  if (max_tokens == 0) throw InvalidArgument("max_tokens must be >= 1");
  const auto tokens = text::split_whitespace(doc.text);
  Document out{doc.id, doc.lang, {}};
  const std::size_t n = std::min(max_tokens, tokens.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out.text.push_back(' ');
    out.text += tokens[i];
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = text::to_lower(text::trim(line));
    if (!w.empty()) words.insert(std::move(w));
  }
  return words;
}

Vocabulary build_vocabulary(const std::vector<Document>& docs,
                            const std::set<std::string>& stopwords, std::size_t size) {
  if (size == 0) throw InvalidArgument("vocabulary size must be >= 1");
  if (docs.empty()) throw InvalidArgument("cannot build a vocabulary from zero documents");

  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& d : docs) {
    for (auto& tok : text::normalize_tokens(d.text)) {
      if (!stopwords.contains(tok)) ++freq[std::move(tok)];
    }
  }
  if (freq.empty()) {
    throw InvalidArgument("empty vocabulary: every token is a stopword");
  }

  std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
  const auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(size, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_rank);

  std::vector<std::string> tokens;
  tokens.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) tokens.push_back(std::move(ranked[i].first));
  return Vocabulary(std::move(tokens));
}

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary file: " + path.string());
  for (const auto& t : vocab.tokens()) out << t << '\n';
  if (!out) throw IoError("error writing vocabulary file: " + path.string());
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file: " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError(path.string() + ": empty vocabulary line", tokens.size() + 1);
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

BowVector to_bow(const Document& doc, const Vocabulary& vocab) {
  if (vocab.empty()) throw InvalidArgument("to_bow needs a non-empty vocabulary");
  BowVector bow;
  bow.vocab_size = vocab.size();
  for (const auto& tok : text::normalize_tokens(doc.text)) {
    const auto idx = vocab.index(tok);
    if (idx >= 0) ++bow.counts[static_cast<std::size_t>(idx)];
  }
  return bow;
}

ParallelCorpus align_parallel(const std::map<std::string, std::vector<Document>>& corpora,
                              const std::string& train_lang) {
  const auto train_it = corpora.find(train_lang);
  if (train_it == corpora.end()) {
    throw InvalidArgument("training language '" + train_lang + "' not among corpora");
  }
  ParallelCorpus pc;
  pc.train_lang = train_lang;
  for (const auto& [lang, docs] : corpora) pc.coverage[lang] = 0;

  for (const auto& d : train_it->second) {
    if (!pc.entities[d.id].emplace(train_lang, d).second) {
      throw InvalidArgument("duplicate document for id '" + d.id + "' in language " + train_lang);
    }
  }
  for (const auto& [lang, docs] : corpora) {
    if (lang == train_lang) continue;
    std::set<std::string> seen;
    for (const auto& d : docs) {
      if (!seen.insert(d.id).second) {
        throw InvalidArgument("duplicate document for id '" + d.id + "' in language " + lang);
      }
      const auto ent = pc.entities.find(d.id);
      if (ent != pc.entities.end()) ent->second.emplace(lang, d);
    }
  }
  for (const auto& [id, by_lang] : pc.entities) {
    for (const auto& [lang, doc] : by_lang) ++pc.coverage[lang];
  }
  return pc;
}

}  // namespace ctm

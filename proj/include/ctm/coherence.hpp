#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ctm {

// Document-level co-occurrence counts (no sliding window).
struct CooccurrenceStats {
  std::size_t doc_count = 0;
  std::unordered_map<std::string, std::size_t> word_doc_freq;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_doc_freq;  // key: (min, max)

  std::size_t word_freq(const std::string& w) const;
  std::size_t pair_freq(const std::string& a, const std::string& b) const;
};

// Counts only the words in `words` (every pair among them is tracked).
// Each element of `documents` is the set of distinct tokens of one document.
CooccurrenceStats count_cooccurrence(const std::vector<std::set<std::string>>& documents,
                                     const std::set<std::string>& words);

// NPMI(a,b) = log((P(a,b)+eps) / (P(a)P(b))) / -log(P(a,b)+eps), with
// probabilities as document frequencies over doc_count. Pairs involving a
// word that never occurs score -1; a pair present in every document scores 1.
double npmi(const std::string& a, const std::string& b, const CooccurrenceStats& stats,
            double epsilon = 1e-12);

// Mean over topics of the mean NPMI over all pairs of each topic's first
// `top_n` words.
double npmi_coherence(const std::vector<std::vector<std::string>>& topics,
                      const CooccurrenceStats& stats, std::size_t top_n = 10,
                      double epsilon = 1e-12);

}  // namespace ctm

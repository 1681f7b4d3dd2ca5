#include "ctm/coherence.hpp"

#include <cmath>

#include "ctm/error.hpp"

namespace ctm {
namespace {

std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

std::size_t CooccurrenceStats::word_freq(const std::string& w) const {
  const auto it = word_doc_freq.find(w);
  return it == word_doc_freq.end() ? 0 : it->second;
}

std::size_t CooccurrenceStats::pair_freq(const std::string& a, const std::string& b) const {
  if (a == b) return word_freq(a);
  const auto it = pair_doc_freq.find(ordered(a, b));
  return it == pair_doc_freq.end() ? 0 : it->second;
}

CooccurrenceStats count_cooccurrence(const std::vector<std::set<std::string>>& documents,
                                     const std::set<std::string>& words) {
  CooccurrenceStats stats;
  stats.doc_count = documents.size();
  std::vector<const std::string*> present;
  for (const auto& doc : documents) {
    present.clear();
    // Both sets are sorted, so the intersection comes out sorted too.
    auto d = doc.begin();
    auto w = words.begin();
    while (d != doc.end() && w != words.end()) {
      if (*d < *w) {
        ++d;
      } else if (*w < *d) {
        ++w;
      } else {
        present.push_back(&*w);
        ++d;
        ++w;
      }
    }
    for (std::size_t i = 0; i < present.size(); ++i) {
      ++stats.word_doc_freq[*present[i]];
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        ++stats.pair_doc_freq[{*present[i], *present[j]}];
      }
    }
  }
  return stats;
}

double npmi(const std::string& a, const std::string& b, const CooccurrenceStats& stats,
            double epsilon) {
  if (stats.doc_count == 0) throw InvalidArgument("NPMI needs a non-empty reference corpus");
  const double n = static_cast<double>(stats.doc_count);
  const double pa = static_cast<double>(stats.word_freq(a)) / n;
  const double pb = static_cast<double>(stats.word_freq(b)) / n;
  if (pa == 0.0 || pb == 0.0) return -1.0;
  const double pab = static_cast<double>(stats.pair_freq(a, b)) / n;
  if (pab >= 1.0) return 1.0;
  return std::log((pab + epsilon) / (pa * pb)) / -std::log(pab + epsilon);
}

double npmi_coherence(const std::vector<std::vector<std::string>>& topics,
                      const CooccurrenceStats& stats, std::size_t top_n, double epsilon) {
  if (topics.empty()) throw InvalidArgument("NPMI coherence needs at least one topic");
  if (top_n < 2) throw InvalidArgument("NPMI coherence needs top_n >= 2");
  double total = 0.0;
  for (std::size_t k = 0; k < topics.size(); ++k) {
    const auto& words = topics[k];
    if (words.size() < top_n) {
      throw InvalidArgument("topic " + std::to_string(k) + " has fewer than " + std::to_string(top_n) +
                            " words");
    }
    double topic_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < top_n; ++i) {
      for (std::size_t j = i + 1; j < top_n; ++j) {
        topic_sum += npmi(words[i], words[j], stats, epsilon);
        ++pairs;
      }
    }
    total += topic_sum / static_cast<double>(pairs);
  }
  return total / static_cast<double>(topics.size());
}

}  // namespace ctm

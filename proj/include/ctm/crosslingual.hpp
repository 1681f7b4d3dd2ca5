#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ctm/embeddings.hpp"
#include "ctm/inference.hpp"

namespace ctm {

// Per-document topic predictions, all of width num_topics.
class PredictionSet {
 public:
  explicit PredictionSet(std::size_t num_topics) : num_topics_(num_topics) {}

  // Throws on duplicate id, wrong width or a point off the simplex (1e-6).
  void add(std::string id, TopicDistribution dist);

  std::size_t num_topics() const { return num_topics_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const TopicDistribution& at(std::size_t i) const { return dists_.at(i); }
  const TopicDistribution* find(const std::string& id) const;

  // The entries of this set whose ids appear in `ids`, in the order of `ids`.
  PredictionSet restricted_to(const std::vector<std::string>& ids) const;

 private:
  std::size_t num_topics_;
  std::vector<std::string> ids_;
  std::vector<TopicDistribution> dists_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Percentage of ids whose argmax topics agree (lowest index wins ties).
double match_rate(const PredictionSet& a, const PredictionSet& b);

// KL(p || q). Both inputs are clamped to >= epsilon and renormalized.
double kl_divergence(const TopicDistribution& p, const TopicDistribution& q,
                     double epsilon = 1e-12);

// Cosine between the mean vectors of two word lists. Words absent from the
// table are skipped; each side needs at least one known word.
double centroid_similarity(const std::vector<std::string>& topic_a,
                           const std::vector<std::string>& topic_b,
                           const EmbeddingMatrix& word_vectors);

TopicDistribution uniform_distribution(std::size_t num_topics);

// Expected match rate of a uniform prediction against `reference`: every topic
// ties for the argmax, each tie earning 1/(number of tied topics).
double uniform_match_rate(const PredictionSet& reference);

enum class KlDirection {
  kTestToEnglish,  // KL(test || english)
  kEnglishToTest,  // KL(english || test)
};

enum class BaselineKlDirection {
  kUniformToEnglish,  // KL(uniform || english)
  kEnglishToUniform,
};

struct CrossLingualOptions {
  KlDirection kl_direction = KlDirection::kTestToEnglish;
  BaselineKlDirection baseline_kl_direction = BaselineKlDirection::kUniformToEnglish;
  std::size_t centroid_words = 5;
  double epsilon = 1e-12;
};

struct LanguageScores {
  std::size_t documents = 0;
  double match = 0.0;
  double kl = 0.0;
  std::optional<double> centroid;  // absent without a word-vector table
};

struct CrossLingualReport {
  std::size_t num_topics = 0;
  std::map<std::string, LanguageScores> languages;
  LanguageScores baseline;  // centroid always absent

  nlohmann::json to_json() const;
};

// Scores every language against English. `topic_words` holds each topic's
// words ordered by weight; only the first `centroid_words` are used.
CrossLingualReport evaluate_crosslingual(
    const PredictionSet& english, const std::map<std::string, PredictionSet>& other_languages,
    const std::vector<std::vector<std::string>>& topic_words,
    const EmbeddingMatrix* word_vectors, const CrossLingualOptions& options = {});

}  // namespace ctm

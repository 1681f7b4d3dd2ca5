#pragma once

#include <random>
#include <string>
#include <vector>

#include "ctm/model.hpp"

namespace ctm {

struct TopicDistribution {
  std::vector<double> theta;

  std::size_t num_topics() const { return theta.size(); }
  // Lowest index wins ties.
  std::size_t argmax() const;
};

struct InferenceOptions {
  std::size_t samples = 100;
  // eps = 0 for every draw, so the result is softmax(mu).
  bool noiseless = false;
};

// Averages softmax(mu + sigma * eps_s) over `samples` draws from `rng`, using
// the frozen encoder (running batchnorm statistics, no dropout).
TopicDistribution infer_topics(const TopicModel& model, const RowVector& input,
                               const InferenceOptions& options, std::mt19937_64& rng);

// Row-by-row equivalent of calling infer_topics on each row in order with the
// same generator.
std::vector<TopicDistribution> infer_topics(const TopicModel& model, const Matrix& inputs,
                                            const InferenceOptions& options,
                                            std::mt19937_64& rng);

// Word indices of each topic, by descending beta weight, ties by ascending index.
std::vector<std::vector<std::size_t>> topic_word_indices(const Matrix& beta, std::size_t top_n);

std::vector<std::vector<std::string>> topic_words(const TopicModel& model, std::size_t top_n);

}  // namespace ctm

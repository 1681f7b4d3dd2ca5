#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctm/config.hpp"
#include "ctm/corpus.hpp"
#include "ctm/parameters.hpp"

namespace ctm {

struct EpochLoss {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

struct TrainingLog {
  std::vector<EpochLoss> epochs;
  std::size_t documents_used = 0;
  std::size_t excluded_zero_bow = 0;

  bool operator==(const TrainingLog& other) const;
};

// A trained (frozen) autoencoder: inference always runs batchnorm on
// running statistics with dropout off.
struct TopicModel {
  ModelConfig config;
  ModelParameters params;
  Vocabulary vocab;
  TrainingLog training_log;
};

// Builds one encoder input row. `embedding` is ignored in bow mode and `bow`
// is ignored in contextual mode; the combined layout is [embedding ; bow].
RowVector make_input_row(const ModelConfig& config, std::span<const float> embedding,
                         const BowVector* bow);

// Dense B x V count matrix.
Matrix dense_targets(std::span<const BowVector* const> bows, std::size_t vocab_size);

}  // namespace ctm

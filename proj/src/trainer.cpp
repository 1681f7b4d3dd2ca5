#include "ctm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ctm/network.hpp"
#include "ctm/optimizer.hpp"
#include "ctm/prior.hpp"

namespace ctm {
namespace {

// Splits a shuffled order into batches of `size`; a trailing batch of one
// document is folded into its predecessor since batchnorm cannot normalize it.
std::vector<std::span<const std::size_t>> make_batches(const std::vector<std::size_t>& order,
                                                       std::size_t size) {
  std::vector<std::span<const std::size_t>> batches;
  const std::span<const std::size_t> all(order);
  for (std::size_t start = 0; start < order.size(); start += size) {
    const std::size_t len = std::min(size, order.size() - start);
    if (len == 1 && !batches.empty()) {
      const auto& prev = batches.back();
      batches.back() = all.subspan(start - prev.size(), prev.size() + 1);
    } else {
      batches.push_back(all.subspan(start, len));
    }
  }
  return batches;
}

}  // namespace

TopicModel train(const TrainingInput& input, const Vocabulary& vocab, const ModelConfig& config,
                 const EpochCallback& on_epoch) {
  config.validate();
  if (vocab.size() != config.vocab_size) {
    throw InvalidArgument("vocabulary has " + std::to_string(vocab.size()) +
                          " tokens, config.vocab_size is " + std::to_string(config.vocab_size));
  }
  if (input.ids.size() != input.bows.size()) {
    throw InvalidArgument("training input needs exactly one BoW per id");
  }
  for (const auto& bow : input.bows) {
    if (bow.vocab_size != config.vocab_size) throw ShapeError("BoW vector built against a different vocabulary");
  }

  std::vector<std::int64_t> rows(input.ids.size(), -1);
  if (config.uses_embeddings()) {
    if (input.embeddings == nullptr) {
      throw InvalidArgument(to_string(config.input_mode) + " mode requires an embedding matrix");
    }
    if (input.embeddings->dim() != config.embedding_dim) {
      throw ShapeError("embedding dim " + std::to_string(input.embeddings->dim()) +
                       " does not match config.embedding_dim " + std::to_string(config.embedding_dim));
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < input.ids.size(); ++i) {
      rows[i] = input.embeddings->find(input.ids[i]);
      if (rows[i] < 0) missing.push_back(input.ids[i]);
    }
    if (!missing.empty()) {
      throw InvalidArgument(std::to_string(missing.size()) + " training documents lack embeddings (first: '" +
                            missing.front() + "')");
    }
  }

  TopicModel model;
  model.config = config;
  model.vocab = vocab;

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < input.bows.size(); ++i) {
    if (input.bows[i].empty()) {
      ++model.training_log.excluded_zero_bow;
    } else {
      usable.push_back(i);
    }
  }
  model.training_log.documents_used = usable.size();

  std::mt19937_64 rng(config.seed);
  model.params = ModelParameters::initialized(config, rng);
  if (config.epochs == 0) return model;
  if (usable.size() < 2) throw InvalidArgument("training needs at least two documents with a non-empty BoW");

  const PriorParams prior = laplace_prior(config.num_topics, config.prior_alpha);
  AdamState adam = AdamState::zeros_like(model.params);
  const auto D = static_cast<Eigen::Index>(config.input_dim());
  const std::span<const float> no_embedding;

  std::vector<std::size_t> order = usable;
  std::vector<const BowVector*> batch_bows;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochLoss sums;
    const auto batches = make_batches(order, config.batch_size);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      const auto B = static_cast<Eigen::Index>(batch.size());
      Matrix inputs(B, D);
      batch_bows.clear();
      for (Eigen::Index r = 0; r < B; ++r) {
        const std::size_t doc = batch[static_cast<std::size_t>(r)];
        const auto embedding = config.uses_embeddings()
                                   ? input.embeddings->vector(static_cast<std::size_t>(rows[doc]))
                                   : no_embedding;
        inputs.row(r) = make_input_row(config, embedding, &input.bows[doc]);
        batch_bows.push_back(&input.bows[doc]);
      }
      const Matrix targets = dense_targets(batch_bows, config.vocab_size);
      const NoiseDraws noise = draw_noise(config, B, rng, /*with_dropout=*/true);

      const GradientResult step = compute_gradients(model.params, config, prior, inputs, targets, noise);
      if (!std::isfinite(step.loss.total)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(b),
                            epoch, b);
      }
      adam_step(model.params, step.grads, adam, config);
      update_running_stats(model.params, config, step.stats);

      const double w = static_cast<double>(B);
      sums.total += w * step.loss.total;
      sums.recon += w * step.loss.recon;
      sums.kl += w * step.loss.kl;
    }
    const double n = static_cast<double>(order.size());
    const EpochLoss mean{sums.total / n, sums.recon / n, sums.kl / n};
    model.training_log.epochs.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  if (!model.params.all_finite()) {
    throw TrainingError("parameters became non-finite during training", config.epochs - 1, 0);
  }
  return model;
}

}  // namespace ctm

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ctm/embeddings.hpp"
#include "ctm/model.hpp"

namespace ctm {

struct TrainingInput {
  std::vector<std::string> ids;
  std::vector<BowVector> bows;                    // reconstruction targets, one per id
  const EmbeddingMatrix* embeddings = nullptr;    // required unless input_mode == kBow
};

using EpochCallback = std::function<void(std::size_t epoch, const EpochLoss& loss)>;

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t epoch, std::size_t batch)
      : Error(what), epoch_(epoch), batch_(batch) {}
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

// Minibatch Adam on the negative ELBO. Documents with an all-zero BoW are
// excluded (and counted). Deterministic given config.seed.
TopicModel train(const TrainingInput& input, const Vocabulary& vocab, const ModelConfig& config,
                 const EpochCallback& on_epoch = {});

}  // namespace ctm

#include "ctm/inference.hpp"

#include <algorithm>
#include <numeric>

#include "ctm/error.hpp"
#include "ctm/network.hpp"

namespace ctm {

std::size_t TopicDistribution::argmax() const {
  if (theta.empty()) throw InvalidArgument("argmax of an empty topic distribution");
  return static_cast<std::size_t>(std::max_element(theta.begin(), theta.end()) - theta.begin());
}

RowVector make_input_row(const ModelConfig& config, std::span<const float> embedding,
                         const BowVector* bow) {
  RowVector row = RowVector::Zero(static_cast<Eigen::Index>(config.input_dim()));
  Eigen::Index offset = 0;
  if (config.uses_embeddings()) {
    if (embedding.size() != config.embedding_dim) {
      throw ShapeError("embedding has " + std::to_string(embedding.size()) +
                       " components, model expects " + std::to_string(config.embedding_dim));
    }
    for (std::size_t i = 0; i < embedding.size(); ++i) {
      row(static_cast<Eigen::Index>(i)) = static_cast<double>(embedding[i]);
    }
    offset = static_cast<Eigen::Index>(config.embedding_dim);
  }
  if (config.uses_bow_input()) {
    if (bow == nullptr) throw InvalidArgument(to_string(config.input_mode) + " mode needs a BoW input");
    if (bow->vocab_size != config.vocab_size) throw ShapeError("BoW vocabulary size does not match model");
    for (const auto& [idx, count] : bow->counts) {
      row(offset + static_cast<Eigen::Index>(idx)) = static_cast<double>(count);
    }
  }
  return row;
}

Matrix dense_targets(std::span<const BowVector* const> bows, std::size_t vocab_size) {
  Matrix targets = Matrix::Zero(static_cast<Eigen::Index>(bows.size()),
                                static_cast<Eigen::Index>(vocab_size));
  for (std::size_t r = 0; r < bows.size(); ++r) {
    for (const auto& [idx, count] : bows[r]->counts) {
      if (idx >= vocab_size) throw ShapeError("BoW index beyond vocabulary");
      targets(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(idx)) = count;
    }
  }
  return targets;
}

bool TrainingLog::operator==(const TrainingLog& other) const {
  if (epochs.size() != other.epochs.size() || documents_used != other.documents_used ||
      excluded_zero_bow != other.excluded_zero_bow) {
    return false;
  }
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (epochs[i].total != other.epochs[i].total || epochs[i].recon != other.epochs[i].recon ||
        epochs[i].kl != other.epochs[i].kl) {
      return false;
    }
  }
  return true;
}

std::vector<TopicDistribution> infer_topics(const TopicModel& model, const Matrix& inputs,
                                            const InferenceOptions& options,
                                            std::mt19937_64& rng) {
  if (options.samples == 0) throw InvalidArgument("inference needs samples >= 1");
  const Posterior post = encode(model.params, model.config, inputs, Phase::kEval);
  const Matrix sigma = (0.5 * post.logvar.array()).exp().matrix();
  const auto K = post.mu.cols();

  std::vector<TopicDistribution> out;
  out.reserve(static_cast<std::size_t>(inputs.rows()));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(static_cast<Eigen::Index>(options.samples), K);
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    Vector mean;
    if (options.noiseless) {
      mean = softmax_rows(post.mu.row(r)).transpose();
    } else {
      for (Eigen::Index s = 0; s < z.rows(); ++s) {
        for (Eigen::Index k = 0; k < K; ++k) z(s, k) = post.mu(r, k) + sigma(r, k) * normal(rng);
      }
      mean = softmax_rows(z).colwise().mean().transpose();
    }
    out.push_back({std::vector<double>(mean.data(), mean.data() + mean.size())});
  }
  return out;
}

TopicDistribution infer_topics(const TopicModel& model, const RowVector& input,
                               const InferenceOptions& options, std::mt19937_64& rng) {
  return infer_topics(model, Matrix(input), options, rng).front();
}

std::vector<std::vector<std::size_t>> topic_word_indices(const Matrix& beta, std::size_t top_n) {
  const auto V = static_cast<std::size_t>(beta.cols());
  if (top_n == 0 || top_n > V) throw InvalidArgument("top_n must be in [1, vocab_size]");
  std::vector<std::vector<std::size_t>> out;
  out.reserve(static_cast<std::size_t>(beta.rows()));
  for (Eigen::Index k = 0; k < beta.rows(); ++k) {
    std::vector<std::size_t> idx(V);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto row = beta.row(k);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top_n), idx.end(),
                      [&row](std::size_t a, std::size_t b) {
                        const double wa = row(static_cast<Eigen::Index>(a));
                        const double wb = row(static_cast<Eigen::Index>(b));
                        return wa != wb ? wa > wb : a < b;
                      });
    idx.resize(top_n);
    out.push_back(std::move(idx));
  }
  return out;
}

std::vector<std::vector<std::string>> topic_words(const TopicModel& model, std::size_t top_n) {
  std::vector<std::vector<std::string>> out;
  for (const auto& topic : topic_word_indices(model.params.beta, top_n)) {
    std::vector<std::string> words;
    words.reserve(topic.size());
    for (auto i : topic) words.push_back(model.vocab.token(i));
    out.push_back(std::move(words));
  }
  return out;
}

}  // namespace ctm

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ctm {

enum class InputMode {
  kContextual,  // document embedding only
  kBow,         // bag of words only (plain ProdLDA)
  kCombined,    // [embedding ; bow] concatenation
};

std::string to_string(InputMode mode);
InputMode parse_input_mode(const std::string& s);

struct ModelConfig {
  std::size_t num_topics = 10;
  InputMode input_mode = InputMode::kContextual;
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 0;
  std::vector<std::size_t> hidden_sizes = {100, 100};
  double dropout_rate = 0.2;
  double prior_alpha = 0.02;
  double learning_rate = 2e-3;
  double adam_beta1 = 0.99;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 64;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  std::size_t inference_samples = 100;

  double batchnorm_momentum = 0.1;
  double batchnorm_eps = 1e-5;
  // The decoder batchnorm scale is pinned at 1 unless this is set.
  bool learn_decoder_bn_scale = false;

  // Width of the encoder input row: E, V or E+V depending on the mode.
  std::size_t input_dim() const;
  bool uses_embeddings() const { return input_mode != InputMode::kBow; }
  bool uses_bow_input() const { return input_mode != InputMode::kContextual; }

  // Throws InvalidArgument naming the offending field.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace ctm

#include "ctm/config.hpp"

#include "ctm/error.hpp"

namespace ctm {

std::string to_string(InputMode mode) {
  switch (mode) {
    case InputMode::kContextual: return "contextual";
    case InputMode::kBow: return "bow";
    case InputMode::kCombined: return "combined";
  }
  return "unknown";
}

InputMode parse_input_mode(const std::string& s) {
  if (s == "contextual") return InputMode::kContextual;
  if (s == "bow") return InputMode::kBow;
  if (s == "combined") return InputMode::kCombined;
  throw InvalidArgument("unknown input mode '" + s + "' (expected contextual|bow|combined)");
}

std::size_t ModelConfig::input_dim() const {
  switch (input_mode) {
    case InputMode::kContextual: return embedding_dim;
    case InputMode::kBow: return vocab_size;
    case InputMode::kCombined: return embedding_dim + vocab_size;
  }
  return 0;
}

void ModelConfig::validate() const {
  if (num_topics < 2) throw InvalidArgument("num_topics must be >= 2");
  if (vocab_size == 0) throw InvalidArgument("vocab_size must be > 0");
  if (uses_embeddings() && embedding_dim == 0) {
    throw InvalidArgument(to_string(input_mode) + " mode requires embedding_dim > 0");
  }
  if (input_mode == InputMode::kBow && embedding_dim != 0) {
    throw InvalidArgument("bow mode requires embedding_dim = 0");
  }
  if (hidden_sizes.empty()) throw InvalidArgument("hidden_sizes must not be empty");
  for (auto h : hidden_sizes) {
    if (h == 0) throw InvalidArgument("hidden layer sizes must be > 0");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InvalidArgument("dropout_rate must be in [0,1)");
  if (!(prior_alpha > 0.0)) throw InvalidArgument("prior_alpha must be > 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw InvalidArgument("adam_beta1 must be in [0,1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw InvalidArgument("adam_beta2 must be in [0,1)");
  if (!(adam_eps > 0.0)) throw InvalidArgument("adam_eps must be > 0");
  if (batch_size < 2) throw InvalidArgument("batch_size must be >= 2 (batchnorm needs batch statistics)");
  if (inference_samples == 0) throw InvalidArgument("inference_samples must be >= 1");
  if (!(batchnorm_momentum > 0.0 && batchnorm_momentum <= 1.0)) {
    throw InvalidArgument("batchnorm_momentum must be in (0,1]");
  }
  if (!(batchnorm_eps > 0.0)) throw InvalidArgument("batchnorm_eps must be > 0");
}

}  // namespace ctm

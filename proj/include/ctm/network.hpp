#pragma once

#include <random>

#include "ctm/config.hpp"
#include "ctm/parameters.hpp"
#include "ctm/prior.hpp"

namespace ctm {

// kTrain: batchnorm normalizes with batch statistics and dropout masks (if
// given) are applied. kEval: running statistics, no dropout.
enum class Phase { kTrain, kEval };

// All randomness consumed by one forward pass. Holding it outside the
// network makes the loss a deterministic function of the parameters, which
// is what gradient checking and reproducible training need.
struct NoiseDraws {
  Matrix eps;           // B x K, standard normal
  Matrix encoder_mask;  // B x H_last, entries 0 or 1/(1-p); empty = no dropout
  Matrix theta_mask;    // B x K, same convention
};

NoiseDraws draw_noise(const ModelConfig& config, Eigen::Index batch, std::mt19937_64& rng,
                      bool with_dropout);
NoiseDraws zero_noise(const ModelConfig& config, Eigen::Index batch);

struct Posterior {
  Matrix mu;      // B x K
  Matrix logvar;  // B x K
};

// Rows of `inputs` are documents laid out per ModelConfig::input_dim().
Posterior encode(const ModelParameters& params, const ModelConfig& config, const Matrix& inputs,
                 Phase phase, const Matrix& encoder_mask = Matrix());

// z = mu + exp(logvar / 2) * eps, elementwise.
Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps);

Matrix softmax_rows(const Matrix& logits);

// Per-row word distributions softmax(bn(softmax(z) * beta)).
Matrix decode(const Matrix& z, const ModelParameters& params, const ModelConfig& config,
              Phase phase, const Matrix& theta_mask = Matrix());

struct LossTerms {
  double total = 0.0;
  double recon = 0.0;  // batch mean of -sum_w n_w log p_w
  double kl = 0.0;     // batch mean of KL(q || prior)
};

// Per-row KL(N(mu, exp(logvar)) || N(prior.mean, prior.variance)).
Vector gaussian_kl(const Matrix& mu, const Matrix& logvar, const PriorParams& prior);
// Per-row KL(N(mu_q, exp(logvar_q)) || N(mu_p, exp(logvar_p))); all four B x K.
Vector gaussian_kl(const Matrix& mu_q, const Matrix& logvar_q, const Matrix& mu_p, const Matrix& logvar_p);

// `targets` is the dense B x V count matrix; every row needs a positive sum.
LossTerms elbo_loss(const ModelParameters& params, const ModelConfig& config,
                    const PriorParams& prior, const Matrix& inputs, const Matrix& targets,
                    const NoiseDraws& noise, Phase phase = Phase::kTrain);

// Batch moments seen by the three batchnorms during a training pass
// (biased variances).
struct BatchStatistics {
  Vector mu_mean, mu_var;
  Vector logvar_mean, logvar_var;
  Vector decoder_mean, decoder_var;
  Eigen::Index batch_size = 0;
};

struct GradientResult {
  LossTerms loss;
  ModelParameters grads;  // zero on non-trainable tensors
  BatchStatistics stats;
};

// Exact gradient of elbo_loss (training phase) under fixed noise.
GradientResult compute_gradients(const ModelParameters& params, const ModelConfig& config,
                                 const PriorParams& prior, const Matrix& inputs,
                                 const Matrix& targets, const NoiseDraws& noise);

// Exponential moving average of batch moments into the running buffers,
// with the unbiased variance as in the usual batchnorm convention.
void update_running_stats(ModelParameters& params, const ModelConfig& config,
                          const BatchStatistics& stats);

}  // namespace ctm

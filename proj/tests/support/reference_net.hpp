#pragma once

#include <vector>

#include "ctm/parameters.hpp"
#include "ctm/prior.hpp"

namespace ctm::testing {

using Rows = std::vector<std::vector<double>>;

// Scalar-loop transcription of the autoencoder, written independently of the
// Eigen expression code in src/network.cpp.
struct ReferenceResult {
  Rows mu;
  Rows logvar;
  Rows theta;
  Rows word_dist;
  double recon = 0.0;
  double kl = 0.0;
};

// Empty masks mean no dropout. `train` selects batch statistics.
ReferenceResult reference_forward(const ModelParameters& p, const ModelConfig& c, const Rows& inputs,
                                  const Rows& eps, const Rows& encoder_mask, const Rows& theta_mask,
                                  bool train, const Rows& targets, const PriorParams& prior);

Rows to_rows(const Matrix& m);

}  // namespace ctm::testing

#pragma once

#include <cstdint>

#include "ctm/config.hpp"
#include "ctm/parameters.hpp"

namespace ctm {

struct AdamState {
  ModelParameters first_moment;
  ModelParameters second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const ModelParameters& params);
};

// One bias-corrected Adam update of every trainable tensor:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
void adam_step(ModelParameters& params, const ModelParameters& grads, AdamState& state,
               const ModelConfig& config);

}  // namespace ctm

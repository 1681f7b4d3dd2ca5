#pragma once

#include <cstddef>

#include "ctm/parameters.hpp"

namespace ctm {

// Gaussian stand-in for a Dirichlet(alpha) prior over the topic simplex,
// obtained from the Laplace approximation in the softmax basis.
struct PriorParams {
  Vector mean;
  Vector variance;
};

// Symmetric Dirichlet: every alpha_k = alpha.
PriorParams laplace_prior(std::size_t num_topics, double alpha);
// General form, one concentration per topic.
PriorParams laplace_prior(const Vector& alpha);

}  // namespace ctm

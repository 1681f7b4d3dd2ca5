#include "ctm/optimizer.hpp"

#include <cmath>

#include "ctm/error.hpp"

namespace ctm {

AdamState AdamState::zeros_like(const ModelParameters& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(ModelParameters& params, const ModelParameters& grads, AdamState& state,
               const ModelConfig& config) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw ShapeError("adam_step: parameter, gradient and moment layouts differ");
  }

  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);

  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p[i].trainable) continue;
    if (g[i].size() != p[i].size() || m[i].size() != p[i].size() || v[i].size() != p[i].size()) {
      throw ShapeError("adam_step: shape mismatch on " + p[i].name);
    }
    auto param = p[i].map();
    auto mean = m[i].map();
    auto sq = v[i].map();
    const auto grad = g[i].map();
    mean = b1 * mean + (1.0 - b1) * grad;
    sq = b2 * sq + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= config.learning_rate * (mean.array() / correction1) /
                     ((sq.array() / correction2).sqrt() + config.adam_eps);
  }
}

}  // namespace ctm

#include "ctm/parameters.hpp"

#include <cmath>
#include <cstring>

#include "ctm/error.hpp"

namespace ctm {

Dense Dense::zeros(Eigen::Index out, Eigen::Index in) {
  return {Matrix::Zero(out, in), Vector::Zero(out)};
}

BatchNorm BatchNorm::identity(Eigen::Index n, bool learn_scale) {
  return {Vector::Ones(n), Vector::Zero(n), Vector::Zero(n), Vector::Ones(n), learn_scale};
}

ModelParameters ModelParameters::shaped(const ModelConfig& config) {
  config.validate();
  const auto K = static_cast<Eigen::Index>(config.num_topics);
  const auto V = static_cast<Eigen::Index>(config.vocab_size);
  const auto& hs = config.hidden_sizes;

  ModelParameters p;
  p.input_adapter = Dense::zeros(static_cast<Eigen::Index>(hs[0]),
                                 static_cast<Eigen::Index>(config.input_dim()));
  for (std::size_t l = 1; l < hs.size(); ++l) {
    p.hidden_layers.push_back(Dense::zeros(static_cast<Eigen::Index>(hs[l]),
                                           static_cast<Eigen::Index>(hs[l - 1])));
  }
  const auto last = static_cast<Eigen::Index>(hs.back());
  p.mu_head = Dense::zeros(K, last);
  p.logvar_head = Dense::zeros(K, last);
  p.mu_bn = BatchNorm::identity(K, true);
  p.logvar_bn = BatchNorm::identity(K, true);
  p.decoder_bn = BatchNorm::identity(V, config.learn_decoder_bn_scale);
  p.beta = Matrix::Zero(K, V);
  return p;
}

ModelParameters ModelParameters::initialized(const ModelConfig& config, std::mt19937_64& rng) {
  ModelParameters p = shaped(config);
  const auto glorot = [&rng](Matrix& w) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Row-major fill order so the draw sequence does not depend on storage order.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
  };
  glorot(p.input_adapter.weight);
  for (auto& layer : p.hidden_layers) glorot(layer.weight);
  glorot(p.mu_head.weight);
  glorot(p.logvar_head.weight);
  glorot(p.beta);
  return p;
}

namespace {

template <typename Params, typename View>
std::vector<View> collect(Params& p) {
  std::vector<View> out;
  const auto add = [&out](std::string name, auto& t, bool trainable) {
    out.push_back(View{std::move(name), t.data(), t.rows(), t.cols(), trainable});
  };
  add("input_adapter.weight", p.input_adapter.weight, true);
  add("input_adapter.bias", p.input_adapter.bias, true);
  for (std::size_t l = 0; l < p.hidden_layers.size(); ++l) {
    const std::string prefix = "hidden." + std::to_string(l);
    add(prefix + ".weight", p.hidden_layers[l].weight, true);
    add(prefix + ".bias", p.hidden_layers[l].bias, true);
  }
  add("mu_head.weight", p.mu_head.weight, true);
  add("mu_head.bias", p.mu_head.bias, true);
  add("logvar_head.weight", p.logvar_head.weight, true);
  add("logvar_head.bias", p.logvar_head.bias, true);
  const auto add_bn = [&](const std::string& prefix, auto& bn) {
    add(prefix + ".scale", bn.scale, bn.learn_scale);
    add(prefix + ".shift", bn.shift, true);
    add(prefix + ".running_mean", bn.running_mean, false);
    add(prefix + ".running_var", bn.running_var, false);
  };
  add_bn("mu_bn", p.mu_bn);
  add_bn("logvar_bn", p.logvar_bn);
  add_bn("decoder_bn", p.decoder_bn);
  add("beta", p.beta, true);
  return out;
}

}  // namespace

std::vector<TensorView> ModelParameters::tensors() {
  return collect<ModelParameters, TensorView>(*this);
}

std::vector<ConstTensorView> ModelParameters::tensors() const {
  return collect<const ModelParameters, ConstTensorView>(*this);
}

std::size_t ModelParameters::trainable_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) {
    if (t.trainable) n += static_cast<std::size_t>(t.size());
  }
  return n;
}

ModelParameters ModelParameters::zeros_like() const {
  ModelParameters z = *this;
  for (auto& t : z.tensors()) t.map().setZero();
  return z;
}

bool ModelParameters::all_finite() const {
  for (const auto& t : tensors()) {
    if (!t.map().allFinite()) return false;
  }
  return true;
}

bool ModelParameters::bitwise_equal(const ModelParameters& other) const {
  const auto a = tensors();
  const auto b = other.tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].rows != b[i].rows || a[i].cols != b[i].cols) return false;
    if (std::memcmp(a[i].data, b[i].data, static_cast<std::size_t>(a[i].size()) * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace ctm

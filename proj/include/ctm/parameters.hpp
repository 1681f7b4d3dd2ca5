#pragma once

#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctm/config.hpp"

namespace ctm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Affine layer y = W x + b with W stored (out x in).
struct Dense {
  Matrix weight;
  Vector bias;

  static Dense zeros(Eigen::Index out, Eigen::Index in);
};

struct BatchNorm {
  Vector scale;
  Vector shift;
  Vector running_mean;
  Vector running_var;
  bool learn_scale = true;

  static BatchNorm identity(Eigen::Index n, bool learn_scale);
};

template <typename T>
struct BasicTensorView {
  std::string name;
  T* data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool trainable;

  Eigen::Index size() const { return rows * cols; }
  // Flat view in Eigen's (column-major) storage order.
  auto map() const {
    using V = std::conditional_t<std::is_const_v<T>, const Vector, Vector>;
    return Eigen::Map<V>(data, size());
  }
};

using TensorView = BasicTensorView<double>;
using ConstTensorView = BasicTensorView<const double>;

// Every tensor of the autoencoder. The same struct doubles as the container
// for gradients and for optimizer moments.
struct ModelParameters {
  Dense input_adapter;
  std::vector<Dense> hidden_layers;  // hidden_sizes[l-1] -> hidden_sizes[l]
  Dense mu_head;
  Dense logvar_head;
  BatchNorm mu_bn;
  BatchNorm logvar_bn;
  BatchNorm decoder_bn;
  Matrix beta;  // K x V topic-word weights (unnormalized)

  // Correct shapes, zero weights, identity batchnorms.
  static ModelParameters shaped(const ModelConfig& config);
  // Glorot-uniform weights, zero biases, identity batchnorms.
  static ModelParameters initialized(const ModelConfig& config, std::mt19937_64& rng);

  // Fixed, name-tagged order shared by the optimizer, the checkpoint and the
  // gradient checker.
  std::vector<TensorView> tensors();
  std::vector<ConstTensorView> tensors() const;

  std::size_t trainable_count() const;
  ModelParameters zeros_like() const;
  bool all_finite() const;
  bool bitwise_equal(const ModelParameters& other) const;
};

}  // namespace ctm

#include "reference_net.hpp"

#include <cmath>

namespace ctm::testing {
namespace {

Rows linear(const Dense& layer, const Rows& x) {
  Rows y(x.size(), std::vector<double>(static_cast<std::size_t>(layer.weight.rows())));
  for (std::size_t b = 0; b < x.size(); ++b) {
    for (Eigen::Index o = 0; o < layer.weight.rows(); ++o) {
      double acc = layer.bias(o);
      for (Eigen::Index i = 0; i < layer.weight.cols(); ++i) {
        acc += layer.weight(o, i) * x[b][static_cast<std::size_t>(i)];
      }
      y[b][static_cast<std::size_t>(o)] = acc;
    }
  }
  return y;
}

void softplus_inplace(Rows& x) {
  for (auto& row : x) {
    for (auto& v : row) v = std::log(1.0 + std::exp(v));
  }
}

void mask_inplace(Rows& x, const Rows& mask) {
  if (mask.empty()) return;
  for (std::size_t b = 0; b < x.size(); ++b) {
    for (std::size_t j = 0; j < x[b].size(); ++j) x[b][j] *= mask[b][j];
  }
}

Rows batchnorm(const BatchNorm& bn, const Rows& x, bool train, double eps) {
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  Rows y = x;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    double var = 0.0;
    if (train) {
      for (std::size_t b = 0; b < n; ++b) mean += x[b][j];
      mean /= static_cast<double>(n);
      for (std::size_t b = 0; b < n; ++b) var += (x[b][j] - mean) * (x[b][j] - mean);
      var /= static_cast<double>(n);
    } else {
      mean = bn.running_mean(static_cast<Eigen::Index>(j));
      var = bn.running_var(static_cast<Eigen::Index>(j));
    }
    for (std::size_t b = 0; b < n; ++b) {
      y[b][j] = bn.scale(static_cast<Eigen::Index>(j)) * (x[b][j] - mean) / std::sqrt(var + eps) +
                bn.shift(static_cast<Eigen::Index>(j));
    }
  }
  return y;
}

std::vector<double> softmax(const std::vector<double>& v) {
  double mx = v.front();
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (auto& x : out) x /= sum;
  return out;
}

}  // namespace

Rows to_rows(const Matrix& m) {
  Rows out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  }
  return out;
}

ReferenceResult reference_forward(const ModelParameters& p, const ModelConfig& c, const Rows& inputs,
                                  const Rows& eps, const Rows& encoder_mask, const Rows& theta_mask,
                                  bool train, const Rows& targets, const PriorParams& prior) {
  Rows h = linear(p.input_adapter, inputs);
  softplus_inplace(h);
  for (const auto& layer : p.hidden_layers) {
    h = linear(layer, h);
    softplus_inplace(h);
  }
  if (train) mask_inplace(h, encoder_mask);

  ReferenceResult r;
  r.mu = batchnorm(p.mu_bn, linear(p.mu_head, h), train, c.batchnorm_eps);
  r.logvar = batchnorm(p.logvar_bn, linear(p.logvar_head, h), train, c.batchnorm_eps);

  const std::size_t n = inputs.size();
  const std::size_t K = r.mu.front().size();
  const auto V = static_cast<std::size_t>(p.beta.cols());
  Rows logits(n, std::vector<double>(V, 0.0));
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<double> z(K);
    for (std::size_t k = 0; k < K; ++k) z[k] = r.mu[b][k] + std::exp(0.5 * r.logvar[b][k]) * eps[b][k];
    r.theta.push_back(softmax(z));
  }
  Rows theta_used = r.theta;
  if (train) mask_inplace(theta_used, theta_mask);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t w = 0; w < V; ++w) {
      for (std::size_t k = 0; k < K; ++k) {
        logits[b][w] += theta_used[b][k] * p.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w));
      }
    }
  }
  const Rows normed = batchnorm(p.decoder_bn, logits, train, c.batchnorm_eps);
  for (std::size_t b = 0; b < n; ++b) r.word_dist.push_back(softmax(normed[b]));

  if (!targets.empty()) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t w = 0; w < V; ++w) r.recon -= targets[b][w] * std::log(r.word_dist[b][w]);
      for (std::size_t k = 0; k < K; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        const double vp = prior.variance(ki);
        const double diff = prior.mean(ki) - r.mu[b][k];
        r.kl += 0.5 * (std::exp(r.logvar[b][k]) / vp + diff * diff / vp - 1.0 + std::log(vp) - r.logvar[b][k]);
      }
    }
    r.recon /= static_cast<double>(n);
    r.kl /= static_cast<double>(n);
  }
  return r;
}

}  // namespace ctm::testing

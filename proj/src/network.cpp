#include "ctm/network.hpp"

#include <cmath>

#include "ctm/error.hpp"

namespace ctm {
namespace {

struct BatchNormTrace {
  Matrix normalized;  // x_hat
  Vector inv_std;
  Vector mean;
  Vector var;
};

Matrix batchnorm_forward(const BatchNorm& bn, const Matrix& x, Phase phase, double eps,
                         BatchNormTrace& trace) {
  if (phase == Phase::kTrain) {
    trace.mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - trace.mean.transpose();
    trace.var = centered.array().square().colwise().mean().transpose();
    trace.inv_std = (trace.var.array() + eps).rsqrt().matrix();
    trace.normalized = centered * trace.inv_std.asDiagonal();
  } else {
    trace.inv_std = (bn.running_var.array() + eps).rsqrt().matrix();
    trace.normalized = (x.rowwise() - bn.running_mean.transpose()) * trace.inv_std.asDiagonal();
  }
  Matrix y = trace.normalized * bn.scale.asDiagonal();
  y.rowwise() += bn.shift.transpose();
  return y;
}

// Training-phase backward through batch statistics.
Matrix batchnorm_backward(const BatchNorm& bn, const BatchNormTrace& trace, const Matrix& dy,
                          BatchNorm& grad) {
  const double n = static_cast<double>(dy.rows());
  grad.shift = dy.colwise().sum().transpose();
  grad.scale = dy.cwiseProduct(trace.normalized).colwise().sum().transpose();
  const Matrix dxhat = dy * bn.scale.asDiagonal();
  const RowVector sum_dxhat = dxhat.colwise().sum();
  const RowVector sum_dxhat_xhat = dxhat.cwiseProduct(trace.normalized).colwise().sum();
  Matrix dx = n * dxhat;
  dx.rowwise() -= sum_dxhat;
  dx -= trace.normalized * sum_dxhat_xhat.asDiagonal();
  return dx * (trace.inv_std / n).asDiagonal();
}

Matrix affine(const Dense& layer, const Matrix& x) {
  Matrix y = x * layer.weight.transpose();
  y.rowwise() += layer.bias.transpose();
  return y;
}

Matrix softplus(const Matrix& a) {
  return a.unaryExpr([](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); });
}

Matrix sigmoid(const Matrix& a) {
  return a.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

Matrix log_softmax_rows(const Matrix& logits) {
  const Vector row_max = logits.rowwise().maxCoeff();
  Matrix shifted = logits.colwise() - row_max;
  const Vector lse = shifted.array().exp().rowwise().sum().log().matrix();
  shifted.colwise() -= lse;
  return shifted;
}

void check_inputs(const ModelConfig& config, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != config.input_dim()) {
    throw ShapeError("input rows have " + std::to_string(inputs.cols()) +
                     " columns, model expects " + std::to_string(config.input_dim()));
  }
  if (inputs.rows() == 0) throw ShapeError("empty input batch");
}

void check_mask(const Matrix& mask, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (mask.size() != 0 && (mask.rows() != rows || mask.cols() != cols)) {
    throw ShapeError(std::string(what) + " has the wrong shape");
  }
}

struct EncoderTrace {
  std::vector<Matrix> pre;   // pre-activation of each layer (adapter first)
  std::vector<Matrix> post;  // softplus output of each layer
  Matrix dropped;            // last hidden after dropout
  BatchNormTrace mu_bn;
  BatchNormTrace logvar_bn;
  Matrix mu;
  Matrix logvar;
};

EncoderTrace run_encoder(const ModelParameters& params, const ModelConfig& config,
                         const Matrix& inputs, Phase phase, const Matrix& encoder_mask) {
  check_inputs(config, inputs);
  EncoderTrace t;
  t.pre.push_back(affine(params.input_adapter, inputs));
  t.post.push_back(softplus(t.pre.back()));
  for (const auto& layer : params.hidden_layers) {
    t.pre.push_back(affine(layer, t.post.back()));
    t.post.push_back(softplus(t.pre.back()));
  }
  const Matrix& last = t.post.back();
  check_mask(encoder_mask, last.rows(), last.cols(), "encoder dropout mask");
  if (phase == Phase::kTrain && encoder_mask.size() != 0) {
    t.dropped = last.cwiseProduct(encoder_mask);
  } else {
    t.dropped = last;
  }
  t.mu = batchnorm_forward(params.mu_bn, affine(params.mu_head, t.dropped), phase,
                           config.batchnorm_eps, t.mu_bn);
  t.logvar = batchnorm_forward(params.logvar_bn, affine(params.logvar_head, t.dropped), phase,
                               config.batchnorm_eps, t.logvar_bn);
  return t;
}

struct DecoderTrace {
  Matrix theta;
  Matrix theta_dropped;
  BatchNormTrace bn;
  Matrix log_word_dist;
};

DecoderTrace run_decoder(const Matrix& z, const ModelParameters& params, const ModelConfig& config,
                         Phase phase, const Matrix& theta_mask) {
  if (z.cols() != params.beta.rows()) throw ShapeError("latent width does not match num_topics");
  check_mask(theta_mask, z.rows(), z.cols(), "theta dropout mask");
  DecoderTrace t;
  t.theta = softmax_rows(z);
  t.theta_dropped = (phase == Phase::kTrain && theta_mask.size() != 0)
                        ? Matrix(t.theta.cwiseProduct(theta_mask))
                        : t.theta;
  const Matrix logits = t.theta_dropped * params.beta;
  t.log_word_dist = log_softmax_rows(
      batchnorm_forward(params.decoder_bn, logits, phase, config.batchnorm_eps, t.bn));
  return t;
}

void check_targets(const ModelConfig& config, const Matrix& inputs, const Matrix& targets) {
  if (targets.rows() != inputs.rows() ||
      static_cast<std::size_t>(targets.cols()) != config.vocab_size) {
    throw ShapeError("target matrix must be batch x vocab_size");
  }
  const Vector sums = targets.rowwise().sum();
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (!(sums(i) > 0.0)) {
      throw InvalidArgument("bow target row " + std::to_string(i) + " has zero word count");
    }
  }
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::mt19937_64& rng) {
  Matrix mask(rows, cols);
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) mask(r, c) = keep(rng) ? scale : 0.0;
  }
  return mask;
}

}  // namespace

NoiseDraws draw_noise(const ModelConfig& config, Eigen::Index batch, std::mt19937_64& rng,
                      bool with_dropout) {
  const auto K = static_cast<Eigen::Index>(config.num_topics);
  NoiseDraws noise;
  noise.eps.resize(batch, K);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < batch; ++r) {
    for (Eigen::Index c = 0; c < K; ++c) noise.eps(r, c) = normal(rng);
  }
  if (with_dropout && config.dropout_rate > 0.0) {
    const auto H = static_cast<Eigen::Index>(config.hidden_sizes.back());
    noise.encoder_mask = dropout_mask(batch, H, config.dropout_rate, rng);
    noise.theta_mask = dropout_mask(batch, K, config.dropout_rate, rng);
  }
  return noise;
}

NoiseDraws zero_noise(const ModelConfig& config, Eigen::Index batch) {
  NoiseDraws noise;
  noise.eps = Matrix::Zero(batch, static_cast<Eigen::Index>(config.num_topics));
  return noise;
}

Posterior encode(const ModelParameters& params, const ModelConfig& config, const Matrix& inputs,
                 Phase phase, const Matrix& encoder_mask) {
  EncoderTrace t = run_encoder(params, config, inputs, phase, encoder_mask);
  return {std::move(t.mu), std::move(t.logvar)};
}

Matrix reparameterize(const Matrix& mu, const Matrix& logvar, const Matrix& eps) {
  if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || mu.rows() != eps.rows() ||
      mu.cols() != eps.cols()) {
    throw ShapeError("reparameterize: mu, logvar and eps must share a shape");
  }
  return mu + (0.5 * logvar.array()).exp().matrix().cwiseProduct(eps);
}

Matrix softmax_rows(const Matrix& logits) { return log_softmax_rows(logits).array().exp().matrix(); }

Matrix decode(const Matrix& z, const ModelParameters& params, const ModelConfig& config,
              Phase phase, const Matrix& theta_mask) {
  return run_decoder(z, params, config, phase, theta_mask).log_word_dist.array().exp().matrix();
}

Vector gaussian_kl(const Matrix& mu_q, const Matrix& logvar_q, const Matrix& mu_p, const Matrix& logvar_p) {
  if (mu_q.rows() != mu_p.rows() || mu_q.cols() != mu_p.cols() || logvar_q.rows() != mu_q.rows() ||
      logvar_q.cols() != mu_q.cols() || logvar_p.rows() != mu_p.rows() || logvar_p.cols() != mu_p.cols()) {
    throw ShapeError("gaussian_kl arguments differ in shape");
  }
  // Written in log-variances so that identical arguments give exactly 0.
  const Eigen::ArrayXXd log_ratio = logvar_q.array() - logvar_p.array();
  const Eigen::ArrayXXd diff = mu_p.array() - mu_q.array();
  const Eigen::ArrayXXd terms = log_ratio.exp() + diff.square() * (-logvar_p.array()).exp() - 1.0 - log_ratio;
  return 0.5 * terms.rowwise().sum().matrix();
}

Vector gaussian_kl(const Matrix& mu, const Matrix& logvar, const PriorParams& prior) {
  if (mu.cols() != prior.mean.size()) throw ShapeError("prior size does not match num_topics");
  const RowVector log_var_p = prior.variance.array().log().matrix().transpose();
  return gaussian_kl(mu, logvar, prior.mean.transpose().replicate(mu.rows(), 1), log_var_p.replicate(mu.rows(), 1));
}

LossTerms elbo_loss(const ModelParameters& params, const ModelConfig& config,
                    const PriorParams& prior, const Matrix& inputs, const Matrix& targets,
                    const NoiseDraws& noise, Phase phase) {
  check_targets(config, inputs, targets);
  const EncoderTrace enc = run_encoder(params, config, inputs, phase, noise.encoder_mask);
  const Matrix z = reparameterize(enc.mu, enc.logvar, noise.eps);
  const DecoderTrace dec = run_decoder(z, params, config, phase, noise.theta_mask);

  const double n = static_cast<double>(inputs.rows());
  LossTerms loss;
  loss.recon = -targets.cwiseProduct(dec.log_word_dist).sum() / n;
  loss.kl = gaussian_kl(enc.mu, enc.logvar, prior).sum() / n;
  loss.total = loss.recon + loss.kl;
  return loss;
}

GradientResult compute_gradients(const ModelParameters& params, const ModelConfig& config,
                                 const PriorParams& prior, const Matrix& inputs,
                                 const Matrix& targets, const NoiseDraws& noise) {
  check_targets(config, inputs, targets);
  const EncoderTrace enc = run_encoder(params, config, inputs, Phase::kTrain, noise.encoder_mask);
  const Matrix sigma = (0.5 * enc.logvar.array()).exp().matrix();
  const Matrix z = reparameterize(enc.mu, enc.logvar, noise.eps);
  const DecoderTrace dec = run_decoder(z, params, config, Phase::kTrain, noise.theta_mask);

  const double n = static_cast<double>(inputs.rows());
  const Vector kl_rows = gaussian_kl(enc.mu, enc.logvar, prior);

  GradientResult result;
  result.loss.recon = -targets.cwiseProduct(dec.log_word_dist).sum() / n;
  result.loss.kl = kl_rows.sum() / n;
  result.loss.total = result.loss.recon + result.loss.kl;
  result.stats = {enc.mu_bn.mean,     enc.mu_bn.var, enc.logvar_bn.mean, enc.logvar_bn.var,
                  dec.bn.mean,        dec.bn.var,    inputs.rows()};

  ModelParameters& g = result.grads;
  g = params.zeros_like();

  // Reconstruction: d/dY of -sum n_w log softmax(Y)_w = N p - n.
  const Vector doc_len = targets.rowwise().sum();
  const Matrix word_dist = dec.log_word_dist.array().exp().matrix();
  const Matrix d_logits_bn = (doc_len.asDiagonal() * word_dist - targets) / n;

  const Matrix d_logits = batchnorm_backward(params.decoder_bn, dec.bn, d_logits_bn, g.decoder_bn);
  g.beta = dec.theta_dropped.transpose() * d_logits;
  Matrix d_theta = d_logits * params.beta.transpose();
  if (noise.theta_mask.size() != 0) d_theta = d_theta.cwiseProduct(noise.theta_mask);

  // Softmax Jacobian: dz = theta * (dtheta - <dtheta, theta>).
  const Vector inner = d_theta.cwiseProduct(dec.theta).rowwise().sum();
  const Matrix dz = dec.theta.cwiseProduct(d_theta.colwise() - inner);

  const RowVector inv_var_p = prior.variance.cwiseInverse().transpose();
  Matrix d_mu = (enc.mu.rowwise() - prior.mean.transpose()) * inv_var_p.asDiagonal();
  d_mu = dz + d_mu / n;
  Matrix d_logvar = (enc.logvar.array().exp().matrix() * inv_var_p.asDiagonal()).array() - 1.0;
  d_logvar = dz.cwiseProduct(noise.eps).cwiseProduct(sigma) * 0.5 + d_logvar * (0.5 / n);

  const Matrix d_mu_pre = batchnorm_backward(params.mu_bn, enc.mu_bn, d_mu, g.mu_bn);
  const Matrix d_logvar_pre = batchnorm_backward(params.logvar_bn, enc.logvar_bn, d_logvar, g.logvar_bn);

  g.mu_head.weight = d_mu_pre.transpose() * enc.dropped;
  g.mu_head.bias = d_mu_pre.colwise().sum().transpose();
  g.logvar_head.weight = d_logvar_pre.transpose() * enc.dropped;
  g.logvar_head.bias = d_logvar_pre.colwise().sum().transpose();

  Matrix d_hidden = d_mu_pre * params.mu_head.weight + d_logvar_pre * params.logvar_head.weight;
  if (noise.encoder_mask.size() != 0) d_hidden = d_hidden.cwiseProduct(noise.encoder_mask);

  for (std::size_t l = enc.pre.size(); l-- > 0;) {
    const Matrix d_pre = d_hidden.cwiseProduct(sigmoid(enc.pre[l]));
    const Dense& layer = l == 0 ? params.input_adapter : params.hidden_layers[l - 1];
    Dense& grad = l == 0 ? g.input_adapter : g.hidden_layers[l - 1];
    const Matrix& below = l == 0 ? inputs : enc.post[l - 1];
    grad.weight = d_pre.transpose() * below;
    grad.bias = d_pre.colwise().sum().transpose();
    if (l > 0) d_hidden = d_pre * layer.weight;
  }

  // Frozen tensors carry no gradient.
  for (auto& t : g.tensors()) {
    if (!t.trainable) t.map().setZero();
  }
  return result;
}

void update_running_stats(ModelParameters& params, const ModelConfig& config,
                          const BatchStatistics& stats) {
  const double m = config.batchnorm_momentum;
  const double n = static_cast<double>(stats.batch_size);
  const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
  const auto blend = [&](BatchNorm& bn, const Vector& mean, const Vector& var) {
    bn.running_mean = (1.0 - m) * bn.running_mean + m * mean;
    bn.running_var = (1.0 - m) * bn.running_var + (m * unbias) * var;
  };
  blend(params.mu_bn, stats.mu_mean, stats.mu_var);
  blend(params.logvar_bn, stats.logvar_mean, stats.logvar_var);
  blend(params.decoder_bn, stats.decoder_mean, stats.decoder_var);
}

}  // namespace ctm

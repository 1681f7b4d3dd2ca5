#include "ctm/prior.hpp"

#include "ctm/error.hpp"

namespace ctm {

PriorParams laplace_prior(std::size_t num_topics, double alpha) {
  if (num_topics < 2) throw InvalidArgument("laplace_prior needs at least 2 topics");
  if (!(alpha > 0.0)) throw InvalidArgument("laplace_prior needs alpha > 0");
  auto prior = laplace_prior(Vector::Constant(static_cast<Eigen::Index>(num_topics), alpha));
  // log(alpha) minus a summed mean of identical logs is not always exactly 0.
  prior.mean.setZero();
  return prior;
}

PriorParams laplace_prior(const Vector& alpha) {
  const auto K = alpha.size();
  if (K < 2) throw InvalidArgument("laplace_prior needs at least 2 topics");
  if ((alpha.array() <= 0.0).any()) throw InvalidArgument("laplace_prior needs alpha > 0");

  const double k = static_cast<double>(K);
  const Vector log_alpha = alpha.array().log().matrix();
  const Vector inv_alpha = alpha.cwiseInverse();

  PriorParams prior;
  prior.mean = (log_alpha.array() - log_alpha.mean()).matrix();
  // sigma2_k = (1/alpha_k)(1 - 2/K) + (1/K^2) sum_j 1/alpha_j
  prior.variance =
      (inv_alpha.array() * (1.0 - 2.0 / k) + inv_alpha.sum() / (k * k)).matrix();
  return prior;
}

}  // namespace ctm

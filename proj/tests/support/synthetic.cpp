#include "synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace ctm::testing {
namespace {

std::vector<double> dirichlet(std::size_t k, double alpha, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> x(k);
  double sum = 0.0;
  for (auto& v : x) {
    v = gamma(rng);
    sum += v;
  }
  if (sum == 0.0) {
    // All draws underflowed; fall back to a single random topic.
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    x[pick(rng)] = 1.0;
    return x;
  }
  for (auto& v : x) v /= sum;
  return x;
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

std::vector<float> to_floats(const Vector& v) {
  std::vector<float> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v(i));
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const auto K = static_cast<Eigen::Index>(spec.topics);
  const auto V = static_cast<Eigen::Index>(spec.vocab_size);
  const auto E = static_cast<Eigen::Index>(spec.embedding_dim);

  SyntheticCorpus out;
  std::vector<std::string> tokens;
  for (Eigen::Index w = 0; w < V; ++w) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%03d", static_cast<int>(w));
    tokens.emplace_back(buf);
  }
  out.vocab = Vocabulary(tokens);

  // Each topic owns a contiguous block of anchor words.
  out.topic_word = Matrix::Constant(K, V, spec.off_topic_weight);
  const Eigen::Index block = V / K;
  for (Eigen::Index k = 0; k < K; ++k) out.topic_word.block(k, k * block, 1, block).setOnes();
  for (Eigen::Index k = 0; k < K; ++k) out.topic_word.row(k) /= out.topic_word.row(k).sum();

  const Matrix shared = gaussian(E, K, 1.0, rng);
  const double rsd = 1.0 / std::sqrt(static_cast<double>(E));
  const Matrix view_a = Matrix::Identity(E, E) + spec.view_distortion * gaussian(E, E, rsd, rng);
  const Matrix view_b = Matrix::Identity(E, E) + spec.view_distortion * gaussian(E, E, rsd, rng);

  out.train_view_a = EmbeddingMatrix(static_cast<std::uint32_t>(E));
  out.test_view_a = EmbeddingMatrix(static_cast<std::uint32_t>(E));
  out.test_view_b = EmbeddingMatrix(static_cast<std::uint32_t>(E));

  std::uniform_int_distribution<std::size_t> length(spec.min_length, spec.max_length);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  std::vector<std::discrete_distribution<Eigen::Index>> word_given_topic;
  for (Eigen::Index k = 0; k < K; ++k) {
    std::vector<double> weights(static_cast<std::size_t>(V));
    for (Eigen::Index w = 0; w < V; ++w) weights[static_cast<std::size_t>(w)] = out.topic_word(k, w);
    word_given_topic.emplace_back(weights.begin(), weights.end());
  }

  const std::size_t first_test = spec.documents - spec.held_out;
  for (std::size_t d = 0; d < spec.documents; ++d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "doc-%05zu", d);
    const std::string id = buf;

    const auto theta = dirichlet(spec.topics, spec.doc_alpha, rng);
    std::discrete_distribution<Eigen::Index> pick_topic(theta.begin(), theta.end());
    BowVector bow;
    bow.vocab_size = spec.vocab_size;
    const std::size_t len = length(rng);
    for (std::size_t t = 0; t < len; ++t) {
      const auto k = pick_topic(rng);
      ++bow.counts[static_cast<std::size_t>(word_given_topic[static_cast<std::size_t>(k)](rng))];
    }

    const Vector latent = shared * Eigen::Map<const Vector>(theta.data(), K);
    const auto embed = [&](const Matrix& view) {
      Vector e = view * latent;
      for (Eigen::Index i = 0; i < E; ++i) e(i) += noise(rng);
      return to_floats(e);
    };
    if (d < first_test) {
      out.train_ids.push_back(id);
      out.train_bows.push_back(std::move(bow));
      out.train_view_a.add(id, embed(view_a));
    } else {
      out.test_ids.push_back(id);
      out.test_bows.push_back(std::move(bow));
      out.test_view_a.add(id, embed(view_a));
      out.test_view_b.add(id, embed(view_b));
      out.test_theta.push_back(theta);
    }
  }
  return out;
}

Matrix embedding_rows(const EmbeddingMatrix& m, const std::vector<std::string>& ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = m.find(ids[i]);
    const auto vec = m.vector(static_cast<std::size_t>(row));
    for (std::size_t c = 0; c < vec.size(); ++c) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = vec[c];
    }
  }
  return out;
}

}  // namespace ctm::testing

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ctm/checkpoint.hpp"
#include "ctm/error.hpp"
#include "ctm/inference.hpp"
#include "ctm/network.hpp"
#include "ctm/trainer.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

namespace ctm {
namespace {

using testing::embedding_rows;
using testing::make_synthetic_corpus;
using testing::SyntheticCorpus;
using testing::SyntheticSpec;

const SyntheticCorpus& small_corpus() {
  static const SyntheticCorpus corpus = [] {
    SyntheticSpec spec;
    spec.documents = 260;
    spec.held_out = 60;
    spec.topics = 4;
    spec.vocab_size = 40;
    spec.embedding_dim = 8;
    spec.min_length = 20;
    spec.max_length = 40;
    return make_synthetic_corpus(spec);
  }();
  return corpus;
}

ModelConfig small_config(InputMode mode = InputMode::kContextual) {
  ModelConfig c;
  c.num_topics = 4;
  c.vocab_size = 40;
  c.input_mode = mode;
  c.embedding_dim = mode == InputMode::kBow ? 0 : 8;
  c.hidden_sizes = {16};
  c.batch_size = 32;
  c.epochs = 8;
  c.seed = 11;
  return c;
}

const TopicModel& trained_model() {
  static const TopicModel model = train(small_corpus().training_input(), small_corpus().vocab, small_config());
  return model;
}

TEST(TrainerTest, ZeroEpochsReturnsTheInitialization) {
  auto c = small_config();
  c.epochs = 0;
  const auto model = train(small_corpus().training_input(), small_corpus().vocab, c);
  std::mt19937_64 rng(c.seed);
  EXPECT_TRUE(model.params.bitwise_equal(ModelParameters::initialized(c, rng)));
  EXPECT_TRUE(model.training_log.epochs.empty());
  EXPECT_EQ(model.training_log.documents_used, small_corpus().train_ids.size());
}

TEST(TrainerTest, LossDecreasesAndEveryEpochIsReported) {
  std::vector<std::size_t> seen;
  const auto model = train(small_corpus().training_input(), small_corpus().vocab, small_config(),
                           [&](std::size_t epoch, const EpochLoss&) { seen.push_back(epoch); });
  const auto& log = model.training_log.epochs;
  ASSERT_EQ(log.size(), 8u);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}));
  EXPECT_LT(log.back().total, log.front().total);
  for (const auto& e : log) {
    EXPECT_NEAR(e.total, e.recon + e.kl, 1e-9 * e.total);
    EXPECT_GE(e.kl, 0.0);
  }
  EXPECT_TRUE(model.params.all_finite());
}

TEST(TrainerTest, DeterministicGivenSeed) {
  const auto a = train(small_corpus().training_input(), small_corpus().vocab, small_config());
  EXPECT_TRUE(a.params.bitwise_equal(trained_model().params));
  EXPECT_TRUE(a.training_log == trained_model().training_log);
  auto c = small_config();
  c.seed = 12;
  const auto b = train(small_corpus().training_input(), small_corpus().vocab, c);
  EXPECT_FALSE(b.params.bitwise_equal(a.params));
}

TEST(TrainerTest, ZeroBowDocumentsAreExcludedAndCounted) {
  auto input = small_corpus().training_input();
  input.bows[3].counts.clear();
  input.bows[10].counts.clear();
  auto c = small_config();
  c.epochs = 2;
  const auto model = train(input, small_corpus().vocab, c);
  EXPECT_EQ(model.training_log.excluded_zero_bow, 2u);
  EXPECT_EQ(model.training_log.documents_used, input.ids.size() - 2);
  EXPECT_TRUE(model.params.all_finite());
}

TEST(TrainerTest, TrailingSingletonBatchIsHandled) {
  auto input = small_corpus().training_input();
  input.ids.resize(33);
  input.bows.resize(33);
  auto c = small_config();
  c.epochs = 3;
  const auto model = train(input, small_corpus().vocab, c);
  EXPECT_TRUE(model.params.all_finite());
  EXPECT_TRUE(model.params.mu_bn.running_var.allFinite());
}

TEST(TrainerTest, InputValidation) {
  const auto& corpus = small_corpus();
  auto input = corpus.training_input();
  input.embeddings = nullptr;
  EXPECT_THROW(train(input, corpus.vocab, small_config()), InvalidArgument);

  EmbeddingMatrix partial(8);
  for (std::size_t i = 1; i < corpus.train_ids.size(); ++i) {
    partial.add(corpus.train_ids[i], corpus.train_view_a.vector(i));
  }
  input.embeddings = &partial;
  try {
    train(input, corpus.vocab, small_config());
    FAIL() << "expected a missing-embedding error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find(corpus.train_ids[0]), std::string::npos);
  }

  auto c = small_config();
  c.vocab_size = 41;
  EXPECT_THROW(train(corpus.training_input(), corpus.vocab, c), InvalidArgument);
  c = small_config();
  c.embedding_dim = 9;
  EXPECT_THROW(train(corpus.training_input(), corpus.vocab, c), ShapeError);
}

TEST(TrainerTest, BowModeNeedsNoEmbeddings) {
  auto input = small_corpus().training_input();
  input.embeddings = nullptr;
  auto c = small_config(InputMode::kBow);
  c.epochs = 2;
  EXPECT_NO_THROW(train(input, small_corpus().vocab, c));
  c = small_config(InputMode::kCombined);
  c.epochs = 2;
  EXPECT_NO_THROW(train(small_corpus().training_input(), small_corpus().vocab, c));
}

TEST(ModelInputTest, RowLayoutPerMode) {
  BowVector bow;
  bow.vocab_size = 3;
  bow.counts = {{0, 2}, {2, 1}};
  const std::vector<float> emb = {0.5f, -1.0f};
  ModelConfig c;
  c.vocab_size = 3;
  c.embedding_dim = 2;
  c.input_mode = InputMode::kContextual;
  EXPECT_EQ(make_input_row(c, emb, &bow), (RowVector(2) << 0.5, -1.0).finished());
  c.input_mode = InputMode::kCombined;
  EXPECT_EQ(make_input_row(c, emb, &bow), (RowVector(5) << 0.5, -1.0, 2, 0, 1).finished());
  c.input_mode = InputMode::kBow;
  c.embedding_dim = 0;
  EXPECT_EQ(make_input_row(c, {}, &bow), (RowVector(3) << 2, 0, 1).finished());

  const BowVector* rows[] = {&bow, &bow};
  const Matrix dense = dense_targets(rows, 3);
  EXPECT_EQ(dense.rows(), 2);
  EXPECT_EQ(dense.row(1), (RowVector(3) << 2, 0, 1).finished());
}

TEST(InferenceTest, NoiselessIsSoftmaxOfPosteriorMean) {
  const auto& model = trained_model();
  const Matrix x = embedding_rows(small_corpus().test_view_a, small_corpus().test_ids);
  std::mt19937_64 rng(1);
  const auto dists = infer_topics(model, x, {.samples = 1, .noiseless = true}, rng);
  const Matrix expected = softmax_rows(encode(model.params, model.config, x, Phase::kEval).mu);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_DOUBLE_EQ(dists[i].theta[k], expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    }
  }
}

TEST(InferenceTest, OutputsLieOnTheSimplex) {
  const auto& model = trained_model();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 3.0);
  Matrix x(200, 8);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  for (const auto& d : infer_topics(model, x, {.samples = 20}, rng)) {
    EXPECT_NEAR(std::accumulate(d.theta.begin(), d.theta.end(), 0.0), 1.0, 1e-12);
    EXPECT_TRUE(std::all_of(d.theta.begin(), d.theta.end(), [](double v) { return v >= 0.0; }));
  }
}

TEST(InferenceTest, SameSeedSameResultAndBatchMatchesRows) {
  const auto& model = trained_model();
  const Matrix x = embedding_rows(small_corpus().test_view_a, small_corpus().test_ids).topRows(5);
  std::mt19937_64 a(3), b(3);
  const auto batch = infer_topics(model, x, {.samples = 50}, a);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    EXPECT_EQ(infer_topics(model, RowVector(x.row(r)), {.samples = 50}, b).theta,
              batch[static_cast<std::size_t>(r)].theta);
  }
}

TEST(InferenceTest, MonteCarloEstimateConverges) {
  const auto& model = trained_model();
  const RowVector x = embedding_rows(small_corpus().test_view_a, small_corpus().test_ids).row(0);
  std::mt19937_64 rng(4);
  // Per-draw spread, from single-sample estimates.
  std::vector<double> sum(4, 0.0), sum2(4, 0.0);
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto d = infer_topics(model, x, {.samples = 1}, rng);
    for (std::size_t k = 0; k < 4; ++k) {
      sum[k] += d.theta[k];
      sum2[k] += d.theta[k] * d.theta[k];
    }
  }
  const auto small = infer_topics(model, x, {.samples = 10000}, rng);
  const auto large = infer_topics(model, x, {.samples = 100000}, rng);
  for (std::size_t k = 0; k < 4; ++k) {
    const double var = sum2[k] / n - (sum[k] / n) * (sum[k] / n);
    const double se = std::sqrt(var / 1e4 + var / 1e5);
    EXPECT_LE(std::abs(small.theta[k] - large.theta[k]), 3.0 * se + 1e-15) << "topic " << k;
  }
}

TEST(InferenceTest, CrossViewArgmaxAgreementBeatsChance) {
  // Briefly trained toy model; the full-size threshold lives in the acceptance suite.
  const auto& model = trained_model();
  const auto& corpus = small_corpus();
  std::mt19937_64 rng(5);
  const auto a = infer_topics(model, embedding_rows(corpus.test_view_a, corpus.test_ids), {}, rng);
  const auto b = infer_topics(model, embedding_rows(corpus.test_view_b, corpus.test_ids), {}, rng);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += a[i].argmax() == b[i].argmax();
  EXPECT_GE(agree, 2 * a.size() / 4);  // twice the 1-in-4 chance rate
}

TEST(InferenceTest, RejectsBadInput) {
  std::mt19937_64 rng(6);
  EXPECT_THROW(infer_topics(trained_model(), RowVector(RowVector::Zero(8)), {.samples = 0}, rng), InvalidArgument);
  EXPECT_THROW(infer_topics(trained_model(), RowVector(RowVector::Zero(9)), {}, rng), ShapeError);
}

TEST(TopicWordsTest, MatchesBruteForceSortWithTies) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> level(0, 5);
  Matrix beta(6, 30);
  for (Eigen::Index i = 0; i < beta.size(); ++i) beta.data()[i] = level(rng) * 0.5;
  const auto top = topic_word_indices(beta, 10);
  for (Eigen::Index k = 0; k < beta.rows(); ++k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (Eigen::Index w = 0; w < beta.cols(); ++w) all.emplace_back(-beta(k, w), static_cast<std::size_t>(w));
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(top[static_cast<std::size_t>(k)][i], all[i].second);
  }
  EXPECT_THROW(topic_word_indices(beta, 0), InvalidArgument);
  EXPECT_THROW(topic_word_indices(beta, 31), InvalidArgument);
  const auto words = topic_words(trained_model(), 3);
  ASSERT_EQ(words.size(), 4u);
  EXPECT_EQ(words[0].size(), 3u);
}

TEST(TopicDistributionTest, ArgmaxTiesGoToLowestIndex) {
  EXPECT_EQ((TopicDistribution{{0.2, 0.4, 0.4}}).argmax(), 1u);
  EXPECT_EQ((TopicDistribution{{0.25, 0.25, 0.25, 0.25}}).argmax(), 0u);
}

TEST(CheckpointTest, RoundTripIsBitIdentical) {
  const auto& model = trained_model();
  const auto bytes = serialize_model(model);
  const auto loaded = parse_model(bytes);
  EXPECT_TRUE(loaded.params.bitwise_equal(model.params));
  EXPECT_EQ(loaded.config, model.config);
  EXPECT_EQ(loaded.vocab, model.vocab);
  EXPECT_TRUE(loaded.training_log == model.training_log);
  EXPECT_EQ(serialize_model(loaded), bytes);

  testing::TempDir dir;
  save_model(model, dir / "m.ckpt");
  EXPECT_TRUE(load_model(dir / "m.ckpt").params.bitwise_equal(model.params));
}

TEST(CheckpointTest, ByteLengthIsHeaderPlusPayloads) {
  const auto bytes = serialize_model(trained_model());
  const auto manifest = read_checkpoint_manifest(bytes);
  const auto header = static_cast<std::size_t>(std::find(bytes.begin(), bytes.end(), '\n') - bytes.begin()) + 1;
  std::size_t payload = 0;
  for (const auto& t : manifest.at("tensors")) {
    const auto shape = t.at("shape").get<std::vector<std::size_t>>();
    EXPECT_EQ(t.at("length").get<std::size_t>(), shape[0] * shape[1] * sizeof(double));
    EXPECT_EQ(t.at("offset").get<std::size_t>(), payload);
    payload += t.at("length").get<std::size_t>();
  }
  EXPECT_EQ(bytes.size(), header + payload);
  EXPECT_EQ(manifest.at("layout"), "row-major");
  EXPECT_EQ(manifest.at("version"), kCheckpointVersion);
}

TEST(CheckpointTest, RejectsCorruptTruncatedAndForeignFiles) {
  const auto bytes = serialize_model(trained_model());
  auto corrupt = bytes;
  corrupt[0] = 'X';
  EXPECT_THROW(parse_model(corrupt), CheckpointError);

  auto truncated = bytes;
  truncated.resize(bytes.size() - 5);
  try {
    parse_model(truncated);
    FAIL() << "expected truncation error";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(parse_model(trailing), CheckpointError);

  auto manifest = read_checkpoint_manifest(bytes);
  const auto header = static_cast<std::size_t>(std::find(bytes.begin(), bytes.end(), '\n') - bytes.begin()) + 1;
  manifest["version"] = kCheckpointVersion + 1;
  const std::string line = manifest.dump() + "\n";
  std::vector<std::uint8_t> future(line.begin(), line.end());
  future.insert(future.end(), bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  try {
    parse_model(future);
    FAIL() << "expected version error";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }

  const std::string junk = "not a checkpoint";
  EXPECT_THROW(parse_model(std::vector<std::uint8_t>(junk.begin(), junk.end())), CheckpointError);
  EXPECT_THROW(load_model("/nonexistent/model.ckpt"), IoError);
}

TEST(CheckpointTest, ConfigJsonRoundTrip) {
  auto c = small_config(InputMode::kCombined);
  c.learn_decoder_bn_scale = true;
  c.hidden_sizes = {7, 3};
  nlohmann::json j = c;
  EXPECT_EQ(j.get<ModelConfig>(), c);
}

}  // namespace
}  // namespace ctm

#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "ctm/agreement.hpp"
#include "ctm/checkpoint.hpp"
#include "ctm/coherence.hpp"
#include "ctm/corpus.hpp"
#include "ctm/crosslingual.hpp"
#include "ctm/embeddings.hpp"
#include "ctm/inference.hpp"
#include "ctm/records.hpp"
#include "ctm/trainer.hpp"
#include "outputs.hpp"

namespace ctm::cli {
namespace {

using Clock = std::chrono::steady_clock;

void require_file(const Path& path, const std::string& flag) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path.string());
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string path_string(const std::optional<Path>& p) { return p ? p->string() : std::string(); }

// Stages the manifest, then moves every output into place.
void finish(OutputSet& outputs, RunManifest manifest, const Path& primary, Clock::time_point start) {
  const auto manifest_file = outputs.stage(manifest_path_for(primary));
  manifest.outputs = outputs.final_paths();
  manifest.duration_seconds = seconds_since(start);
  write_text(manifest_file, manifest.to_json().dump(2) + "\n");
  outputs.commit();
}

void emit(const nlohmann::json& result, const std::string& command, nlohmann::json config,
          nlohmann::json inputs, const std::optional<Path>& out, Clock::time_point start) {
  std::cout << result.dump() << std::endl;
  if (!out) return;
  OutputSet outputs;
  write_text(outputs.stage(*out), result.dump(2) + "\n");
  finish(outputs, {command, std::move(config), std::move(inputs), {}, 0, 0.0}, *out, start);
}

PredictionSet load_predictions(const Path& path, const std::string& flag) {
  require_file(path, flag);
  return read_predictions(path);
}

TopicModel load_checkpoint(const Path& path) {
  require_file(path, "--model");
  return load_model(path);
}

EmbeddingMatrix load_embeddings(const Path& path, const std::string& flag) {
  require_file(path, flag);
  return read_embeddings(path);
}

}  // namespace

std::string version_json() {
  return nlohmann::json{{"name", "ctm"},
                        {"version", CTM_VERSION},
                        {"checkpoint_version", kCheckpointVersion},
                        {"embedding_format_version", kEmbeddingFormatVersion}}
      .dump();
}

void run_preprocess(const PreprocessOptions& opts) {
  const auto start = Clock::now();
  require_file(opts.input, "--input");
  if (opts.stopwords) require_file(*opts.stopwords, "--stopwords");
  if (opts.vocab_size == 0) throw UsageError("--vocab-size must be at least 1");
  if (opts.max_tokens == 0) throw UsageError("--max-tokens must be at least 1");

  auto loaded = load_corpus(opts.input, opts.lang, {opts.min_chars});
  if (loaded.dropped_empty > 0) spdlog::warn("dropped {} documents with empty text", loaded.dropped_empty);
  if (loaded.dropped_short > 0) {
    spdlog::info("dropped {} documents shorter than {} characters", loaded.dropped_short, opts.min_chars);
  }
  if (loaded.documents.empty()) throw Error("no documents left in " + opts.input.string());

  std::vector<Document> docs;
  docs.reserve(loaded.documents.size());
  std::unordered_set<std::string> seen;
  for (const auto& d : loaded.documents) {
    if (!seen.insert(d.id).second) throw Error("duplicate document id '" + d.id + "' in " + opts.input.string());
    docs.push_back(truncate_tokens(d, opts.max_tokens));
  }

  const auto stopwords = opts.stopwords ? load_stopwords(*opts.stopwords) : std::set<std::string>{};
  const Vocabulary vocab = build_vocabulary(docs, stopwords, opts.vocab_size);

  std::vector<BowRecord> records;
  records.reserve(docs.size());
  std::size_t zero_bow = 0;
  for (const auto& d : docs) {
    records.push_back({d.id, to_bow(d, vocab)});
    zero_bow += records.back().bow.empty();
  }
  if (zero_bow > 0) spdlog::warn("{} documents have no in-vocabulary tokens; training will skip them", zero_bow);

  std::filesystem::create_directories(opts.out_dir);
  const Path bow_path = opts.out_dir / "bow.jsonl";
  OutputSet outputs;
  write_vocabulary(vocab, outputs.stage(opts.out_dir / "vocab.txt"));
  write_bow_records(records, outputs.stage(bow_path));
  write_corpus(docs, outputs.stage(opts.out_dir / "corpus.jsonl"));

  RunManifest manifest;
  manifest.command = "preprocess";
  manifest.config = {{"lang", opts.lang},
                     {"vocab_size", opts.vocab_size},
                     {"max_tokens", opts.max_tokens},
                     {"min_chars", opts.min_chars},
                     {"stopword_count", stopwords.size()},
                     {"documents", docs.size()},
                     {"vocabulary", vocab.size()},
                     {"dropped_empty", loaded.dropped_empty},
                     {"dropped_short", loaded.dropped_short},
                     {"zero_bow", zero_bow}};
  manifest.inputs = {{"input", opts.input.string()}, {"stopwords", path_string(opts.stopwords)}};
  finish(outputs, manifest, bow_path, start);
  spdlog::info("preprocessed {} documents, vocabulary of {} tokens", docs.size(), vocab.size());
}

void run_train(const TrainOptions& opts) {
  const auto start = Clock::now();
  ModelConfig config = opts.model;
  if (config.uses_embeddings() && !opts.embeddings) {
    throw UsageError("--mode " + to_string(config.input_mode) + " requires --embeddings");
  }
  require_file(opts.bow, "--bow");
  require_file(opts.vocab, "--vocab");
  if (opts.embeddings && config.uses_embeddings()) require_file(*opts.embeddings, "--embeddings");
  if (opts.embeddings && !config.uses_embeddings()) spdlog::warn("--mode bow ignores --embeddings");

  const Vocabulary vocab = read_vocabulary(opts.vocab);
  const auto records = read_bow_records(opts.bow, vocab.size());
  config.vocab_size = vocab.size();

  EmbeddingMatrix embeddings;
  if (config.uses_embeddings()) {
    embeddings = read_embeddings(*opts.embeddings);
    config.embedding_dim = embeddings.dim();
  } else {
    config.embedding_dim = 0;
  }
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  TrainingInput input;
  for (const auto& r : records) {
    input.ids.push_back(r.id);
    input.bows.push_back(r.bow);
  }
  if (config.uses_embeddings()) input.embeddings = &embeddings;

  std::string loss_csv = "epoch,total,recon,kl\n";
  const auto model = train(input, vocab, config, [&](std::size_t epoch, const EpochLoss& loss) {
    char line[128];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", epoch, loss.total, loss.recon, loss.kl);
    loss_csv += line;
    spdlog::debug("epoch {}: loss {:.4f} (recon {:.4f}, kl {:.4f})", epoch, loss.total, loss.recon, loss.kl);
  });
  if (model.training_log.excluded_zero_bow > 0) {
    spdlog::warn("excluded {} documents with an empty BoW", model.training_log.excluded_zero_bow);
  }
  const auto& epochs = model.training_log.epochs;
  if (!epochs.empty()) {
    spdlog::info("trained {} epochs on {} documents: loss {:.4f} -> {:.4f}", epochs.size(),
                 model.training_log.documents_used, epochs.front().total, epochs.back().total);
  }

  OutputSet outputs;
  save_model(model, outputs.stage(opts.out));
  auto csv_path = opts.out;
  csv_path += ".loss.csv";
  write_text(outputs.stage(csv_path), loss_csv);

  RunManifest manifest;
  manifest.command = "train";
  manifest.config = config;
  manifest.inputs = {{"bow", opts.bow.string()},
                     {"vocab", opts.vocab.string()},
                     {"embeddings", config.uses_embeddings() ? path_string(opts.embeddings) : std::string()}};
  manifest.seed = config.seed;
  finish(outputs, manifest, opts.out, start);
}

void run_infer(const InferOptions& opts) {
  const auto start = Clock::now();
  const TopicModel model = load_checkpoint(opts.model);
  const ModelConfig& config = model.config;
  if (config.uses_embeddings() && !opts.embeddings) {
    throw UsageError("model was trained in " + to_string(config.input_mode) + " mode; --embeddings is required");
  }
  if (config.uses_bow_input() && !opts.bow) {
    throw UsageError("model was trained in " + to_string(config.input_mode) + " mode; --bow is required");
  }
  if (opts.samples == 0) throw UsageError("--samples must be at least 1");

  EmbeddingMatrix embeddings;
  if (config.uses_embeddings()) {
    embeddings = load_embeddings(*opts.embeddings, "--embeddings");
    if (embeddings.dim() != config.embedding_dim) {
      throw ShapeError("embeddings have dimension " + std::to_string(embeddings.dim()) + " but the model expects " +
                       std::to_string(config.embedding_dim));
    }
  }
  std::vector<BowRecord> records;
  if (config.uses_bow_input()) {
    require_file(*opts.bow, "--bow");
    records = read_bow_records(*opts.bow, config.vocab_size);
  }

  // Documents come from the BoW file when the model reads BoW input, else
  // from the embedding file; both in file order.
  std::vector<std::string> ids;
  if (config.uses_bow_input()) {
    for (const auto& r : records) ids.push_back(r.id);
  } else {
    ids = embeddings.ids();
  }
  if (ids.empty()) throw Error("no documents to infer");

  Matrix inputs(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(config.input_dim()));
  std::size_t missing = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::span<const float> embedding;
    if (config.uses_embeddings()) {
      const auto row = embeddings.find(ids[i]);
      if (row < 0) {
        if (missing++ == 0) spdlog::error("no embedding for document '{}'", ids[i]);
        continue;
      }
      embedding = embeddings.vector(static_cast<std::size_t>(row));
    }
    inputs.row(static_cast<Eigen::Index>(i)) =
        make_input_row(config, embedding, config.uses_bow_input() ? &records[i].bow : nullptr);
  }
  if (missing > 0) throw Error(std::to_string(missing) + " documents in --bow have no embedding");

  std::mt19937_64 rng(opts.seed);
  const auto dists = infer_topics(model, inputs, {opts.samples, opts.noiseless}, rng);
  PredictionSet preds(config.num_topics);
  for (std::size_t i = 0; i < ids.size(); ++i) preds.add(ids[i], dists[i]);

  OutputSet outputs;
  write_predictions(preds, outputs.stage(opts.out));
  RunManifest manifest;
  manifest.command = "infer";
  manifest.config = {{"samples", opts.samples},
                     {"noiseless", opts.noiseless},
                     {"num_topics", config.num_topics},
                     {"input_mode", to_string(config.input_mode)},
                     {"documents", ids.size()}};
  manifest.inputs = {{"model", opts.model.string()},
                     {"embeddings", path_string(opts.embeddings)},
                     {"bow", path_string(opts.bow)}};
  manifest.seed = opts.seed;
  finish(outputs, manifest, opts.out, start);
  spdlog::info("inferred topics for {} documents", ids.size());
}

void run_topics(const TopicsOptions& opts) {
  const auto start = Clock::now();
  const TopicModel model = load_checkpoint(opts.model);
  if (opts.top_n == 0 || opts.top_n > model.config.vocab_size) {
    throw UsageError("--top-n must be between 1 and the vocabulary size");
  }
  const auto words = topic_words(model, opts.top_n);
  nlohmann::json topics = nlohmann::json::array();
  for (std::size_t k = 0; k < words.size(); ++k) {
    std::cout << k << ':';
    for (const auto& w : words[k]) std::cout << ' ' << w;
    std::cout << '\n';
    topics.push_back({{"topic", k}, {"words", words[k]}});
  }
  std::cout.flush();
  if (!opts.out) return;
  OutputSet outputs;
  write_text(outputs.stage(*opts.out), topics.dump(2) + "\n");
  finish(outputs, {"topics", {{"top_n", opts.top_n}}, {{"model", opts.model.string()}}, {}, 0, 0.0}, *opts.out,
         start);
}

void run_match(const MatchOptions& opts, const std::optional<Path>& out) {
  const auto start = Clock::now();
  const auto a = load_predictions(opts.a, "--a");
  const auto b = load_predictions(opts.b, "--b");
  emit({{"match", match_rate(a, b)}, {"documents", a.size()}}, "evaluate match", nlohmann::json::object(),
       {{"a", opts.a.string()}, {"b", opts.b.string()}}, out, start);
}

void run_kl(const KlOptions& opts, const std::optional<Path>& out) {
  const auto start = Clock::now();
  const auto p = load_predictions(opts.p, "--p");
  const auto q = load_predictions(opts.q, "--q").restricted_to(p.ids());
  if (p.num_topics() != q.num_topics()) throw InvalidArgument("prediction files have different topic counts");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += kl_divergence(p.at(i), q.at(i), opts.epsilon);
  emit({{"kl", sum / static_cast<double>(p.size())}, {"documents", p.size()}}, "evaluate kl",
       {{"epsilon", opts.epsilon}, {"direction", "KL(p || q)"}}, {{"p", opts.p.string()}, {"q", opts.q.string()}},
       out, start);
}

void run_centroid(const CentroidOptions& opts, const std::optional<Path>& out) {
  const auto start = Clock::now();
  const auto a = load_predictions(opts.a, "--a");
  const auto b = load_predictions(opts.b, "--b").restricted_to(a.ids());
  const TopicModel model = load_checkpoint(opts.model);
  const auto vectors = load_embeddings(opts.word_vectors, "--word-vectors");
  if (a.num_topics() != model.config.num_topics || b.num_topics() != model.config.num_topics) {
    throw InvalidArgument("predictions and model disagree on the number of topics");
  }
  const auto words = topic_words(model, std::min(opts.top_n, model.config.vocab_size));
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += centroid_similarity(words[a.at(i).argmax()], words[b.at(i).argmax()], vectors);
  }
  emit({{"cd", sum / static_cast<double>(a.size())}, {"documents", a.size()}}, "evaluate cd",
       {{"top_n", opts.top_n}},
       {{"a", opts.a.string()}, {"b", opts.b.string()}, {"model", opts.model.string()},
        {"word_vectors", opts.word_vectors.string()}},
       out, start);
}

void run_npmi(const NpmiOptions& opts, const std::optional<Path>& out) {
  const auto start = Clock::now();
  const TopicModel model = load_checkpoint(opts.model);
  require_file(opts.bow, "--bow");
  const auto records = read_bow_records(opts.bow, model.config.vocab_size);
  if (opts.top_n < 2 || opts.top_n > model.config.vocab_size) {
    throw UsageError("--top-n must be between 2 and the vocabulary size");
  }
  const auto topics = topic_words(model, opts.top_n);
  std::set<std::string> wanted;
  for (const auto& t : topics) wanted.insert(t.begin(), t.end());

  std::vector<std::set<std::string>> documents;
  documents.reserve(records.size());
  for (const auto& r : records) {
    std::set<std::string> tokens;
    for (const auto& [index, count] : r.bow.counts) tokens.insert(model.vocab.token(index));
    documents.push_back(std::move(tokens));
  }
  const auto stats = count_cooccurrence(documents, wanted);
  emit({{"npmi", npmi_coherence(topics, stats, opts.top_n, opts.epsilon)},
        {"topics", topics.size()},
        {"documents", stats.doc_count}},
       "evaluate npmi", {{"top_n", opts.top_n}, {"epsilon", opts.epsilon}},
       {{"model", opts.model.string()}, {"bow", opts.bow.string()}}, out, start);
}

void run_ac1(const Ac1Options& opts, const std::optional<Path>& out) {
  const auto start = Clock::now();
  require_file(opts.ratings, "--ratings");
  AgreementWeights scheme;
  if (opts.weights == "ordinal") {
    scheme = AgreementWeights::kOrdinal;
  } else if (opts.weights == "identity") {
    scheme = AgreementWeights::kIdentity;
  } else {
    throw UsageError("--weights must be ordinal or identity");
  }
  const RatingMatrix ratings(read_ratings(opts.ratings), opts.categories);
  const auto result = gwet_agreement(ratings, scheme);
  emit({{"ac1", result.coefficient},
        {"observed", result.observed},
        {"chance", result.chance},
        {"items", ratings.num_items()}},
       "evaluate ac1", {{"weights", opts.weights}, {"categories", opts.categories}},
       {{"ratings", opts.ratings.string()}}, out, start);
}

void run_report(const ReportOptions& opts, const std::optional<Path>& out) {
  const auto start = Clock::now();
  CrossLingualOptions options;
  if (opts.kl_direction == "test-to-english") {
    options.kl_direction = KlDirection::kTestToEnglish;
  } else if (opts.kl_direction == "english-to-test") {
    options.kl_direction = KlDirection::kEnglishToTest;
  } else {
    throw UsageError("--kl-direction must be test-to-english or english-to-test");
  }
  if (opts.baseline_kl_direction == "uniform-to-english") {
    options.baseline_kl_direction = BaselineKlDirection::kUniformToEnglish;
  } else if (opts.baseline_kl_direction == "english-to-uniform") {
    options.baseline_kl_direction = BaselineKlDirection::kEnglishToUniform;
  } else {
    throw UsageError("--baseline-kl-direction must be uniform-to-english or english-to-uniform");
  }
  options.centroid_words = opts.centroid_words;
  options.epsilon = opts.epsilon;
  if (opts.word_vectors && !opts.model) throw UsageError("--word-vectors needs --model for the topic words");

  const auto english = load_predictions(opts.english, "--english");
  std::map<std::string, PredictionSet> others;
  nlohmann::json inputs = {{"english", opts.english.string()}};
  for (const auto& [lang, path] : opts.languages) {
    others.emplace(lang, load_predictions(path, "--lang " + lang));
    inputs["languages"][lang] = path.string();
  }

  std::vector<std::vector<std::string>> words;
  std::optional<EmbeddingMatrix> vectors;
  if (opts.model) {
    const TopicModel model = load_checkpoint(*opts.model);
    words = topic_words(model, std::min(opts.centroid_words, model.config.vocab_size));
    inputs["model"] = opts.model->string();
  }
  if (opts.word_vectors) {
    vectors = load_embeddings(*opts.word_vectors, "--word-vectors");
    inputs["word_vectors"] = opts.word_vectors->string();
  }
  const auto report = evaluate_crosslingual(english, others, words, vectors ? &*vectors : nullptr, options);
  emit(report.to_json(), "evaluate report",
       {{"kl_direction", opts.kl_direction},
        {"baseline_kl_direction", opts.baseline_kl_direction},
        {"centroid_words", opts.centroid_words},
        {"epsilon", opts.epsilon}},
       inputs, out, start);
}

}  // namespace ctm::cli

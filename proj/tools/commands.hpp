#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctm/config.hpp"
#include "ctm/error.hpp"

namespace ctm::cli {

// Bad flags or unreadable inputs; the tool exits with status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

using Path = std::filesystem::path;

struct PreprocessOptions {
  Path input;
  std::string lang;
  std::optional<Path> stopwords;
  std::size_t vocab_size = 2000;
  std::size_t max_tokens = 200;
  std::size_t min_chars = 0;
  Path out_dir;
};

struct TrainOptions {
  Path bow;
  Path vocab;
  std::optional<Path> embeddings;
  Path out;
  ModelConfig model;  // vocab_size and embedding_dim are filled from the inputs
};

struct InferOptions {
  Path model;
  std::optional<Path> embeddings;
  std::optional<Path> bow;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  bool noiseless = false;
  Path out;
};

struct TopicsOptions {
  Path model;
  std::size_t top_n = 10;
  std::optional<Path> out;
};

struct MatchOptions {
  Path a;
  Path b;
};

struct KlOptions {
  Path p;
  Path q;
  double epsilon = 1e-12;
};

struct CentroidOptions {
  Path a;
  Path b;
  Path model;
  Path word_vectors;
  std::size_t top_n = 5;
};

struct NpmiOptions {
  Path model;
  Path bow;
  std::size_t top_n = 10;
  double epsilon = 1e-12;
};

struct Ac1Options {
  Path ratings;
  std::string weights = "ordinal";
  int categories = 4;
};

struct ReportOptions {
  Path english;
  std::map<std::string, Path> languages;
  std::optional<Path> model;
  std::optional<Path> word_vectors;
  std::string kl_direction = "test-to-english";
  std::string baseline_kl_direction = "uniform-to-english";
  std::size_t centroid_words = 5;
  double epsilon = 1e-12;
};

// Each command returns normally only after its outputs are in place.
void run_preprocess(const PreprocessOptions& opts);
void run_train(const TrainOptions& opts);
void run_infer(const InferOptions& opts);
void run_topics(const TopicsOptions& opts);

// Evaluate commands print one JSON object to stdout and, given an output
// path, also write it there with a run manifest.
void run_match(const MatchOptions& opts, const std::optional<Path>& out);
void run_kl(const KlOptions& opts, const std::optional<Path>& out);
void run_centroid(const CentroidOptions& opts, const std::optional<Path>& out);
void run_npmi(const NpmiOptions& opts, const std::optional<Path>& out);
void run_ac1(const Ac1Options& opts, const std::optional<Path>& out);
void run_report(const ReportOptions& opts, const std::optional<Path>& out);

std::string version_json();

}  // namespace ctm::cli

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ctm/agreement.hpp"
#include "ctm/corpus.hpp"
#include "ctm/crosslingual.hpp"

namespace ctm {

// BoW file: JSON Lines {"id": str, "indices": [int...], "counts": [int...]},
// indices ascending. The vocabulary size travels separately.
struct BowRecord {
  std::string id;
  BowVector bow;
};

void write_bow_records(const std::vector<BowRecord>& records, const std::filesystem::path& path);
std::vector<BowRecord> read_bow_records(const std::filesystem::path& path, std::size_t vocab_size);

// Predictions file: JSON Lines {"id": str, "theta": [K reals]}.
void write_predictions(const PredictionSet& preds, const std::filesystem::path& path);
PredictionSet read_predictions(const std::filesystem::path& path);

// Ratings file: CSV with header `item,rater,score`.
std::vector<Rating> read_ratings(const std::filesystem::path& path);

}  // namespace ctm

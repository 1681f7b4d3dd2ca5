#include "ctm/records.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "ctm/error.hpp"
#include "ctm/text.hpp"

namespace ctm {
namespace {

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + ": " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(std::string("cannot write ") + what + ": " + path.string());
  return out;
}

nlohmann::json parse_line(const std::string& line, const std::filesystem::path& path, std::size_t line_no) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what(), line_no);
  }
}

}  // namespace

void write_bow_records(const std::vector<BowRecord>& records, const std::filesystem::path& path) {
  auto out = open_output(path, "BoW file");
  for (const auto& r : records) {
    nlohmann::json indices = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& [idx, count] : r.bow.counts) {
      indices.push_back(idx);
      counts.push_back(count);
    }
    out << nlohmann::json{{"id", r.id}, {"indices", indices}, {"counts", counts}}.dump() << '\n';
  }
  if (!out) throw IoError("error writing BoW file: " + path.string());
}

std::vector<BowRecord> read_bow_records(const std::filesystem::path& path, std::size_t vocab_size) {
  auto in = open_input(path, "BoW file");
  std::vector<BowRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto j = parse_line(line, path, line_no);
    try {
      BowRecord r;
      r.id = j.at("id").get<std::string>();
      r.bow.vocab_size = vocab_size;
      const auto indices = j.at("indices").get<std::vector<std::size_t>>();
      const auto counts = j.at("counts").get<std::vector<std::uint32_t>>();
      if (indices.size() != counts.size()) throw ParseError(path.string() + ": indices/counts length mismatch", line_no);
      for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= vocab_size) {
          throw ParseError(path.string() + ": word index " + std::to_string(indices[i]) + " beyond vocabulary",
                           line_no);
        }
        if (counts[i] == 0) throw ParseError(path.string() + ": stored count must be >= 1", line_no);
        if (!r.bow.counts.emplace(indices[i], counts[i]).second) {
          throw ParseError(path.string() + ": repeated word index", line_no);
        }
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": bad BoW record: " + e.what(), line_no);
    }
  }
  return records;
}

void write_predictions(const PredictionSet& preds, const std::filesystem::path& path) {
  auto out = open_output(path, "predictions file");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << nlohmann::json{{"id", preds.ids()[i]}, {"theta", preds.at(i).theta}}.dump() << '\n';
  }
  if (!out) throw IoError("error writing predictions file: " + path.string());
}

PredictionSet read_predictions(const std::filesystem::path& path) {
  auto in = open_input(path, "predictions file");
  std::optional<PredictionSet> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto j = parse_line(line, path, line_no);
    try {
      auto id = j.at("id").get<std::string>();
      TopicDistribution dist{j.at("theta").get<std::vector<double>>()};
      if (!preds) preds.emplace(dist.theta.size());
      preds->add(std::move(id), std::move(dist));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": bad prediction record: " + e.what(), line_no);
    } catch (const InvalidArgument& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  if (!preds) throw ParseError(path.string() + ": no predictions", 0);
  return std::move(*preds);
}

std::vector<Rating> read_ratings(const std::filesystem::path& path) {
  auto in = open_input(path, "ratings file");
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "item,rater,score") {
    throw ParseError(path.string() + ": expected header 'item,rater,score'", 1);
  }
  std::vector<Rating> ratings;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = text::trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string::npos || row.find(',', c2 + 1) != std::string::npos) {
      throw ParseError(path.string() + ": expected 3 comma-separated fields", line_no);
    }
    Rating r{row.substr(0, c1), row.substr(c1 + 1, c2 - c1 - 1), 0};
    const std::string score = row.substr(c2 + 1);
    const auto [ptr, ec] = std::from_chars(score.data(), score.data() + score.size(), r.score);
    if (ec != std::errc() || ptr != score.data() + score.size() || r.item.empty() || r.rater.empty()) {
      throw ParseError(path.string() + ": bad rating row", line_no);
    }
    ratings.push_back(std::move(r));
  }
  return ratings;
}

}  // namespace ctm

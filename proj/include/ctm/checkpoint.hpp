#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctm/error.hpp"
#include "ctm/model.hpp"

namespace ctm {

// Checkpoint layout: one UTF-8 JSON manifest line (config, vocabulary,
// training log, tensor directory), '\n', then the tensors as row-major
// little-endian float64 payloads in directory order. Directory offsets are
// relative to the first payload byte.
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public Error {
 public:
  using Error::Error;
};

void to_json(nlohmann::json& j, const ModelConfig& config);
void from_json(const nlohmann::json& j, ModelConfig& config);

std::vector<std::uint8_t> serialize_model(const TopicModel& model);
TopicModel parse_model(const std::vector<std::uint8_t>& bytes);

void save_model(const TopicModel& model, const std::filesystem::path& path);
TopicModel load_model(const std::filesystem::path& path);

// The parsed manifest line, for tooling and tests.
nlohmann::json read_checkpoint_manifest(const std::vector<std::uint8_t>& bytes);

}  // namespace ctm

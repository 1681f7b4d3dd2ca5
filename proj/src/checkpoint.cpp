#include "ctm/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ctm {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written in host order, which must be little-endian");

constexpr const char* kFormatName = "ctm-checkpoint";

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

nlohmann::json log_to_json(const TrainingLog& log) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : log.epochs) {
    epochs.push_back({{"total", e.total}, {"recon", e.recon}, {"kl", e.kl}});
  }
  return {{"epochs", epochs},
          {"documents_used", log.documents_used},
          {"excluded_zero_bow", log.excluded_zero_bow}};
}

TrainingLog log_from_json(const nlohmann::json& j) {
  TrainingLog log;
  for (const auto& e : j.at("epochs")) {
    log.epochs.push_back({e.at("total").get<double>(), e.at("recon").get<double>(),
                          e.at("kl").get<double>()});
  }
  log.documents_used = j.at("documents_used").get<std::size_t>();
  log.excluded_zero_bow = j.at("excluded_zero_bow").get<std::size_t>();
  return log;
}

}  // namespace

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"num_topics", c.num_topics},
       {"input_mode", to_string(c.input_mode)},
       {"vocab_size", c.vocab_size},
       {"embedding_dim", c.embedding_dim},
       {"hidden_sizes", c.hidden_sizes},
       {"dropout_rate", c.dropout_rate},
       {"prior_alpha", c.prior_alpha},
       {"learning_rate", c.learning_rate},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"adam_eps", c.adam_eps},
       {"batch_size", c.batch_size},
       {"epochs", c.epochs},
       {"seed", c.seed},
       {"inference_samples", c.inference_samples},
       {"batchnorm_momentum", c.batchnorm_momentum},
       {"batchnorm_eps", c.batchnorm_eps},
       {"learn_decoder_bn_scale", c.learn_decoder_bn_scale}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("num_topics").get_to(c.num_topics);
  c.input_mode = parse_input_mode(j.at("input_mode").get<std::string>());
  j.at("vocab_size").get_to(c.vocab_size);
  j.at("embedding_dim").get_to(c.embedding_dim);
  j.at("hidden_sizes").get_to(c.hidden_sizes);
  j.at("dropout_rate").get_to(c.dropout_rate);
  j.at("prior_alpha").get_to(c.prior_alpha);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("adam_beta1").get_to(c.adam_beta1);
  j.at("adam_beta2").get_to(c.adam_beta2);
  j.at("adam_eps").get_to(c.adam_eps);
  j.at("batch_size").get_to(c.batch_size);
  j.at("epochs").get_to(c.epochs);
  j.at("seed").get_to(c.seed);
  j.at("inference_samples").get_to(c.inference_samples);
  j.at("batchnorm_momentum").get_to(c.batchnorm_momentum);
  j.at("batchnorm_eps").get_to(c.batchnorm_eps);
  j.at("learn_decoder_bn_scale").get_to(c.learn_decoder_bn_scale);
}

std::vector<std::uint8_t> serialize_model(const TopicModel& model) {
  if (model.vocab.size() != model.config.vocab_size) {
    throw CheckpointError("vocabulary length differs from config.vocab_size");
  }
  nlohmann::json directory = nlohmann::json::array();
  std::vector<std::uint8_t> payload;
  for (const auto& t : model.params.tensors()) {
    const RowMajor rm = Eigen::Map<const Matrix>(t.data, t.rows, t.cols);
    const std::size_t bytes = static_cast<std::size_t>(rm.size()) * sizeof(double);
    directory.push_back({{"name", t.name},
                         {"shape", {t.rows, t.cols}},
                         {"offset", payload.size()},
                         {"length", bytes}});
    const auto* raw = reinterpret_cast<const std::uint8_t*>(rm.data());
    payload.insert(payload.end(), raw, raw + bytes);
  }

  const nlohmann::json manifest = {{"format", kFormatName},
                                   {"version", kCheckpointVersion},
                                   {"dtype", "float64"},
                                   {"byte_order", "little"},
                                   {"layout", "row-major"},
                                   {"config", model.config},
                                   {"vocab", model.vocab.tokens()},
                                   {"training_log", log_to_json(model.training_log)},
                                   {"tensors", directory}};
  const std::string header = manifest.dump() + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

nlohmann::json read_checkpoint_manifest(const std::vector<std::uint8_t>& bytes) {
  const auto newline = std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'});
  if (newline == bytes.end()) throw CheckpointError("corrupt checkpoint: no manifest line");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin(), newline);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (!manifest.is_object() || manifest.value("format", "") != kFormatName) {
    throw CheckpointError("corrupt checkpoint header: not a ctm checkpoint");
  }
  return manifest;
}

TopicModel parse_model(const std::vector<std::uint8_t>& bytes) {
  const nlohmann::json manifest = read_checkpoint_manifest(bytes);
  const auto header_len =
      static_cast<std::size_t>(std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'}) - bytes.begin()) + 1;

  try {
    const int version = manifest.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    }
    TopicModel model;
    model.config = manifest.at("config").get<ModelConfig>();
    model.config.validate();
    model.vocab = Vocabulary(manifest.at("vocab").get<std::vector<std::string>>());
    if (model.vocab.size() != model.config.vocab_size) {
      throw CheckpointError("checkpoint vocabulary length differs from config.vocab_size");
    }
    model.training_log = log_from_json(manifest.at("training_log"));
    model.params = ModelParameters::shaped(model.config);

    const auto& directory = manifest.at("tensors");
    auto tensors = model.params.tensors();
    if (directory.size() != tensors.size()) {
      throw CheckpointError("tensor directory lists " + std::to_string(directory.size()) +
                            " tensors, config implies " + std::to_string(tensors.size()));
    }
    std::size_t expected_offset = 0;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto& entry = directory[i];
      auto& t = tensors[i];
      const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
      if (entry.at("name").get<std::string>() != t.name || shape.size() != 2 || shape[0] != t.rows ||
          shape[1] != t.cols) {
        throw CheckpointError("tensor '" + entry.at("name").get<std::string>() +
                              "' disagrees with the shape implied by the config (expected " + t.name + ")");
      }
      const auto offset = entry.at("offset").get<std::size_t>();
      const auto length = entry.at("length").get<std::size_t>();
      if (offset != expected_offset || length != static_cast<std::size_t>(t.size()) * sizeof(double)) {
        throw CheckpointError("tensor '" + t.name + "' has an inconsistent offset or length");
      }
      if (header_len + offset + length > bytes.size()) {
        throw CheckpointError("truncated checkpoint: payload of '" + t.name + "' is incomplete");
      }
      RowMajor rm(t.rows, t.cols);
      std::memcpy(rm.data(), bytes.data() + header_len + offset, length);
      Eigen::Map<Matrix>(t.data, t.rows, t.cols) = rm;
      expected_offset += length;
    }
    if (header_len + expected_offset != bytes.size()) {
      throw CheckpointError("checkpoint has " + std::to_string(bytes.size() - header_len - expected_offset) +
                            " unexpected trailing bytes");
    }
    if (!model.params.all_finite()) throw CheckpointError("checkpoint contains non-finite values");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CheckpointError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_model(const TopicModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing checkpoint: " + path.string());
}

TopicModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_model(bytes);
}

}  // namespace ctm

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ctm::cli {

// Collects a command's output files. Every file is first written to a
// sibling staging path; commit() renames them into place, and anything not
// committed is deleted on destruction, so a failed run leaves no partial
// outputs behind.
class OutputSet {
 public:
  OutputSet() = default;
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet();

  // Registers `final_path` and returns where to write it for now.
  std::filesystem::path stage(const std::filesystem::path& final_path);
  void commit();

  std::vector<std::string> final_paths() const;

 private:
  struct Entry {
    std::filesystem::path staged;
    std::filesystem::path final;
  };
  std::vector<Entry> entries_;
  bool committed_ = false;
};

// Run record written next to a command's primary output.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;

  nlohmann::json to_json() const;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& primary_output);

void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace ctm::cli

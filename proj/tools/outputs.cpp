#include "outputs.hpp"

#include <fstream>
#include <unistd.h>

#include "ctm/error.hpp"

namespace ctm::cli {

OutputSet::~OutputSet() {
  if (committed_) return;
  for (const auto& e : entries_) {
    std::error_code ec;
    std::filesystem::remove(e.staged, ec);
  }
}

std::filesystem::path OutputSet::stage(const std::filesystem::path& final_path) {
  auto staged = final_path;
  staged += ".partial-" + std::to_string(::getpid());
  entries_.push_back({staged, final_path});
  return staged;
}

void OutputSet::commit() {
  for (const auto& e : entries_) {
    std::error_code ec;
    std::filesystem::rename(e.staged, e.final, ec);
    if (ec) throw IoError("cannot move " + e.staged.string() + " into place: " + ec.message());
  }
  committed_ = true;
}

std::vector<std::string> OutputSet::final_paths() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.final.string());
  return out;
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool", "ctm"},
          {"version", CTM_VERSION},
          {"command", command},
          {"config", config},
          {"inputs", inputs},
          {"outputs", outputs},
          {"seed", seed},
          {"duration_seconds", duration_seconds}};
}

std::filesystem::path manifest_path_for(const std::filesystem::path& primary_output) {
  auto p = primary_output;
  p += ".manifest.json";
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace ctm::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctm/corpus.hpp"
#include "ctm/error.hpp"

namespace ctm {

// Dense document (or word) vectors keyed by id, stored as 32-bit floats.
//
// On disk ("CTME" container, all integers little-endian):
//   0..3   magic "CTME"
//   4..7   u32 version (1)
//   8..11  u32 dim
//   12..19 u64 record count
//   then per record: u16 id length, id bytes, dim x f32
class EmbeddingMatrix {
 public:
  explicit EmbeddingMatrix(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  // Throws InvalidArgument on wrong length, non-finite value or duplicate id.
  void add(std::string id, std::span<const float> vector);

  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> vector(std::size_t i) const;
  // Returns -1 when absent.
  std::int64_t find(const std::string& id) const;

  bool operator==(const EmbeddingMatrix& other) const;

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 20;

class EmbeddingFormatError : public Error {
 public:
  enum class Kind { kBadMagic, kUnsupportedVersion, kTruncated, kNonFinite, kDuplicateId, kTrailingBytes };

  EmbeddingFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> serialize_embeddings(const EmbeddingMatrix& matrix);
EmbeddingMatrix parse_embeddings(std::span<const std::uint8_t> bytes);

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

struct CoverageReport {
  std::vector<std::string> missing;  // in the documents, absent from the matrix
  std::vector<std::string> extra;    // in the matrix, not among the documents

  bool complete() const { return missing.empty(); }
  bool empty() const { return missing.empty() && extra.empty(); }
};

CoverageReport validate_against_corpus(const EmbeddingMatrix& matrix,
                                       const std::vector<Document>& docs);

}  // namespace ctm

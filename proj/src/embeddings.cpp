#include "ctm/embeddings.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>

namespace ctm {
namespace {

static_assert(std::endian::native == std::endian::little,
              "the CTME reader/writer assumes a little-endian host");

constexpr std::uint8_t kMagic[4] = {'C', 'T', 'M', 'E'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const std::size_t at = out.size();
  out.resize(at + sizeof(T));
  std::memcpy(out.data() + at, &value, sizeof(T));
}

void put_bytes(std::vector<std::uint8_t>& out, const void* data, std::size_t n) {
  const std::size_t at = out.size();
  out.resize(at + n);
  if (n) std::memcpy(out.data() + at, data, n);
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void EmbeddingMatrix::add(std::string id, std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw InvalidArgument("embedding for '" + id + "' has " + std::to_string(vector.size()) +
                          " components, expected " + std::to_string(dim_));
  }
  if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw InvalidArgument("embedding id longer than 65535 bytes");
  }
  for (float v : vector) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite component in embedding '" + id + "'");
  }
  if (!index_.emplace(id, ids_.size()).second) {
    throw InvalidArgument("duplicate embedding id '" + id + "'");
  }
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::span<const float> EmbeddingMatrix::vector(std::size_t i) const {
  if (i >= ids_.size()) throw std::out_of_range("embedding record index out of range");
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::int64_t EmbeddingMatrix::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

bool EmbeddingMatrix::operator==(const EmbeddingMatrix& other) const {
  // Bitwise float comparison: -0.0f and 0.0f are different records on disk.
  return dim_ == other.dim_ && ids_ == other.ids_ && data_.size() == other.data_.size() &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

std::vector<std::uint8_t> serialize_embeddings(const EmbeddingMatrix& matrix) {
  std::vector<std::uint8_t> out;
  std::size_t total = kEmbeddingHeaderBytes;
  for (const auto& id : matrix.ids()) total += 2 + id.size() + 4 * std::size_t{matrix.dim()};
  out.reserve(total);

  put_bytes(out, kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kEmbeddingFormatVersion);
  put<std::uint32_t>(out, matrix.dim());
  put<std::uint64_t>(out, matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& id = matrix.id(i);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    put_bytes(out, id.data(), id.size());
    for (float v : matrix.vector(i)) put<float>(out, v);
  }
  return out;
}

EmbeddingMatrix parse_embeddings(std::span<const std::uint8_t> bytes) {
  using Kind = EmbeddingFormatError::Kind;
  Cursor cur(bytes);
  if (!cur.has(4) || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw EmbeddingFormatError(Kind::kBadMagic, "bad magic: not a CTME embedding file");
  }
  cur.take(4);
  if (!cur.has(kEmbeddingHeaderBytes - 4)) {
    throw EmbeddingFormatError(Kind::kTruncated, "truncated file: incomplete header");
  }
  const auto version = cur.get<std::uint32_t>();
  if (version != kEmbeddingFormatVersion) {
    throw EmbeddingFormatError(Kind::kUnsupportedVersion,
                               "unsupported version " + std::to_string(version));
  }
  const auto dim = cur.get<std::uint32_t>();
  const auto count = cur.get<std::uint64_t>();

  EmbeddingMatrix matrix(dim);
  std::vector<float> vec(dim);
  const std::size_t vec_bytes = 4 * std::size_t{dim};
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto truncated = [&] {
      return EmbeddingFormatError(Kind::kTruncated,
                                  "truncated file: record " + std::to_string(r) + " of " +
                                      std::to_string(count) + " is incomplete");
    };
    if (!cur.has(2)) throw truncated();
    const auto id_len = cur.get<std::uint16_t>();
    if (!cur.has(id_len + vec_bytes)) throw truncated();
    const auto id_bytes = cur.take(id_len);
    std::string id(id_bytes.begin(), id_bytes.end());
    std::memcpy(vec.data(), cur.take(vec_bytes).data(), vec_bytes);
    for (float v : vec) {
      if (!std::isfinite(v)) {
        throw EmbeddingFormatError(Kind::kNonFinite, "non-finite value in record " +
                                                         std::to_string(r) + " ('" + id + "')");
      }
    }
    if (matrix.find(id) >= 0) {
      throw EmbeddingFormatError(Kind::kDuplicateId, "duplicate id '" + id + "' in record " +
                                                         std::to_string(r));
    }
    matrix.add(std::move(id), vec);
  }
  if (cur.remaining() != 0) {
    throw EmbeddingFormatError(Kind::kTrailingBytes,
                               "declared record count " + std::to_string(count) + " leaves " +
                                   std::to_string(cur.remaining()) + " trailing bytes");
  }
  return matrix;
}

void write_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  const auto bytes = serialize_embeddings(matrix);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embedding file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing embedding file: " + path.string());
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading embedding file: " + path.string());
  return parse_embeddings(bytes);
}

CoverageReport validate_against_corpus(const EmbeddingMatrix& matrix,
                                       const std::vector<Document>& docs) {
  CoverageReport report;
  std::set<std::string> doc_ids;
  for (const auto& d : docs) {
    if (doc_ids.insert(d.id).second && matrix.find(d.id) < 0) report.missing.push_back(d.id);
  }
  for (const auto& id : matrix.ids()) {
    if (!doc_ids.contains(id)) report.extra.push_back(id);
  }
  return report;
}

}  // namespace ctm

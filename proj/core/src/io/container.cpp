#include "amg/io/container.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "amg/error.hpp"

namespace amg {
namespace {

constexpr std::size_t kHeaderBytes = 8;
constexpr std::size_t kTrailerBytes = 4;

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string magic_string(const Magic& m) { return std::string(m.begin(), m.end()); }

}  // namespace

void BinaryWriter::u32(std::uint32_t v) { store_u32(bytes_, v); }

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void BinaryWriter::tensor(const Tensor& t) {
  u32(static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) u64(d);
  for (double v : t.data()) f64(v);
}

void BinaryReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) throw TruncatedError("container payload ends early");
}

std::uint32_t BinaryReader::u32() {
  need(4);
  const auto v = load_u32(bytes_.data() + pos_);
  pos_ += 4;
  return v;
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const auto n = u32();
  need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

Tensor BinaryReader::tensor() {
  const auto rank = u32();
  if (rank > 8) throw FormatError("implausible tensor rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto& d : shape) d = u64();
  const auto n = shape_size(shape);
  need(n * 8);
  std::vector<double> data(n);
  for (auto& v : data) v = f64();
  return Tensor(std::move(shape), std::move(data));
}

void BinaryReader::expect_end() const {
  if (!at_end()) throw FormatError("trailing bytes after container payload");
}

std::uint32_t crc32_of(const std::vector<std::uint8_t>& bytes, std::size_t length) {
  return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(length)));
}

std::vector<std::uint8_t> encode_container(const Magic& magic, std::uint32_t version,
                                           const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + payload.size() + kTrailerBytes);
  out.insert(out.end(), magic.begin(), magic.end());
  store_u32(out, version);
  out.insert(out.end(), payload.begin(), payload.end());
  store_u32(out, crc32_of(out, out.size()));
  return out;
}

std::vector<std::uint8_t> decode_container(const std::vector<std::uint8_t>& file, const Magic& magic,
                                           std::uint32_t version) {
  if (file.size() < kHeaderBytes + kTrailerBytes) {
    throw TruncatedError("file too short for a " + magic_string(magic) + " container");
  }
  if (std::memcmp(file.data(), magic.data(), magic.size()) != 0) {
    throw FormatError("bad magic: expected " + magic_string(magic));
  }
  const auto body = file.size() - kTrailerBytes;
  const auto stored = load_u32(file.data() + body);
  if (stored != crc32_of(file, body)) throw ChecksumError(magic_string(magic) + " checksum mismatch");
  const auto found = load_u32(file.data() + 4);
  if (found != version) {
    throw VersionError(magic_string(magic) + " version " + std::to_string(found) + ", reader expects " +
                       std::to_string(version));
  }
  return {file.begin() + kHeaderBytes, file.begin() + static_cast<std::ptrdiff_t>(body)};
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_container(const std::filesystem::path& path, const Magic& magic, std::uint32_t version,
                     const std::vector<std::uint8_t>& payload) {
  write_file_bytes(path, encode_container(magic, version, payload));
}

std::vector<std::uint8_t> read_container(const std::filesystem::path& path, const Magic& magic,
                                         std::uint32_t version) {
  return decode_container(read_file_bytes(path), magic, version);
}

}  // namespace amg

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "amg/numerics/tensor.hpp"

namespace amg {

// Binary container shared by corpus (AMGC), checkpoint (AMGL) and index
// (AMGI) files:
//
//   magic[4] | version u32 | payload ... | crc32 u32
//
// All integers little-endian, reals as IEEE-754 binary64 bit patterns. The
// CRC covers every byte before the trailer.

using Magic = std::array<char, 4>;

inline constexpr Magic kCorpusMagic{'A', 'M', 'G', 'C'};
inline constexpr Magic kCheckpointMagic{'A', 'M', 'G', 'L'};
inline constexpr Magic kIndexMagic{'A', 'M', 'G', 'I'};

class BinaryWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  /// rank u32, dims u64 x rank, then the values.
  void tensor(const Tensor& t);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  Tensor tensor();

  bool at_end() const { return pos_ == bytes_.size(); }
  /// Throws FormatError if unread bytes remain.
  void expect_end() const;

 private:
  void need(std::size_t n) const;

  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(const std::vector<std::uint8_t>& bytes, std::size_t length);

/// Frames the payload and writes it atomically enough for our purposes
/// (whole-buffer write). Throws IoError.
void write_container(const std::filesystem::path& path, const Magic& magic, std::uint32_t version,
                     const std::vector<std::uint8_t>& payload);

std::vector<std::uint8_t> encode_container(const Magic& magic, std::uint32_t version,
                                           const std::vector<std::uint8_t>& payload);

/// Validates size, magic, CRC and version in that order and returns the
/// payload. Throws TruncatedError, FormatError, ChecksumError, VersionError.
std::vector<std::uint8_t> decode_container(const std::vector<std::uint8_t>& file, const Magic& magic,
                                           std::uint32_t version);
std::vector<std::uint8_t> read_container(const std::filesystem::path& path, const Magic& magic,
                                         std::uint32_t version);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace amg

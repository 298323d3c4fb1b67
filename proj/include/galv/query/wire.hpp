#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "galv/ids.hpp"
#include "galv/sample_range.hpp"

namespace galv::query {

/// Dense block of one column's values; values[i] is sample range.start + i.
struct ColumnFrame {
  DatasetId dataset_id{};
  ColumnId column_id{};
  SampleRange range;
  std::vector<double> values;

  /// Equality is bitwise on values so NaN payloads and signed zeros count.
  friend bool operator==(const ColumnFrame& a, const ColumnFrame& b);
};

// GVLA message layout, all integers little-endian:
//   "GVLA" | version u8 | frame_count u32
//   per frame: dataset_id u64 | column_id u64 | start i64 | count u64 | count x binary64
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kMessageHeaderSize = 9;
inline constexpr std::size_t kFrameHeaderSize = 32;

enum class WireErrc { BadMagic, UnsupportedVersion, TruncatedPayload, InvalidFrame, TrailingBytes };

class WireError : public std::runtime_error {
 public:
  WireError(WireErrc code, std::size_t offset, const std::string& what);

  WireErrc code() const noexcept { return code_; }
  /// Byte offset at which decoding failed.
  std::size_t offset() const noexcept { return offset_; }

 private:
  WireErrc code_;
  std::size_t offset_;
};

const char* to_string(WireErrc code) noexcept;

std::vector<std::uint8_t> encode_frames(std::span<const ColumnFrame> frames);

/// Inverse of encode_frames. Never reads past declared lengths; throws
/// WireError on any malformed input.
std::vector<ColumnFrame> decode_frames(std::span<const std::uint8_t> bytes);

/// Size encode_frames would produce, without encoding.
std::size_t encoded_size(std::span<const ColumnFrame> frames) noexcept;

}  // namespace galv::query

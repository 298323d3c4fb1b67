#include "galv/query/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>

namespace galv::query {

namespace {

constexpr std::uint8_t kMagic[4] = {'G', 'V', 'L', 'A'};

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  auto bits = std::bit_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(bits & 0xFFu));
    bits = static_cast<decltype(bits)>(bits >> 8);
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t remaining() const noexcept { return bytes_.size() - offset_; }

  template <class U>
  U get(const char* what) {
    if (remaining() < sizeof(U)) {
      throw WireError(WireErrc::TruncatedPayload, offset_,
                      std::string("payload truncated reading ") + what);
    }
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(bytes_[offset_ + i]) << (8 * i);
    }
    offset_ += sizeof(U);
    return value;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

}  // namespace

bool operator==(const ColumnFrame& a, const ColumnFrame& b) {
  if (a.dataset_id != b.dataset_id || a.column_id != b.column_id || a.range != b.range ||
      a.values.size() != b.values.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.values[i]) != std::bit_cast<std::uint64_t>(b.values[i])) {
      return false;
    }
  }
  return true;
}

WireError::WireError(WireErrc code, std::size_t offset, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + " at byte " + std::to_string(offset) +
                         ": " + what),
      code_(code),
      offset_(offset) {}

const char* to_string(WireErrc code) noexcept {
  switch (code) {
    case WireErrc::BadMagic: return "BadMagic";
    case WireErrc::UnsupportedVersion: return "UnsupportedVersion";
    case WireErrc::TruncatedPayload: return "TruncatedPayload";
    case WireErrc::InvalidFrame: return "InvalidFrame";
    case WireErrc::TrailingBytes: return "TrailingBytes";
  }
  return "WireError";
}

std::size_t encoded_size(std::span<const ColumnFrame> frames) noexcept {
  std::size_t size = kMessageHeaderSize;
  for (const auto& f : frames) size += kFrameHeaderSize + 8 * f.values.size();
  return size;
}

std::vector<std::uint8_t> encode_frames(std::span<const ColumnFrame> frames) {
  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(frames));
  for (auto b : kMagic) out.push_back(b);
  out.push_back(kWireVersion);
  put_le(out, static_cast<std::uint32_t>(frames.size()));
  for (const auto& f : frames) {
    put_le(out, static_cast<std::uint64_t>(raw(f.dataset_id)));
    put_le(out, static_cast<std::uint64_t>(raw(f.column_id)));
    put_le(out, f.range.start);
    put_le(out, static_cast<std::uint64_t>(f.values.size()));
    for (double v : f.values) put_le(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<ColumnFrame> decode_frames(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    if (bytes.size() < 4 && std::memcmp(bytes.data(), kMagic, bytes.size()) == 0) {
      throw WireError(WireErrc::TruncatedPayload, bytes.size(), "payload truncated in magic");
    }
    throw WireError(WireErrc::BadMagic, 0, "missing GVLA magic");
  }
  Reader in(bytes.subspan(4));
  const auto version = in.get<std::uint8_t>("version");
  if (version != kWireVersion) {
    throw WireError(WireErrc::UnsupportedVersion, 4,
                    "unsupported version " + std::to_string(version));
  }
  const auto frame_count = in.get<std::uint32_t>("frame count");

  std::vector<ColumnFrame> frames;
  // Each frame needs at least its header; don't trust frame_count for allocation.
  frames.reserve(std::min<std::size_t>(frame_count, in.remaining() / kFrameHeaderSize));
  for (std::uint32_t i = 0; i < frame_count; ++i) {
    const auto frame_offset = 4 + in.offset();
    ColumnFrame f;
    const auto dataset = in.get<std::uint64_t>("dataset_id");
    const auto column = in.get<std::uint64_t>("column_id");
    const auto start = static_cast<std::int64_t>(in.get<std::uint64_t>("range start"));
    const auto count = in.get<std::uint64_t>("value count");
    if (dataset > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) ||
        column > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw WireError(WireErrc::InvalidFrame, frame_offset, "identifier out of range");
    }
    if (start >= 0 &&
        count > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max() - start)) {
      throw WireError(WireErrc::InvalidFrame, frame_offset, "range end overflows");
    }
    if (count > in.remaining() / 8) {
      throw WireError(WireErrc::TruncatedPayload, 4 + in.offset(),
                      "frame declares " + std::to_string(count) + " values, payload holds " +
                          std::to_string(in.remaining() / 8));
    }
    f.dataset_id = DatasetId{static_cast<std::int64_t>(dataset)};
    f.column_id = ColumnId{static_cast<std::int64_t>(column)};
    f.range = {start, start + static_cast<std::int64_t>(count)};
    f.values.resize(count);
    for (auto& v : f.values) v = std::bit_cast<double>(in.get<std::uint64_t>("value"));
    frames.push_back(std::move(f));
  }
  if (in.remaining() != 0) {
    throw WireError(WireErrc::TrailingBytes, 4 + in.offset(),
                    std::to_string(in.remaining()) + " bytes after last frame");
  }
  return frames;
}

}  // namespace galv::query

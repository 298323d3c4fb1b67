#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace galv {

class InvalidRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Half-open interval [start, end) over sample numbers.
struct SampleRange {
  std::int64_t start = 0;
  std::int64_t end = 0;

  /// Throws InvalidRange when start > end.
  static SampleRange make(std::int64_t start, std::int64_t end);

  constexpr bool valid() const noexcept { return start <= end; }
  constexpr bool empty() const noexcept { return start >= end; }
  constexpr std::int64_t length() const noexcept { return empty() ? 0 : end - start; }
  constexpr bool contains(std::int64_t sample_no) const noexcept {
    return sample_no >= start && sample_no < end;
  }

  friend constexpr bool operator==(const SampleRange&, const SampleRange&) = default;
};

/// Intersection; empty ranges are normalized to [x, x).
SampleRange intersect(SampleRange a, SampleRange b) noexcept;

std::string to_string(SampleRange range);

}  // namespace galv

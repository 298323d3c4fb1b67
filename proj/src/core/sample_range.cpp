#include "galv/sample_range.hpp"

#include <algorithm>

namespace galv {

SampleRange SampleRange::make(std::int64_t start, std::int64_t end) {
  if (start > end) throw InvalidRange("invalid sample range " + to_string({start, end}));
  return {start, end};
}

SampleRange intersect(SampleRange a, SampleRange b) noexcept {
  const auto start = std::max(a.start, b.start);
  const auto end = std::min(a.end, b.end);
  return end < start ? SampleRange{start, start} : SampleRange{start, end};
}

std::string to_string(SampleRange range) {
  return "[" + std::to_string(range.start) + "," + std::to_string(range.end) + ")";
}

}  // namespace galv

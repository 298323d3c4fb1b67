#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "galv/sample_range.hpp"

namespace galv::query {

/// A set of sample numbers held as canonical ranges: non-empty, disjoint,
/// non-adjacent and sorted by start.
class RangeSet {
 public:
  RangeSet() = default;

  /// Union of `ranges`. Throws InvalidRange if any range has start > end.
  static RangeSet normalize(std::span<const SampleRange> ranges);

  const std::vector<SampleRange>& ranges() const noexcept { return ranges_; }
  bool empty() const noexcept { return ranges_.empty(); }
  std::size_t size() const noexcept { return ranges_.size(); }
  std::int64_t cardinality() const noexcept;
  bool contains(std::int64_t sample_no) const noexcept;

  auto begin() const noexcept { return ranges_.begin(); }
  auto end() const noexcept { return ranges_.end(); }

  RangeSet unite(const RangeSet& other) const;
  RangeSet intersect(SampleRange range) const;

  friend bool operator==(const RangeSet&, const RangeSet&) = default;

 private:
  explicit RangeSet(std::vector<SampleRange> canonical) : ranges_(std::move(canonical)) {}

  std::vector<SampleRange> ranges_;
};

inline RangeSet normalize(std::span<const SampleRange> ranges) {
  return RangeSet::normalize(ranges);
}

/// Sub-ranges of `requested` not covered by `held`, in canonical form.
RangeSet subtract(SampleRange requested, const RangeSet& held);

std::string to_string(const RangeSet& set);

}  // namespace galv::query

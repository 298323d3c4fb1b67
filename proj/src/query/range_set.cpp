#include "galv/query/range_set.hpp"

#include <algorithm>

namespace galv::query {

RangeSet RangeSet::normalize(std::span<const SampleRange> ranges) {
  std::vector<SampleRange> sorted;
  sorted.reserve(ranges.size());
  for (const auto& r : ranges) {
    if (!r.valid()) throw InvalidRange("invalid sample range " + galv::to_string(r));
    if (!r.empty()) sorted.push_back(r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const SampleRange& a, const SampleRange& b) { return a.start < b.start; });

  std::vector<SampleRange> merged;
  for (const auto& r : sorted) {
    // Adjacent ranges ([a,b) then [b,c)) merge as well as overlapping ones.
    if (!merged.empty() && r.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, r.end);
    } else {
      merged.push_back(r);
    }
  }
  return RangeSet(std::move(merged));
}

std::int64_t RangeSet::cardinality() const noexcept {
  std::int64_t total = 0;
  for (const auto& r : ranges_) total += r.length();
  return total;
}

bool RangeSet::contains(std::int64_t sample_no) const noexcept {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), sample_no,
                             [](std::int64_t v, const SampleRange& r) { return v < r.start; });
  return it != ranges_.begin() && std::prev(it)->contains(sample_no);
}

RangeSet RangeSet::unite(const RangeSet& other) const {
  std::vector<SampleRange> all(ranges_);
  all.insert(all.end(), other.ranges_.begin(), other.ranges_.end());
  return normalize(all);
}

RangeSet RangeSet::intersect(SampleRange range) const {
  std::vector<SampleRange> out;
  for (const auto& r : ranges_) {
    const auto clipped = galv::intersect(r, range);
    if (!clipped.empty()) out.push_back(clipped);
  }
  return RangeSet(std::move(out));
}

RangeSet subtract(SampleRange requested, const RangeSet& held) {
  if (!requested.valid()) throw InvalidRange("invalid sample range " + galv::to_string(requested));
  std::vector<SampleRange> gaps;
  auto cursor = requested.start;
  for (const auto& h : held) {
    if (h.end <= cursor) continue;
    if (h.start >= requested.end) break;
    if (h.start > cursor) gaps.push_back({cursor, h.start});
    cursor = std::max(cursor, h.end);
    if (cursor >= requested.end) break;
  }
  if (cursor < requested.end) gaps.push_back({cursor, requested.end});
  // Gaps come out sorted, disjoint and separated by held samples.
  return RangeSet::normalize(gaps);
}

std::string to_string(const RangeSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ",";
    out += galv::to_string(set.ranges()[i]);
  }
  return out + "}";
}

}  // namespace galv::query

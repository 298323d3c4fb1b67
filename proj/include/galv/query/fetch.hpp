#pragma once

#include <span>
#include <vector>

#include "galv/catalog/catalog.hpp"
#include "galv/query/range_set.hpp"
#include "galv/query/wire.hpp"

namespace galv::query {

struct FetchRequest {
  DatasetId dataset_id{};
  std::vector<ColumnId> column_ids;
  SampleRange requested;
  RangeSet held;
};

/// Frames for requested minus held, clipped to the dataset's sample_count,
/// ordered by (column_id, range.start). Stored gaps split frames rather than
/// being filled, so every value returned is a stored sample.
std::vector<ColumnFrame> fetch_frames(const catalog::Catalog& catalog, const catalog::User& actor,
                                      const FetchRequest& request);

}  // namespace galv::query

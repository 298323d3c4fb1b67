#include "galv/query/fetch.hpp"

#include <algorithm>

namespace galv::query {

std::vector<ColumnFrame> fetch_frames(const catalog::Catalog& catalog, const catalog::User& actor,
                                      const FetchRequest& request) {
  if (!request.requested.valid()) {
    throw InvalidRange("invalid requested range " + galv::to_string(request.requested));
  }
  const auto dataset = catalog.get_dataset(actor, request.dataset_id);
  const auto clipped = galv::intersect(request.requested, {0, dataset.sample_count});
  const auto missing = subtract(clipped, request.held);

  std::vector<ColumnId> columns = request.column_ids;
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  const auto owned = catalog.get_columns(actor, request.dataset_id);
  for (const auto column : columns) {
    const bool found = std::any_of(owned.begin(), owned.end(),
                                   [&](const catalog::ColumnInfo& c) { return c.column.id == column; });
    if (!found) {
      throw catalog::CatalogError(catalog::CatalogErrc::ForeignColumn,
                                  "column " + std::to_string(raw(column)) +
                                      " does not belong to dataset " +
                                      std::to_string(raw(request.dataset_id)));
    }
  }

  std::vector<ColumnFrame> frames;
  for (const auto column : columns) {
    for (const auto& range : missing) {
      const auto points = catalog.read_samples(actor, request.dataset_id, column, range);
      std::size_t i = 0;
      while (i < points.size()) {
        ColumnFrame frame{request.dataset_id, column, {points[i].sample_no, points[i].sample_no}, {}};
        while (i < points.size() && points[i].sample_no == frame.range.end) {
          frame.values.push_back(points[i].value);
          ++frame.range.end;
          ++i;
        }
        frames.push_back(std::move(frame));
      }
    }
  }
  return frames;
}

}  // namespace galv::query

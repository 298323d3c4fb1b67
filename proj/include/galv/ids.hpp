#pragma once

#include <cstdint>
#include <type_traits>

namespace galv {

// Strongly typed row identifiers. Values are the catalog's integer keys.
enum class InstitutionId : std::int64_t {};
enum class UserId : std::int64_t {};
enum class DatasetId : std::int64_t {};
enum class ColumnTypeId : std::int64_t {};
enum class ColumnId : std::int64_t {};

template <class Id>
  requires std::is_enum_v<Id>
constexpr std::int64_t raw(Id id) noexcept {
  return static_cast<std::int64_t>(id);
}

}  // namespace galv

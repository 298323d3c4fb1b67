#pragma once

#include <stdexcept>
#include <string>

namespace galv::catalog {

enum class CatalogErrc {
  DuplicateDataset,
  DuplicateUser,
  DuplicateInstitution,
  ReadOnlyUser,
  UnknownInstitution,
  UnknownUser,
  UnknownDataset,
  PermissionDenied,
  ForeignColumn,
  ConflictingValue,
  RangeOutOfBounds,
  InvalidArgument,
  Storage,
};

const char* to_string(CatalogErrc code) noexcept;

class CatalogError : public std::runtime_error {
 public:
  CatalogError(CatalogErrc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  CatalogErrc code() const noexcept { return code_; }

 private:
  CatalogErrc code_;
};

}  // namespace galv::catalog

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "galv/catalog/errors.hpp"
#include "galv/catalog/types.hpp"

namespace galv::catalog {

enum class PasswordHashing {
  /// libsodium interactive Argon2id limits.
  Interactive,
  /// Minimum Argon2id limits; for tests and throwaway deployments.
  Minimum,
};

struct CatalogOptions {
  PasswordHashing hashing = PasswordHashing::Interactive;
};

/// The relational store for datasets, columns, samples and users.
///
/// Every read and write that touches a dataset checks the actor's rights:
/// a user may view a dataset iff they are admin, its owner, or hold a grant;
/// they may write to it iff they are admin or owner and not read-only.
/// Viewers never learn whether an invisible dataset exists: both cases
/// raise PermissionDenied.
///
/// All operations run in a serialized transaction and the object may be
/// shared between threads.
class Catalog {
 public:
  /// `connection` is a SQLite path, optionally prefixed with "sqlite:", or
  /// ":memory:". Pending migrations are applied on open.
  static Catalog open(std::string_view connection, CatalogOptions options = {});

  Catalog(Catalog&&) noexcept;
  Catalog& operator=(Catalog&&) noexcept;
  ~Catalog();

  /// Applied migration names, in order.
  std::vector<std::string> applied_migrations() const;

  // Users and institutions.

  /// Creates the first admin account. Fails with DuplicateUser when any
  /// admin already exists.
  User bootstrap_admin(const std::string& username, const std::string& password);
  User create_user(const User& actor, const NewUser& user);
  Institution create_institution(const User& actor, const std::string& name);
  std::optional<Institution> find_institution(std::string_view name) const;
  std::optional<Institution> find_institution(InstitutionId id) const;
  std::optional<User> find_user(UserId id) const;
  std::optional<User> find_user(std::string_view username) const;

  /// Returns the user iff the password matches its digest.
  std::optional<User> authenticate(std::string_view username, std::string_view password) const;

  // Datasets.

  Dataset create_dataset(const NewDataset& request);

  /// Returns the number of samples newly stored. Replayed samples with
  /// identical bits are skipped; a differing value rejects the whole batch.
  std::int64_t append_samples(DatasetId dataset_id, const User& actor,
                              std::span<const SampleFrame> frames);

  std::vector<Dataset> search_datasets(const User& actor, const DatasetFilter& filter = {}) const;
  Dataset get_dataset(const User& actor, DatasetId dataset_id) const;
  std::optional<Dataset> find_dataset(const User& actor, std::string_view name, Date test_date,
                                      InstitutionId institution_id) const;
  bool can_view(const User& actor, DatasetId dataset_id) const;
  bool can_write(const User& actor, DatasetId dataset_id) const;

  void grant_access(const User& actor, DatasetId dataset_id, UserId user_id);
  std::vector<ColumnInfo> get_columns(const User& actor, DatasetId dataset_id) const;

  /// Stored samples of one column inside `range`, ordered by sample_no.
  std::vector<SamplePoint> read_samples(const User& actor, DatasetId dataset_id,
                                        ColumnId column_id, SampleRange range) const;

  void put_misc_data(const User& actor, DatasetId dataset_id, const std::string& key,
                     SampleRange sample_range, const std::string& value_text);
  /// Records whose range intersects `query`; all records when absent.
  std::vector<MiscRecord> get_misc_data(const User& actor, DatasetId dataset_id,
                                        std::optional<SampleRange> query = std::nullopt) const;

  // Harvester mirror.

  void record_harvester_report(const User& actor, const HarvesterReport& report);
  std::vector<HarvesterStatus> harvester_reports(const User& actor) const;

  /// Deterministic text rendering of every experiment table (users without
  /// digests, samples with raw value bits). Two catalogs fed the same
  /// operations produce identical dumps.
  std::string dump() const;

 private:
  struct Impl;
  explicit Catalog(std::unique_ptr<Impl> impl);

  std::unique_ptr<Impl> impl_;
};

}  // namespace galv::catalog

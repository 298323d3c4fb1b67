#include "galv/catalog/catalog.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "galv/migrations.inc"
#include "sqlite.hpp"

namespace galv::catalog {

const char* to_string(CatalogErrc code) noexcept {
  switch (code) {
    case CatalogErrc::DuplicateDataset: return "DuplicateDataset";
    case CatalogErrc::DuplicateUser: return "DuplicateUser";
    case CatalogErrc::DuplicateInstitution: return "DuplicateInstitution";
    case CatalogErrc::ReadOnlyUser: return "ReadOnlyUser";
    case CatalogErrc::UnknownInstitution: return "UnknownInstitution";
    case CatalogErrc::UnknownUser: return "UnknownUser";
    case CatalogErrc::UnknownDataset: return "UnknownDataset";
    case CatalogErrc::PermissionDenied: return "PermissionDenied";
    case CatalogErrc::ForeignColumn: return "ForeignColumn";
    case CatalogErrc::ConflictingValue: return "ConflictingValue";
    case CatalogErrc::RangeOutOfBounds: return "RangeOutOfBounds";
    case CatalogErrc::InvalidArgument: return "InvalidArgument";
    case CatalogErrc::Storage: return "Storage";
  }
  return "CatalogError";
}

namespace {

constexpr ColumnTypeId kUnknownType{1};

[[noreturn]] void raise(CatalogErrc code, const std::string& message) {
  throw CatalogError(code, message);
}

class Transaction {
 public:
  explicit Transaction(sql::Database& db) : db_(db) { db_.exec("BEGIN IMMEDIATE"); }
  Transaction(const Transaction&) = delete;
  Transaction& operator=(const Transaction&) = delete;
  ~Transaction() {
    if (!done_) {
      try {
        db_.exec("ROLLBACK");
      } catch (...) {
      }
    }
  }
  void commit() {
    db_.exec("COMMIT");
    done_ = true;
  }

 private:
  sql::Database& db_;
  bool done_ = false;
};

std::string strip_prefix(std::string_view connection) {
  if (connection.starts_with("sqlite://")) connection.remove_prefix(9);
  else if (connection.starts_with("sqlite:")) connection.remove_prefix(7);
  return std::string(connection);
}

std::string hash_password(std::string_view password, PasswordHashing hashing) {
  char out[crypto_pwhash_STRBYTES];
  const auto ops = hashing == PasswordHashing::Minimum ? crypto_pwhash_OPSLIMIT_MIN
                                                       : crypto_pwhash_OPSLIMIT_INTERACTIVE;
  const auto mem = hashing == PasswordHashing::Minimum ? crypto_pwhash_MEMLIMIT_MIN
                                                       : crypto_pwhash_MEMLIMIT_INTERACTIVE;
  if (crypto_pwhash_str(out, password.data(), password.size(), ops, mem) != 0) {
    raise(CatalogErrc::Storage, "password hashing ran out of memory");
  }
  return out;
}

bool verify_password(const std::string& digest, std::string_view password) {
  return crypto_pwhash_str_verify(digest.c_str(), password.data(), password.size()) == 0;
}

User read_user(const sql::Statement& st, int first) {
  return User{UserId{st.int64(first)}, st.text(first + 1), st.int64(first + 2) != 0,
              st.int64(first + 3) != 0};
}

Date read_date(const sql::Statement& st, int column) {
  auto d = parse_iso_date(st.text(column));
  if (!d) raise(CatalogErrc::Storage, "corrupt date in catalog: " + st.text(column));
  return *d;
}

constexpr std::string_view kDatasetColumns =
    "d.id, d.name, d.test_date, d.dataset_type, d.institution_id, d.owner_id, d.sample_count";

Dataset read_dataset(const sql::Statement& st) {
  return Dataset{DatasetId{st.int64(0)}, st.text(1),  read_date(st, 2), st.text(3),
                 InstitutionId{st.int64(4)}, UserId{st.int64(5)}, st.int64(6)};
}

std::string escape_field(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '|': out += "\\|"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::hh_mm_ss hms{now - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_iso_date(Date{day}).c_str(),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace

struct Catalog::Impl {
  sql::Database db;
  CatalogOptions options;
  std::string dummy_digest;
  mutable std::mutex mutex;

  Impl(const std::string& path, CatalogOptions opts) : db(path), options(opts) {}

  void migrate() {
    db.exec("PRAGMA foreign_keys = ON");
    db.exec(
        "CREATE TABLE IF NOT EXISTS schema_migration ("
        " name TEXT PRIMARY KEY, applied_at TEXT NOT NULL)");
    for (const auto& m : detail::kMigrations) {
      Transaction tx(db);
      sql::Statement seen(db, "SELECT 1 FROM schema_migration WHERE name = ?");
      seen.bind(1, m.name);
      if (seen.step()) continue;
      db.exec(m.sql);
      sql::Statement mark(db, "INSERT INTO schema_migration (name, applied_at) VALUES (?, ?)");
      mark.bind(1, m.name).bind(2, utc_timestamp()).run();
      tx.commit();
    }
  }

  // All helpers below assume the caller holds `mutex`.

  std::optional<User> user_by_id(UserId id) const {
    sql::Statement st(db, "SELECT id, username, is_admin, is_read_only FROM user_account WHERE id = ?");
    st.bind(1, raw(id));
    if (!st.step()) return std::nullopt;
    return read_user(st, 0);
  }

  /// Re-reads the actor so stale flags held by callers never grant rights.
  User fresh_actor(const User& actor) const {
    auto u = user_by_id(actor.id);
    if (!u) raise(CatalogErrc::PermissionDenied, "unknown actor");
    return *u;
  }

  std::optional<Dataset> dataset_by_id(DatasetId id) const {
    sql::Statement st(db, std::string("SELECT ") + std::string(kDatasetColumns) +
                              " FROM dataset d WHERE d.id = ?");
    st.bind(1, raw(id));
    if (!st.step()) return std::nullopt;
    return read_dataset(st);
  }

  bool has_grant(DatasetId dataset, UserId user) const {
    sql::Statement st(db, "SELECT 1 FROM access_grant WHERE dataset_id = ? AND user_id = ?");
    st.bind(1, raw(dataset)).bind(2, raw(user));
    return st.step();
  }

  bool viewable(const User& actor, const Dataset& d) const {
    return actor.is_admin || d.owner_id == actor.id || has_grant(d.id, actor.id);
  }

  bool writable(const User& actor, const Dataset& d) const {
    return !actor.is_read_only && (actor.is_admin || d.owner_id == actor.id);
  }

  Dataset visible_dataset(const User& actor, DatasetId id) const {
    auto d = dataset_by_id(id);
    if (!d || !viewable(actor, *d)) {
      raise(CatalogErrc::PermissionDenied, "dataset " + std::to_string(raw(id)) + " not accessible");
    }
    return *d;
  }

  Dataset writable_dataset(const User& actor, DatasetId id) const {
    auto d = dataset_by_id(id);
    if (!d || !writable(actor, *d)) {
      raise(CatalogErrc::PermissionDenied,
            "no write permission on dataset " + std::to_string(raw(id)));
    }
    return *d;
  }

  void require_admin(const User& actor) const {
    if (!actor.is_admin) raise(CatalogErrc::PermissionDenied, "administrator rights required");
  }

  ColumnTypeId resolve_type(const ColumnSpec& spec) {
    if (spec.type_name.empty() && spec.unit.empty()) return kUnknownType;
    const std::string base = spec.type_name.empty() ? "unknown" : spec.type_name;
    sql::Statement find(db, "SELECT id, unit FROM column_type WHERE name = ?");
    find.bind(1, base);
    if (find.step()) {
      if (spec.unit.empty() || find.text(1) == spec.unit) return ColumnTypeId{find.int64(0)};
      // Same kind, different unit: keep the unit by binding to a qualified type.
      return find_or_create_type(base + "[" + spec.unit + "]", spec.unit);
    }
    return find_or_create_type(base, spec.unit);
  }

  ColumnTypeId find_or_create_type(const std::string& name, const std::string& unit) {
    sql::Statement find(db, "SELECT id FROM column_type WHERE name = ?");
    find.bind(1, name);
    if (find.step()) return ColumnTypeId{find.int64(0)};
    sql::Statement insert(db, "INSERT INTO column_type (name, unit) VALUES (?, ?)");
    insert.bind(1, name).bind(2, unit).run();
    return ColumnTypeId{db.last_insert_rowid()};
  }

  void recompute_sample_count(DatasetId dataset) {
    sql::Statement st(db,
                      "UPDATE dataset SET sample_count = ("
                      " SELECT COUNT(DISTINCT t.sample_no) FROM timeseries_data t"
                      " JOIN data_column c ON c.id = t.column_id WHERE c.dataset_id = ?1)"
                      " WHERE id = ?1");
    st.bind(1, raw(dataset)).run();
  }
};

Catalog::Catalog(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Catalog::Catalog(Catalog&&) noexcept = default;
Catalog& Catalog::operator=(Catalog&&) noexcept = default;
Catalog::~Catalog() = default;

Catalog Catalog::open(std::string_view connection, CatalogOptions options) {
  if (sodium_init() < 0) raise(CatalogErrc::Storage, "libsodium initialisation failed");
  const auto path = strip_prefix(connection);
  if (path.empty()) raise(CatalogErrc::InvalidArgument, "empty catalog connection string");
  try {
    auto impl = std::make_unique<Impl>(path, options);
    if (path != ":memory:") {
      impl->db.exec("PRAGMA journal_mode = WAL");
      impl->db.exec("PRAGMA synchronous = NORMAL");
    }
    impl->migrate();
    impl->dummy_digest = hash_password("galv-timing-equaliser", options.hashing);
    return Catalog(std::move(impl));
  } catch (const sql::SqliteError& e) {
    raise(CatalogErrc::Storage, e.what());
  }
}

std::vector<std::string> Catalog::applied_migrations() const {
  std::lock_guard lock(impl_->mutex);
  sql::Statement st(impl_->db, "SELECT name FROM schema_migration ORDER BY name");
  std::vector<std::string> out;
  while (st.step()) out.push_back(st.text(0));
  return out;
}

User Catalog::bootstrap_admin(const std::string& username, const std::string& password) {
  if (username.empty()) raise(CatalogErrc::InvalidArgument, "username must not be empty");
  const auto digest = hash_password(password, impl_->options.hashing);
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  Transaction tx(db);
  sql::Statement any(db, "SELECT 1 FROM user_account WHERE is_admin = 1");
  if (any.step()) raise(CatalogErrc::DuplicateUser, "an administrator already exists");
  sql::Statement taken(db, "SELECT 1 FROM user_account WHERE username = ?");
  taken.bind(1, username);
  if (taken.step()) raise(CatalogErrc::DuplicateUser, "user " + username + " already exists");
  sql::Statement st(db,
                    "INSERT INTO user_account (username, password_digest, is_admin, is_read_only)"
                    " VALUES (?, ?, 1, 0)");
  st.bind(1, username).bind(2, digest).run();
  User user{UserId{db.last_insert_rowid()}, username, true, false};
  tx.commit();
  return user;
}

User Catalog::create_user(const User& actor, const NewUser& request) {
  if (request.username.empty()) raise(CatalogErrc::InvalidArgument, "username must not be empty");
  if (request.is_admin && request.is_read_only) {
    raise(CatalogErrc::InvalidArgument, "an administrator cannot be read-only");
  }
  const auto digest = hash_password(request.password, impl_->options.hashing);
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  Transaction tx(db);
  impl_->require_admin(impl_->fresh_actor(actor));
  sql::Statement taken(db, "SELECT 1 FROM user_account WHERE username = ?");
  taken.bind(1, request.username);
  if (taken.step()) {
    raise(CatalogErrc::DuplicateUser, "user " + request.username + " already exists");
  }
  sql::Statement st(db,
                    "INSERT INTO user_account (username, password_digest, is_admin, is_read_only)"
                    " VALUES (?, ?, ?, ?)");
  st.bind(1, request.username)
      .bind(2, digest)
      .bind(3, std::int64_t{request.is_admin})
      .bind(4, std::int64_t{request.is_read_only})
      .run();
  User user{UserId{db.last_insert_rowid()}, request.username, request.is_admin,
            request.is_read_only};
  tx.commit();
  return user;
}

Institution Catalog::create_institution(const User& actor, const std::string& name) {
  if (name.empty()) raise(CatalogErrc::InvalidArgument, "institution name must not be empty");
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  Transaction tx(db);
  impl_->require_admin(impl_->fresh_actor(actor));
  sql::Statement taken(db, "SELECT 1 FROM institution WHERE name = ?");
  taken.bind(1, name);
  if (taken.step()) raise(CatalogErrc::DuplicateInstitution, "institution " + name + " exists");
  sql::Statement st(db, "INSERT INTO institution (name) VALUES (?)");
  st.bind(1, name).run();
  Institution inst{InstitutionId{db.last_insert_rowid()}, name};
  tx.commit();
  return inst;
}

std::optional<Institution> Catalog::find_institution(std::string_view name) const {
  std::lock_guard lock(impl_->mutex);
  sql::Statement st(impl_->db, "SELECT id, name FROM institution WHERE name = ?");
  st.bind(1, name);
  if (!st.step()) return std::nullopt;
  return Institution{InstitutionId{st.int64(0)}, st.text(1)};
}

std::optional<Institution> Catalog::find_institution(InstitutionId id) const {
  std::lock_guard lock(impl_->mutex);
  sql::Statement st(impl_->db, "SELECT id, name FROM institution WHERE id = ?");
  st.bind(1, raw(id));
  if (!st.step()) return std::nullopt;
  return Institution{InstitutionId{st.int64(0)}, st.text(1)};
}

std::optional<User> Catalog::find_user(UserId id) const {
  std::lock_guard lock(impl_->mutex);
  return impl_->user_by_id(id);
}

std::optional<User> Catalog::find_user(std::string_view username) const {
  std::lock_guard lock(impl_->mutex);
  sql::Statement st(impl_->db,
                    "SELECT id, username, is_admin, is_read_only FROM user_account WHERE username = ?");
  st.bind(1, username);
  if (!st.step()) return std::nullopt;
  return read_user(st, 0);
}

std::optional<User> Catalog::authenticate(std::string_view username,
                                          std::string_view password) const {
  std::optional<User> user;
  std::string digest;
  {
    std::lock_guard lock(impl_->mutex);
    sql::Statement st(impl_->db,
                      "SELECT id, username, is_admin, is_read_only, password_digest"
                      " FROM user_account WHERE username = ?");
    st.bind(1, username);
    if (st.step()) {
      user = read_user(st, 0);
      digest = st.text(4);
    }
  }
  // Unknown users still pay for one verification so timing does not reveal them.
  const bool ok = verify_password(user ? digest : impl_->dummy_digest, password);
  if (!user || !ok) return std::nullopt;
  return user;
}

Dataset Catalog::create_dataset(const NewDataset& request) {
  if (request.name.empty()) raise(CatalogErrc::InvalidArgument, "dataset name must not be empty");
  if (!request.test_date.ok()) raise(CatalogErrc::InvalidArgument, "invalid test date");
  {
    std::set<std::string> names;
    for (const auto& c : request.columns) {
      if (c.name.empty()) raise(CatalogErrc::InvalidArgument, "column name must not be empty");
      if (!names.insert(c.name).second) {
        raise(CatalogErrc::InvalidArgument, "duplicate column name " + c.name);
      }
    }
  }
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  try {
    Transaction tx(db);
    auto owner = impl_->user_by_id(request.owner_id);
    if (!owner) raise(CatalogErrc::UnknownUser, "unknown owner");
    if (owner->is_read_only) {
      raise(CatalogErrc::ReadOnlyUser, "read-only user " + owner->username + " cannot own data");
    }
    {
      sql::Statement inst(db, "SELECT 1 FROM institution WHERE id = ?");
      inst.bind(1, raw(request.institution_id));
      if (!inst.step()) raise(CatalogErrc::UnknownInstitution, "unknown institution");
    }
    const auto date = format_iso_date(request.test_date);
    {
      sql::Statement dup(db,
                         "SELECT 1 FROM dataset WHERE name = ? AND test_date = ? AND"
                         " institution_id = ?");
      dup.bind(1, request.name).bind(2, date).bind(3, raw(request.institution_id));
      if (dup.step()) {
        raise(CatalogErrc::DuplicateDataset,
              "dataset " + request.name + " dated " + date + " already exists");
      }
    }
    sql::Statement insert(db,
                          "INSERT INTO dataset (name, test_date, dataset_type, institution_id,"
                          " owner_id, sample_count) VALUES (?, ?, ?, ?, ?, 0)");
    insert.bind(1, request.name)
        .bind(2, date)
        .bind(3, request.dataset_type)
        .bind(4, raw(request.institution_id))
        .bind(5, raw(request.owner_id))
        .run();
    Dataset d{DatasetId{db.last_insert_rowid()}, request.name,  request.test_date,
              request.dataset_type,               request.institution_id, request.owner_id, 0};
    sql::Statement col(db, "INSERT INTO data_column (dataset_id, name, type_id) VALUES (?, ?, ?)");
    for (const auto& spec : request.columns) {
      const auto type = impl_->resolve_type(spec);
      col.bind(1, raw(d.id)).bind(2, spec.name).bind(3, raw(type)).run();
    }
    tx.commit();
    return d;
  } catch (const sql::SqliteError& e) {
    raise(CatalogErrc::Storage, e.what());
  }
}

std::int64_t Catalog::append_samples(DatasetId dataset_id, const User& actor,
                                     std::span<const SampleFrame> frames) {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  try {
    Transaction tx(db);
    const auto user = impl_->fresh_actor(actor);
    impl_->writable_dataset(user, dataset_id);

    std::set<std::int64_t> owned;
    {
      sql::Statement st(db, "SELECT id FROM data_column WHERE dataset_id = ?");
      st.bind(1, raw(dataset_id));
      while (st.step()) owned.insert(st.int64(0));
    }
    for (const auto& f : frames) {
      if (!owned.contains(raw(f.column_id))) {
        raise(CatalogErrc::ForeignColumn, "column " + std::to_string(raw(f.column_id)) +
                                              " does not belong to dataset " +
                                              std::to_string(raw(dataset_id)));
      }
    }

    sql::Statement insert(db,
                          "INSERT OR IGNORE INTO timeseries_data (column_id, sample_no, value_bits)"
                          " VALUES (?, ?, ?)");
    sql::Statement existing(db,
                            "SELECT value_bits FROM timeseries_data"
                            " WHERE column_id = ? AND sample_no = ?");
    std::int64_t appended = 0;
    for (const auto& f : frames) {
      for (const auto& s : f.samples) {
        if (s.sample_no < 0) {
          raise(CatalogErrc::InvalidArgument, "negative sample number " + std::to_string(s.sample_no));
        }
        const auto bits = std::bit_cast<std::int64_t>(s.value);
        insert.bind(1, raw(f.column_id)).bind(2, s.sample_no).bind(3, bits).run();
        if (db.changes() == 1) {
          ++appended;
          continue;
        }
        existing.bind(1, raw(f.column_id)).bind(2, s.sample_no);
        const bool found = existing.step();
        const auto stored = found ? existing.int64(0) : bits;
        existing.reset();
        if (stored != bits) {
          raise(CatalogErrc::ConflictingValue,
                "column " + std::to_string(raw(f.column_id)) + " sample " +
                    std::to_string(s.sample_no) + " already holds a different value");
        }
      }
    }
    if (appended > 0) impl_->recompute_sample_count(dataset_id);
    tx.commit();
    return appended;
  } catch (const sql::SqliteError& e) {
    raise(CatalogErrc::Storage, e.what());
  }
}

std::vector<Dataset> Catalog::search_datasets(const User& actor, const DatasetFilter& filter) const {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  const auto user = impl_->user_by_id(actor.id);
  if (!user) return {};
  std::string query = std::string("SELECT ") + std::string(kDatasetColumns) +
                      " FROM dataset d WHERE (?1 = 1 OR d.owner_id = ?2 OR EXISTS ("
                      " SELECT 1 FROM access_grant g WHERE g.dataset_id = d.id AND g.user_id = ?2))"
                      " AND (?3 IS NULL OR instr(d.name, ?3) > 0)"
                      " AND (?4 IS NULL OR d.test_date >= ?4)"
                      " AND (?5 IS NULL OR d.test_date <= ?5)"
                      " AND (?6 IS NULL OR d.dataset_type = ?6)"
                      " ORDER BY d.test_date, d.id";
  sql::Statement st(db, query);
  st.bind(1, std::int64_t{user->is_admin}).bind(2, raw(user->id));
  st.bind(3, filter.name_substring);
  st.bind(4, filter.date_from ? std::optional(format_iso_date(*filter.date_from)) : std::nullopt);
  st.bind(5, filter.date_to ? std::optional(format_iso_date(*filter.date_to)) : std::nullopt);
  st.bind(6, filter.dataset_type);
  std::vector<Dataset> out;
  while (st.step()) out.push_back(read_dataset(st));
  return out;
}

Dataset Catalog::get_dataset(const User& actor, DatasetId dataset_id) const {
  std::lock_guard lock(impl_->mutex);
  return impl_->visible_dataset(impl_->fresh_actor(actor), dataset_id);
}

std::optional<Dataset> Catalog::find_dataset(const User& actor, std::string_view name,
                                             Date test_date, InstitutionId institution_id) const {
  std::lock_guard lock(impl_->mutex);
  const auto user = impl_->fresh_actor(actor);
  sql::Statement st(impl_->db, std::string("SELECT ") + std::string(kDatasetColumns) +
                                   " FROM dataset d WHERE d.name = ? AND d.test_date = ? AND"
                                   " d.institution_id = ?");
  st.bind(1, name).bind(2, format_iso_date(test_date)).bind(3, raw(institution_id));
  if (!st.step()) return std::nullopt;
  auto d = read_dataset(st);
  if (!impl_->viewable(user, d)) return std::nullopt;
  return d;
}

bool Catalog::can_view(const User& actor, DatasetId dataset_id) const {
  std::lock_guard lock(impl_->mutex);
  auto user = impl_->user_by_id(actor.id);
  auto d = impl_->dataset_by_id(dataset_id);
  return user && d && impl_->viewable(*user, *d);
}

bool Catalog::can_write(const User& actor, DatasetId dataset_id) const {
  std::lock_guard lock(impl_->mutex);
  auto user = impl_->user_by_id(actor.id);
  auto d = impl_->dataset_by_id(dataset_id);
  return user && d && impl_->writable(*user, *d);
}

void Catalog::grant_access(const User& actor, DatasetId dataset_id, UserId user_id) {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  Transaction tx(db);
  const auto granter = impl_->fresh_actor(actor);
  auto d = impl_->dataset_by_id(dataset_id);
  if (!d) {
    if (granter.is_admin) raise(CatalogErrc::UnknownDataset, "unknown dataset");
    raise(CatalogErrc::PermissionDenied, "dataset not accessible");
  }
  if (!granter.is_admin && d->owner_id != granter.id) {
    raise(CatalogErrc::PermissionDenied, "only the owner or an administrator may grant access");
  }
  if (granter.is_read_only) raise(CatalogErrc::PermissionDenied, "read-only users cannot grant");
  if (!impl_->user_by_id(user_id)) raise(CatalogErrc::UnknownUser, "unknown grantee");
  sql::Statement st(db, "INSERT OR IGNORE INTO access_grant (dataset_id, user_id) VALUES (?, ?)");
  st.bind(1, raw(dataset_id)).bind(2, raw(user_id)).run();
  tx.commit();
}

std::vector<ColumnInfo> Catalog::get_columns(const User& actor, DatasetId dataset_id) const {
  std::lock_guard lock(impl_->mutex);
  impl_->visible_dataset(impl_->fresh_actor(actor), dataset_id);
  sql::Statement st(impl_->db,
                    "SELECT c.id, c.dataset_id, c.name, c.type_id, t.name, t.unit"
                    " FROM data_column c JOIN column_type t ON t.id = c.type_id"
                    " WHERE c.dataset_id = ? ORDER BY c.id");
  st.bind(1, raw(dataset_id));
  std::vector<ColumnInfo> out;
  while (st.step()) {
    out.push_back(ColumnInfo{
        Column{ColumnId{st.int64(0)}, DatasetId{st.int64(1)}, st.text(2), ColumnTypeId{st.int64(3)}},
        ColumnType{ColumnTypeId{st.int64(3)}, st.text(4), st.text(5)}});
  }
  return out;
}

std::vector<SamplePoint> Catalog::read_samples(const User& actor, DatasetId dataset_id,
                                               ColumnId column_id, SampleRange range) const {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  impl_->visible_dataset(impl_->fresh_actor(actor), dataset_id);
  {
    sql::Statement st(db, "SELECT 1 FROM data_column WHERE id = ? AND dataset_id = ?");
    st.bind(1, raw(column_id)).bind(2, raw(dataset_id));
    if (!st.step()) {
      raise(CatalogErrc::ForeignColumn, "column " + std::to_string(raw(column_id)) +
                                            " does not belong to dataset " +
                                            std::to_string(raw(dataset_id)));
    }
  }
  std::vector<SamplePoint> out;
  if (range.empty()) return out;
  out.reserve(static_cast<std::size_t>(std::min<std::int64_t>(range.length(), 1 << 20)));
  sql::Statement st(db,
                    "SELECT sample_no, value_bits FROM timeseries_data"
                    " WHERE column_id = ? AND sample_no >= ? AND sample_no < ? ORDER BY sample_no");
  st.bind(1, raw(column_id)).bind(2, range.start).bind(3, range.end);
  while (st.step()) out.push_back({st.int64(0), std::bit_cast<double>(st.int64(1))});
  return out;
}

void Catalog::put_misc_data(const User& actor, DatasetId dataset_id, const std::string& key,
                            SampleRange sample_range, const std::string& value_text) {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  Transaction tx(db);
  const auto d = impl_->writable_dataset(impl_->fresh_actor(actor), dataset_id);
  if (key.empty()) raise(CatalogErrc::InvalidArgument, "misc key must not be empty");
  if (!sample_range.valid() || sample_range.start < 0 || sample_range.end > d.sample_count) {
    raise(CatalogErrc::RangeOutOfBounds, "range " + galv::to_string(sample_range) +
                                             " outside [0," + std::to_string(d.sample_count) + "]");
  }
  sql::Statement st(db,
                    "INSERT INTO misc_file_data (dataset_id, key, range_start, range_end, value_text)"
                    " VALUES (?, ?, ?, ?, ?) ON CONFLICT (dataset_id, key, range_start, range_end)"
                    " DO UPDATE SET value_text = excluded.value_text");
  st.bind(1, raw(dataset_id))
      .bind(2, key)
      .bind(3, sample_range.start)
      .bind(4, sample_range.end)
      .bind(5, value_text)
      .run();
  tx.commit();
}

std::vector<MiscRecord> Catalog::get_misc_data(const User& actor, DatasetId dataset_id,
                                               std::optional<SampleRange> query) const {
  std::lock_guard lock(impl_->mutex);
  impl_->visible_dataset(impl_->fresh_actor(actor), dataset_id);
  sql::Statement st(impl_->db,
                    "SELECT key, range_start, range_end, value_text FROM misc_file_data"
                    " WHERE dataset_id = ?1 AND (?2 IS NULL OR (range_start < ?3 AND ?2 < range_end))"
                    " ORDER BY range_start, range_end, key");
  st.bind(1, raw(dataset_id));
  st.bind(2, query ? std::optional(query->start) : std::nullopt);
  st.bind(3, query ? std::optional(query->end) : std::nullopt);
  std::vector<MiscRecord> out;
  while (st.step()) {
    out.push_back(MiscRecord{dataset_id, st.text(0), {st.int64(1), st.int64(2)}, st.text(3)});
  }
  return out;
}

void Catalog::record_harvester_report(const User& actor, const HarvesterReport& report) {
  if (report.harvester_name.empty()) {
    raise(CatalogErrc::InvalidArgument, "harvester name must not be empty");
  }
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  try {
    Transaction tx(db);
    const auto user = impl_->fresh_actor(actor);
    if (user.is_read_only) raise(CatalogErrc::ReadOnlyUser, "read-only users cannot report");

    std::optional<std::int64_t> harvester_id;
    {
      sql::Statement st(db, "SELECT id, reported_by FROM harvester WHERE name = ?");
      st.bind(1, report.harvester_name);
      if (st.step()) {
        if (!user.is_admin && UserId{st.int64(1)} != user.id) {
          raise(CatalogErrc::PermissionDenied, "harvester is registered to another user");
        }
        harvester_id = st.int64(0);
      }
    }
    if (harvester_id) {
      sql::Statement obs(db,
                         "DELETE FROM observed_path WHERE monitored_path_id IN ("
                         " SELECT id FROM monitored_path WHERE harvester_id = ?)");
      obs.bind(1, *harvester_id).run();
      sql::Statement mon(db, "DELETE FROM monitored_path WHERE harvester_id = ?");
      mon.bind(1, *harvester_id).run();
      sql::Statement upd(db, "UPDATE harvester SET reported_by = ?, reported_at = ? WHERE id = ?");
      upd.bind(1, raw(user.id)).bind(2, utc_timestamp()).bind(3, *harvester_id).run();
    } else {
      sql::Statement ins(db, "INSERT INTO harvester (name, reported_by, reported_at) VALUES (?, ?, ?)");
      ins.bind(1, report.harvester_name).bind(2, raw(user.id)).bind(3, utc_timestamp()).run();
      harvester_id = db.last_insert_rowid();
    }

    std::unordered_map<std::string, std::int64_t> path_ids;
    sql::Statement mon(db,
                       "INSERT INTO monitored_path (harvester_id, path, owner, institution)"
                       " VALUES (?, ?, ?, ?)");
    for (const auto& m : report.monitored_paths) {
      if (path_ids.contains(m.root_path)) {
        raise(CatalogErrc::InvalidArgument, "duplicate monitored path " + m.root_path);
      }
      mon.bind(1, *harvester_id).bind(2, m.root_path).bind(3, m.owner).bind(4, m.institution).run();
      path_ids[m.root_path] = db.last_insert_rowid();
    }
    sql::Statement obs(db,
                       "INSERT INTO observed_path (monitored_path_id, relative_path, state,"
                       " last_seen_size, stable_scan_count, imported_byte_offset, imported_row_count,"
                       " dataset_id, failure_reason) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)");
    for (const auto& o : report.observed_paths) {
      auto it = path_ids.find(o.root_path);
      if (it == path_ids.end()) {
        raise(CatalogErrc::InvalidArgument, "observed path under unreported root " + o.root_path);
      }
      obs.bind(1, it->second)
          .bind(2, o.relative_path)
          .bind(3, o.state)
          .bind(4, o.last_seen_size)
          .bind(5, o.stable_scan_count)
          .bind(6, o.imported_byte_offset)
          .bind(7, o.imported_row_count)
          .bind(8, o.dataset_id)
          .bind(9, o.failure_reason)
          .run();
    }
    tx.commit();
  } catch (const sql::SqliteError& e) {
    raise(e.is_constraint() ? CatalogErrc::InvalidArgument : CatalogErrc::Storage, e.what());
  }
}

std::vector<HarvesterStatus> Catalog::harvester_reports(const User& actor) const {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  impl_->require_admin(impl_->fresh_actor(actor));
  std::vector<HarvesterStatus> out;
  sql::Statement hs(db,
                    "SELECT h.id, h.name, u.username, h.reported_at FROM harvester h"
                    " JOIN user_account u ON u.id = h.reported_by ORDER BY h.name");
  sql::Statement mp(db,
                    "SELECT path, owner, institution FROM monitored_path WHERE harvester_id = ?"
                    " ORDER BY path");
  sql::Statement op(db,
                    "SELECT m.path, o.relative_path, o.state, o.last_seen_size, o.stable_scan_count,"
                    " o.imported_byte_offset, o.imported_row_count, o.dataset_id, o.failure_reason"
                    " FROM observed_path o JOIN monitored_path m ON m.id = o.monitored_path_id"
                    " WHERE m.harvester_id = ? ORDER BY m.path, o.relative_path");
  while (hs.step()) {
    HarvesterStatus status{hs.text(1), hs.text(2), hs.text(3), {}, {}};
    mp.bind(1, hs.int64(0));
    while (mp.step()) status.monitored_paths.push_back({mp.text(0), mp.text(1), mp.text(2)});
    mp.reset();
    op.bind(1, hs.int64(0));
    while (op.step()) {
      ObservedPathReport o;
      o.root_path = op.text(0);
      o.relative_path = op.text(1);
      o.state = op.text(2);
      o.last_seen_size = op.int64(3);
      o.stable_scan_count = op.int64(4);
      o.imported_byte_offset = op.int64(5);
      o.imported_row_count = op.int64(6);
      if (!op.is_null(7)) o.dataset_id = op.int64(7);
      if (!op.is_null(8)) o.failure_reason = op.text(8);
      status.observed_paths.push_back(std::move(o));
    }
    op.reset();
    out.push_back(std::move(status));
  }
  return out;
}

std::string Catalog::dump() const {
  std::lock_guard lock(impl_->mutex);
  auto& db = impl_->db;
  std::ostringstream out;
  auto section = [&](const char* tag, const char* query, int columns) {
    sql::Statement st(db, query);
    while (st.step()) {
      out << tag;
      for (int i = 0; i < columns; ++i) out << '|' << escape_field(st.text(i));
      out << '\n';
    }
  };
  section("institution", "SELECT id, name FROM institution ORDER BY id", 2);
  section("user", "SELECT id, username, is_admin, is_read_only FROM user_account ORDER BY id", 4);
  section("dataset",
          "SELECT id, name, test_date, dataset_type, institution_id, owner_id, sample_count"
          " FROM dataset ORDER BY id",
          7);
  section("column_type", "SELECT id, name, unit FROM column_type ORDER BY id", 3);
  section("column", "SELECT id, dataset_id, name, type_id FROM data_column ORDER BY id", 4);
  section("grant", "SELECT dataset_id, user_id FROM access_grant ORDER BY dataset_id, user_id", 2);
  section("misc",
          "SELECT dataset_id, key, range_start, range_end, value_text FROM misc_file_data"
          " ORDER BY dataset_id, key, range_start, range_end",
          5);
  {
    sql::Statement st(db,
                      "SELECT column_id, sample_no, value_bits FROM timeseries_data"
                      " ORDER BY column_id, sample_no");
    char bits[24];
    while (st.step()) {
      std::snprintf(bits, sizeof bits, "%016llx",
                    static_cast<unsigned long long>(static_cast<std::uint64_t>(st.int64(2))));
      out << "sample|" << st.int64(0) << '|' << st.int64(1) << '|' << bits << '\n';
    }
  }
  return out.str();
}

}  // namespace galv::catalog

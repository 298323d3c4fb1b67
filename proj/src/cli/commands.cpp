#include "galv/cli/commands.hpp"

#include <termios.h>
#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "galv/api/client.hpp"
#include "galv/cli/profile.hpp"
#include "galv/decimal.hpp"

namespace galv::cli {
namespace {

using Rows = std::vector<std::vector<std::string>>;

// Raised for local failures that should exit like an API error.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void render_table(std::ostream& out, const Rows& rows) {
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += " | ";
      line += r[i];
      if (i + 1 < r.size()) line.append(width[i] - r[i].size(), ' ');
    }
    out << line << '\n';
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void render_csv(std::ostream& out, const Rows& rows) {
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
    out << '\n';
  }
}

void render(std::ostream& out, OutputFormat format, const Rows& rows, const std::string& raw_json) {
  switch (format) {
    case OutputFormat::Json:
      out << raw_json << '\n';
      break;
    case OutputFormat::Csv:
      render_csv(out, rows);
      break;
    case OutputFormat::Table:
      render_table(out, rows);
      break;
  }
}

SampleRange parse_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageFailure("range must look like a..b");
  auto num = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
      throw UsageFailure("range bounds must be integers: " + text);
    return v;
  };
  std::string_view all = text;
  auto a = num(all.substr(0, dots));
  auto b = num(all.substr(dots + 2));
  if (a < 0 || a > b) throw UsageFailure("range must satisfy 0 <= a <= b: " + text);
  return {a, b};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string column_heading(const api::ColumnSummary& c) {
  return c.unit.empty() ? c.name : c.name + " (" + c.unit + ")";
}

std::string read_stdin_line() {
  std::string line;
  std::getline(std::cin, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

class Session {
 public:
  explicit Session(CliEnvironment& env) : env_(env), profile_(load_profile(env.profile_path)) {}

  Profile& profile() { return profile_; }
  void save() { save_profile(env_.profile_path, profile_); }

  api::ApiClient client() {
    api::ApiClient c(profile_.server_endpoint);
    if (profile_.token) c.set_token(*profile_.token);
    return c;
  }

  OutputFormat format(const std::string& flag) const {
    if (flag.empty()) return profile_.output_format;
    auto f = output_format_from_string(flag);
    if (!f) throw UsageFailure("unknown format " + flag + " (table, json or csv)");
    return *f;
  }

 private:
  CliEnvironment& env_;
  Profile profile_;
};

void export_csv(api::ApiClient& client, DatasetId dataset, const std::string& column_names,
                const std::string& range_text, const std::filesystem::path& out_path, std::ostream& out) {
  auto columns = client.columns(dataset);
  std::vector<api::ColumnSummary> chosen;
  if (column_names.empty()) {
    chosen = columns;
  } else {
    for (const auto& name : split_commas(column_names)) {
      auto it = std::find_if(columns.begin(), columns.end(), [&](const auto& c) { return c.name == name; });
      if (it == columns.end()) throw UsageFailure("dataset has no column named " + name);
      chosen.push_back(*it);
    }
  }
  SampleRange range{0, std::numeric_limits<std::int64_t>::max()};
  if (!range_text.empty()) range = parse_range(range_text);

  std::vector<ColumnId> ids;
  for (const auto& c : chosen) ids.push_back(c.column_id);
  auto result = client.fetch(dataset, ids, range);

  std::map<ColumnId, std::size_t> slot;
  for (std::size_t i = 0; i < chosen.size(); ++i) slot.emplace(chosen[i].column_id, i);
  std::map<std::int64_t, std::vector<std::optional<double>>> rows;
  for (const auto& f : result.frames) {
    auto s = slot.find(f.column_id);
    if (s == slot.end()) continue;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      auto& row = rows[f.range.start + static_cast<std::int64_t>(i)];
      row.resize(chosen.size());
      row[s->second] = f.values[i];
    }
  }

  auto tmp = out_path;
  tmp += ".partial";
  try {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw UsageFailure("cannot write " + tmp.string());
    file << "sample_no";
    for (const auto& c : chosen) file << ',' << column_heading(c);
    file << '\n';
    for (const auto& [n, values] : rows) {
      file << n;
      for (const auto& v : values) {
        file << ',';
        if (v) file << format_decimal17(*v);
      }
      file << '\n';
    }
    file.close();
    if (!file) throw UsageFailure("write failed on " + tmp.string());
    std::filesystem::rename(tmp, out_path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  out << "wrote " << rows.size() << " rows x " << chosen.size() << " columns to " << out_path.string() << '\n';
}

}  // namespace

std::string read_secret_from_terminal(const std::string& prompt) {
  FILE* tty = std::fopen("/dev/tty", "r+");
  if (!tty) return read_stdin_line();
  int fd = fileno(tty);
  termios old{};
  bool restore = tcgetattr(fd, &old) == 0;
  if (restore) {
    termios quiet = old;
    quiet.c_lflag &= static_cast<tcflag_t>(~ECHO);
    tcsetattr(fd, TCSAFLUSH, &quiet);
  }
  std::fputs(prompt.c_str(), tty);
  std::fflush(tty);
  std::string line;
  for (int c = std::fgetc(tty); c != EOF && c != '\n'; c = std::fgetc(tty)) line += static_cast<char>(c);
  if (restore) tcsetattr(fd, TCSAFLUSH, &old);
  std::fputs("\n", tty);
  std::fclose(tty);
  return line;
}

int run(int argc, const char* const* argv, CliEnvironment& env) {
  CLI::App app{"Administration, search and export for a galv server", "galv"};
  app.require_subcommand(1);
  std::string format_flag;
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format_flag, "table, json or csv (default: the profile's)");
  };

  std::string server, username;
  bool password_stdin = false;
  auto* login = app.add_subcommand("login", "Log in and store the session token in the profile");
  login->add_option("--server", server, "Server endpoint, e.g. http://host:8080");
  login->add_option("--user", username, "Username")->required();
  login->add_flag("--password-stdin", password_stdin, "Read the password from the first line of stdin");
  add_format(login);

  auto* logout = app.add_subcommand("logout", "Forget the stored token");

  auto* user = app.add_subcommand("user", "Manage users (admin)");
  user->require_subcommand(1);
  auto* user_create = user->add_subcommand("create", "Create a user");
  std::string new_user;
  bool read_only = false, admin = false;
  user_create->add_option("name", new_user, "Username")->required();
  user_create->add_flag("--read-only", read_only, "May view but never ingest");
  user_create->add_flag("--admin", admin, "Full rights");
  user_create->add_flag("--password-stdin", password_stdin, "Read the password from the first line of stdin");

  std::int64_t dataset_id = 0;
  std::string grantee;
  auto* grant = app.add_subcommand("grant", "Let a user view a dataset");
  grant->add_option("--dataset", dataset_id, "Dataset id")->required();
  grant->add_option("--user", grantee, "Username")->required();

  auto* institution = app.add_subcommand("institution", "Manage institutions (admin)");
  institution->require_subcommand(1);
  auto* inst_create = institution->add_subcommand("create", "Create an institution");
  std::string inst_name;
  inst_create->add_option("name", inst_name, "Institution name")->required();

  api::SearchQuery query;
  std::string q_name, q_from, q_to, q_type;
  auto* datasets = app.add_subcommand("datasets", "Search visible datasets");
  datasets->add_option("--name", q_name, "Name substring");
  datasets->add_option("--from", q_from, "Earliest test date (YYYY-MM-DD)");
  datasets->add_option("--to", q_to, "Latest test date (YYYY-MM-DD)");
  datasets->add_option("--type", q_type, "Dataset type, e.g. MCR-TSV");
  add_format(datasets);

  auto* columns = app.add_subcommand("columns", "List a dataset's columns");
  columns->add_option("--dataset", dataset_id, "Dataset id")->required();
  add_format(columns);

  std::string column_names, range_text, out_file;
  auto* exp = app.add_subcommand("export", "Write dataset columns to CSV");
  exp->add_option("--dataset", dataset_id, "Dataset id")->required();
  exp->add_option("--columns", column_names, "Comma-separated column names (default: all)");
  exp->add_option("--range", range_text, "Half-open sample range a..b (default: all)");
  exp->add_option("--out", out_file, "Output CSV path")->required();

  auto* harvesters = app.add_subcommand("harvesters", "Show mirrored harvester state (admin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, env.out, env.err) == 0 ? kOk : kApiError;
  }

  try {
    Session session(env);
    auto& profile = session.profile();

    if (*login) {
      if (!server.empty()) profile.server_endpoint = server;
      auto password = password_stdin ? read_stdin_line() : env.read_secret("Password for " + username + ": ");
      auto client = session.client();
      auto r = client.login(username, password);
      profile.token = r.token;
      profile.username = r.user.username;
      profile.expires_at = r.expires_at;
      if (!format_flag.empty()) profile.output_format = session.format(format_flag);
      session.save();
      env.out << "logged in as " << r.user.username << " until " << r.expires_at << '\n';
    } else if (*logout) {
      profile.token.reset();
      profile.expires_at.reset();
      session.save();
      env.out << "logged out\n";
    } else if (*user_create) {
      auto password = password_stdin ? read_stdin_line() : env.read_secret("Password for " + new_user + ": ");
      auto client = session.client();
      auto u = client.create_user({new_user, password, admin, read_only});
      env.out << "created user " << u.username << " (id " << raw(u.id) << ")"
              << (u.is_admin ? " admin" : "") << (u.is_read_only ? " read-only" : "") << '\n';
    } else if (*grant) {
      auto client = session.client();
      client.grant(DatasetId{dataset_id}, grantee);
      env.out << "granted " << grantee << " access to dataset " << dataset_id << '\n';
    } else if (*inst_create) {
      auto client = session.client();
      auto i = client.create_institution(inst_name);
      env.out << "created institution " << i.name << " (id " << raw(i.id) << ")\n";
    } else if (*datasets) {
      auto fmt = session.format(format_flag);
      if (!q_name.empty()) query.name = q_name;
      if (!q_from.empty()) query.from = q_from;
      if (!q_to.empty()) query.to = q_to;
      if (!q_type.empty()) query.type = q_type;
      auto client = session.client();
      auto body = client.search_datasets_raw(query);
      Rows rows{{"id", "name", "date", "type", "institution", "samples"}};
      for (const auto& d : api::parse_json(body)) {
        rows.push_back({std::to_string(d.at("id").get<std::int64_t>()), d.at("name").get<std::string>(),
                        d.at("test_date").get<std::string>(), d.at("dataset_type").get<std::string>(),
                        d.at("institution").get<std::string>(),
                        std::to_string(d.at("sample_count").get<std::int64_t>())});
      }
      render(env.out, fmt, rows, body);
    } else if (*columns) {
      auto fmt = session.format(format_flag);
      auto client = session.client();
      auto r = client.get("/api/datasets/" + std::to_string(dataset_id) + "/columns");
      if (r.status != 200) {
        auto j = api::parse_json(r.body);
        throw api::ApiError(r.status, j.value("error", ""), "HTTP " + std::to_string(r.status) + ": " +
                                                                j.value("message", ""), r.body);
      }
      Rows rows{{"column_id", "name", "type", "unit"}};
      for (const auto& c : api::parse_json(r.body)) {
        rows.push_back({std::to_string(c.at("column_id").get<std::int64_t>()), c.at("name").get<std::string>(),
                        c.at("type").get<std::string>(), c.at("unit").get<std::string>()});
      }
      render(env.out, fmt, rows, r.body);
    } else if (*exp) {
      auto client = session.client();
      export_csv(client, DatasetId{dataset_id}, column_names, range_text, out_file, env.out);
    } else if (*harvesters) {
      auto client = session.client();
      env.out << client.harvesters().dump(2) << '\n';
    }
    return kOk;
  } catch (const api::TransportError& e) {
    env.err << "galv: cannot reach server: " << e.what() << '\n';
    return kConnectionError;
  } catch (const api::ApiError& e) {
    env.err << "galv: " << e.what() << '\n';
    if (e.status() == 401) env.err << "galv: run `galv login` to start a new session\n";
    return kApiError;
  } catch (const std::exception& e) {
    env.err << "galv: " << e.what() << '\n';
    return kApiError;
  }
}

}  // namespace galv::cli

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace galv::cli {

enum class OutputFormat { Table, Json, Csv };

std::string_view to_string(OutputFormat format) noexcept;
std::optional<OutputFormat> output_format_from_string(std::string_view text) noexcept;

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Profile {
  std::string server_endpoint = "http://127.0.0.1:8080";
  /// Absent until a login succeeds.
  std::optional<std::string> token;
  std::optional<std::string> username;
  std::optional<std::string> expires_at;
  OutputFormat output_format = OutputFormat::Table;

  friend bool operator==(const Profile&, const Profile&) = default;
};

/// $GALV_PROFILE, else $HOME/.config/galv/profile.json.
std::filesystem::path default_profile_path();

/// A missing file is the default profile. Throws ProfileError.
Profile load_profile(const std::filesystem::path& path);
/// Creates parent directories; the file is written with mode 0600.
void save_profile(const std::filesystem::path& path, const Profile& profile);

}  // namespace galv::cli

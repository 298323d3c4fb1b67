#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace galv::cli {

enum ExitCode : int { kOk = 0, kApiError = 1, kConnectionError = 2 };

struct CliEnvironment {
  std::filesystem::path profile_path;
  std::ostream& out;
  std::ostream& err;
  /// Reads a secret without echo; the argument is the prompt text.
  std::function<std::string(const std::string&)> read_secret;
};

/// Parses and runs one `galv` invocation.
///
///   galv login --server URL --user NAME [--password-stdin]
///   galv user create NAME [--read-only] [--admin]
///   galv grant --dataset ID --user NAME
///   galv institution create NAME
///   galv datasets [--name S] [--from DATE] [--to DATE] [--type T]
///   galv columns --dataset ID
///   galv export --dataset ID [--columns A,B] [--range a..b] --out FILE
///   galv harvesters
///
/// All listing commands take --format table|json|csv, defaulting to the
/// profile's format.
int run(int argc, const char* const* argv, CliEnvironment& env);

/// Prompts on the controlling terminal with echo disabled; falls back to a
/// line from stdin when there is no terminal.
std::string read_secret_from_terminal(const std::string& prompt);

}  // namespace galv::cli

#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "galv/ids.hpp"

namespace galv::api {

using Clock = std::function<std::chrono::system_clock::time_point()>;

struct SessionToken {
  std::string token;
  UserId user_id{};
  std::chrono::system_clock::time_point issued_at;
  std::chrono::system_clock::time_point expires_at;
};

/// Server-side bearer tokens: 32 random bytes, URL-safe base64 without padding.
class TokenStore {
 public:
  explicit TokenStore(std::chrono::seconds ttl, Clock clock = std::chrono::system_clock::now);

  SessionToken issue(UserId user);
  /// The token's user, or nullopt when unknown or expired.
  std::optional<UserId> authenticate(const std::string& token);
  void revoke(const std::string& token);

  std::chrono::seconds ttl() const noexcept { return ttl_; }

 private:
  std::chrono::seconds ttl_;
  Clock clock_;
  std::mutex mutex_;
  std::unordered_map<std::string, SessionToken> tokens_;
};

/// Sliding one-minute window of failed logins per username.
class LoginLimiter {
 public:
  explicit LoginLimiter(std::size_t max_failures = 5,
                        std::chrono::seconds window = std::chrono::seconds{60},
                        Clock clock = std::chrono::system_clock::now);

  bool limited(const std::string& username);
  void record_failure(const std::string& username);

 private:
  void prune(std::deque<std::chrono::system_clock::time_point>& q,
             std::chrono::system_clock::time_point now) const;

  std::size_t max_failures_;
  std::chrono::seconds window_;
  Clock clock_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::deque<std::chrono::system_clock::time_point>> failures_;
};

}  // namespace galv::api

#include "galv/api/token_store.hpp"

#include <sodium.h>

#include <array>
#include <stdexcept>

namespace galv::api {
namespace {

std::string random_token() {
  std::array<unsigned char, 32> bytes{};
  randombytes_buf(bytes.data(), bytes.size());
  constexpr int variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_ENCODED_LEN(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), variant);
  out.resize(out.find('\0'));
  return out;
}

}  // namespace

TokenStore::TokenStore(std::chrono::seconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
}

SessionToken TokenStore::issue(UserId user) {
  auto now = clock_();
  SessionToken t{random_token(), user, now, now + ttl_};
  std::lock_guard lock(mutex_);
  for (auto it = tokens_.begin(); it != tokens_.end();) {
    it = it->second.expires_at <= now ? tokens_.erase(it) : std::next(it);
  }
  tokens_.emplace(t.token, t);
  return t;
}

std::optional<UserId> TokenStore::authenticate(const std::string& token) {
  auto now = clock_();
  std::lock_guard lock(mutex_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) return std::nullopt;
  if (it->second.expires_at <= now) {
    tokens_.erase(it);
    return std::nullopt;
  }
  return it->second.user_id;
}

void TokenStore::revoke(const std::string& token) {
  std::lock_guard lock(mutex_);
  tokens_.erase(token);
}

LoginLimiter::LoginLimiter(std::size_t max_failures, std::chrono::seconds window, Clock clock)
    : max_failures_(max_failures), window_(window), clock_(std::move(clock)) {}

void LoginLimiter::prune(std::deque<std::chrono::system_clock::time_point>& q,
                         std::chrono::system_clock::time_point now) const {
  while (!q.empty() && q.front() + window_ <= now) q.pop_front();
}

bool LoginLimiter::limited(const std::string& username) {
  std::lock_guard lock(mutex_);
  auto it = failures_.find(username);
  if (it == failures_.end()) return false;
  prune(it->second, clock_());
  return it->second.size() >= max_failures_;
}

void LoginLimiter::record_failure(const std::string& username) {
  auto now = clock_();
  std::lock_guard lock(mutex_);
  auto& q = failures_[username];
  prune(q, now);
  q.push_back(now);
}

}  // namespace galv::api

#pragma once

#include <string>
#include <string_view>

namespace galv::api {

/// RFC 1952 gzip member of `data`.
std::string gzip_compress(std::string_view data, int level = 6);

/// Inflates one or more gzip members; throws std::runtime_error on corrupt input.
std::string gzip_decompress(std::string_view data);

/// True when an Accept-Encoding header value admits gzip (not "gzip;q=0").
bool accepts_gzip(std::string_view accept_encoding);

}  // namespace galv::api

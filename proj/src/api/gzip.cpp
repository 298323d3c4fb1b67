#include "galv/api/gzip.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace galv::api {
namespace {

// windowBits 15 + 16 selects the gzip wrapper; +32 auto-detects on inflate.
constexpr int kGzipWindow = 15 + 16;
constexpr int kAutoWindow = 15 + 32;

struct Deflater {
  z_stream s{};
  explicit Deflater(int level) {
    if (deflateInit2(&s, level, Z_DEFLATED, kGzipWindow, 8, Z_DEFAULT_STRATEGY) != Z_OK)
      throw std::runtime_error("deflateInit2 failed");
  }
  ~Deflater() { deflateEnd(&s); }
};

struct Inflater {
  z_stream s{};
  Inflater() {
    if (inflateInit2(&s, kAutoWindow) != Z_OK) throw std::runtime_error("inflateInit2 failed");
  }
  ~Inflater() { inflateEnd(&s); }
};

std::string trim_lower(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string gzip_compress(std::string_view data, int level) {
  Deflater d(level);
  std::string out;
  out.resize(deflateBound(&d.s, static_cast<uLong>(data.size())) + 32);
  d.s.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  d.s.avail_in = static_cast<uInt>(data.size());
  d.s.next_out = reinterpret_cast<Bytef*>(out.data());
  d.s.avail_out = static_cast<uInt>(out.size());
  if (deflate(&d.s, Z_FINISH) != Z_STREAM_END) throw std::runtime_error("deflate failed");
  out.resize(d.s.total_out);
  return out;
}

std::string gzip_decompress(std::string_view data) {
  std::string out;
  char buf[16384];
  auto* in = reinterpret_cast<const Bytef*>(data.data());
  std::size_t left = data.size();
  while (left > 0) {
    Inflater inf;
    inf.s.next_in = const_cast<Bytef*>(in);
    inf.s.avail_in = static_cast<uInt>(left);
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
      inf.s.next_out = reinterpret_cast<Bytef*>(buf);
      inf.s.avail_out = sizeof buf;
      rc = inflate(&inf.s, Z_NO_FLUSH);
      if (rc != Z_OK && rc != Z_STREAM_END) throw std::runtime_error("corrupt gzip stream");
      out.append(buf, sizeof buf - inf.s.avail_out);
      if (rc == Z_OK && inf.s.avail_in == 0 && inf.s.avail_out != 0)
        throw std::runtime_error("truncated gzip stream");
    }
    in += inf.s.total_in;
    left -= inf.s.total_in;
  }
  return out;
}

bool accepts_gzip(std::string_view header) {
  while (!header.empty()) {
    auto comma = header.find(',');
    auto item = header.substr(0, comma);
    header = comma == std::string_view::npos ? std::string_view{} : header.substr(comma + 1);

    auto semi = item.find(';');
    auto coding = trim_lower(item.substr(0, semi));
    if (coding != "gzip" && coding != "x-gzip" && coding != "*") continue;
    if (semi == std::string_view::npos) return true;
    auto param = trim_lower(item.substr(semi + 1));
    if (param.rfind("q=", 0) != 0) return true;
    try {
      if (std::stod(param.substr(2)) > 0.0) return true;
    } catch (const std::exception&) {
    }
  }
  return false;
}

}  // namespace galv::api

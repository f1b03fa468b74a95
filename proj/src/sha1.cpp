#include "dwlab/sha1.hpp"

#include <cstdint>
#include <cstdio>
#include <vector>

namespace dwlab {

namespace {

inline std::uint32_t rol(std::uint32_t x, int s) {
  return (x << s) | (x >> (32 - s));
}

}  // namespace

std::string sha1_hex(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                        0xC3D2E1F0u};

  // Pad to a multiple of 64 bytes: 0x80, zeros, then the bit length big-endian.
  std::vector<unsigned char> buf(p, p + len);
  const std::uint64_t bits = static_cast<std::uint64_t>(len) * 8;
  buf.push_back(0x80);
  while (buf.size() % 64 != 56) buf.push_back(0);
  for (int i = 7; i >= 0; --i)
    buf.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));

  for (std::size_t off = 0; off < buf.size(); off += 64) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = (static_cast<std::uint32_t>(buf[off + 4 * i]) << 24) |
             (static_cast<std::uint32_t>(buf[off + 4 * i + 1]) << 16) |
             (static_cast<std::uint32_t>(buf[off + 4 * i + 2]) << 8) |
             static_cast<std::uint32_t>(buf[off + 4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  char out[41];
  std::snprintf(out, sizeof out, "%08x%08x%08x%08x%08x", h[0], h[1], h[2],
                h[3], h[4]);
  return std::string(out, 40);
}

std::string sha1_hex(const std::string& bytes) {
  return sha1_hex(bytes.data(), bytes.size());
}

std::string git_blob_sha1(const std::string& content) {
  std::string framed = "blob " + std::to_string(content.size());
  framed.push_back('\0');
  framed += content;
  return sha1_hex(framed);
}

}  // namespace dwlab

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace binlot {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 (FIPS 180-4).  Implemented here so the audit trail has
// no dependency beyond this repository.
class Sha256 {
 public:
  Sha256() { reset(); }

  void reset();
  void update(const void* data, std::size_t len);
  void update(std::span<const std::uint8_t> data) { update(data.data(), data.size()); }
  void update(std::string_view s) { update(s.data(), s.size()); }
  Digest finish();

  static Digest hash(std::span<const std::uint8_t> data);
  static Digest hash(std::string_view s);

 private:
  void compress(const std::uint8_t block[64]);

  std::array<std::uint32_t, 8> state_;
  std::uint64_t total_bytes_ = 0;
  std::array<std::uint8_t, 64> buf_;
  std::size_t buf_len_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string to_hex(const Digest& d);
// Parses an even-length hex string; throws std::invalid_argument on bad input.
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace binlot

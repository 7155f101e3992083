#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "binlot/errors.hpp"
#include "binlot/sha256.hpp"

namespace binlot {

// Names the scheme and the hash primitive fixed by it.
inline constexpr const char* kLotteryVersion = "binlot-lottery-v1-sha256";

// Bit sequence; when packed into bytes, the first bit is the most
// significant bit of the first byte.
class BitString {
 public:
  BitString() = default;

  static BitString from_bytes(std::span<const std::uint8_t> bytes);
  // Parses a string of '0'/'1' characters.
  static BitString from_string(std::string_view bits);

  void push_back(int bit) { bits_.push_back(bit ? 1 : 0); }
  int bit(std::size_t i) const { return bits_.at(i); }
  void set_bit(std::size_t i, int v) { bits_.at(i) = v ? 1 : 0; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  BitString prefix(std::size_t nbits) const;
  std::string to_string() const;
  // Packs MSB-first, zero-padded in the final byte.
  std::vector<std::uint8_t> to_bytes() const;

  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;  // one byte per bit, values 0/1
};

struct LotteryConfig {
  std::uint64_t participants = 0;        // k
  std::uint64_t winners = 0;             // l
  std::vector<std::string> shares;       // l labels, positional, no arithmetic
  std::string conditioner = "passthrough";
  std::string version = kLotteryVersion;

  bool operator==(const LotteryConfig&) const = default;
};

struct AuditRecord {
  LotteryConfig config;
  Digest f1_digest{};
  Digest f2_digest{};
  Digest tau{};
  std::uint64_t alpha_bits = 0;
  std::uint64_t beta_prime_bits = 0;
  std::vector<std::uint64_t> winners;  // draw order, 1-based indices

  // Canonical text record; verify compares these byte-for-byte.
  std::string to_text() const;
  static AuditRecord from_text(std::string_view text);

  bool operator==(const AuditRecord&) const = default;
};

// Commitment and seed digests are domain-separated by distinct prefixes, so
// publishing one never reveals the other.
Digest hash_commit(std::span<const std::uint8_t> data);
Digest derive_seed(std::span<const std::uint8_t> f1);

// kappa = "passthrough" (identity on bits) or "von-neumann"
// (01 -> 0, 10 -> 1, 00/11 -> discard, over consecutive bit pairs).
BitString condition(std::span<const std::uint8_t> f2, std::string_view kappa);

// Length-preserving bijection on bit strings of the input's length, keyed by
// tau: a 10-round unbalanced Feistel network whose round function truncates
// counter-expanded SHA-256 of ("feistel" | tau | round | counter | half).
// Lengths 0 and 1 map to themselves.
BitString keyed_permutation(const Digest& tau, const BitString& x, bool inverse = false);

// Bit source consumed by the interval-algorithm draw.
class BitReader {
 public:
  virtual ~BitReader() = default;
  virtual std::optional<int> next() = 0;
};

class BitStringReader final : public BitReader {
 public:
  explicit BitStringReader(const BitString& bits) : bits_(&bits) {}
  std::optional<int> next() override {
    if (pos_ == bits_->size()) return std::nullopt;
    return bits_->bit(pos_++);
  }
  std::size_t consumed() const { return pos_; }

 private:
  const BitString* bits_;
  std::size_t pos_ = 0;
};

// Unbounded keystream: block i is SHA-256(prefix | u32-be i), bits MSB-first.
class HashStreamReader final : public BitReader {
 public:
  explicit HashStreamReader(std::vector<std::uint8_t> prefix) : prefix_(std::move(prefix)) {}
  std::optional<int> next() override;

 private:
  std::vector<std::uint8_t> prefix_;
  std::uint32_t counter_ = 0;
  Digest block_{};
  std::size_t bit_pos_ = 256;  // exhausted, fetch on first use
};

struct DrawResult {
  std::uint64_t value = 0;
  std::uint64_t consumed = 0;
};

// Exactly uniform value in [0, j) from a uniform bit stream, by binary
// interval subdivision in integer arithmetic; a power-of-two j consumes
// exactly log2 j bits and j = 1 consumes none.  Throws
// InsufficientRandomness when the stream ends first.
DrawResult uniform_int_from_bits(BitReader& stream, std::uint64_t j);

struct WinnersResult {
  std::vector<std::uint64_t> winners;  // l distinct 1-based indices
  std::uint64_t beta_prime_bits = 0;
};

// Two-phase draw.  Phase A runs the interval-driven Fisher-Yates over beta
// only to find how many bits it consumes; that prefix is beta'.  Phase B
// runs the draw over beta' extended by a hash expansion keyed by all of
// beta'; it consumes exactly beta', so the permutation law is the interval
// algorithm's, exactly uniform for uniform beta.  psi = first l entries.
WinnersResult shuffle_winners(const BitString& beta, std::uint64_t k, std::uint64_t l);

// f1 is line-oriented, one participant per line ('\n' separators, final
// newline optional); the index of a participant is its 1-based line number.
std::uint64_t count_participants(std::span<const std::uint8_t> f1);

// Bits a k-participant draw needs from the conditioned source,
// (k + 1/2) log2 k - k log2 e, clamped to >= 0.
double required_randomness_bits(std::uint64_t k);

AuditRecord run_lottery(const LotteryConfig& cfg, std::span<const std::uint8_t> f1,
                        std::span<const std::uint8_t> f2);

// Recomputes the pipeline from (audit.config, f1, f2) and compares the audit
// text byte-for-byte; any failure to recompute is a false return.
bool verify_lottery(const AuditRecord& audit, std::span<const std::uint8_t> f1,
                    std::span<const std::uint8_t> f2);

}  // namespace binlot

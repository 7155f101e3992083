#include "binlot/lottery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "binlot/shuffle.hpp"

namespace binlot {

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
  BitString out;
  out.bits_.reserve(bytes.size() * 8);
  for (std::uint8_t b : bytes)
    for (int i = 7; i >= 0; --i) out.bits_.push_back((b >> i) & 1);
  return out;
}

BitString BitString::from_string(std::string_view bits) {
  BitString out;
  out.bits_.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string must be 0/1");
    out.bits_.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

BitString BitString::prefix(std::size_t nbits) const {
  if (nbits > bits_.size()) throw std::out_of_range("prefix longer than bit string");
  BitString out;
  out.bits_.assign(bits_.begin(), bits_.begin() + nbits);
  return out;
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (std::uint8_t b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out[i / 8] |= std::uint8_t(0x80u >> (i % 8));
  return out;
}

Digest hash_commit(std::span<const std::uint8_t> data) {
  Sha256 h;
  h.update(std::string_view("commit"));
  h.update(data);
  return h.finish();
}

Digest derive_seed(std::span<const std::uint8_t> f1) {
  Sha256 h;
  h.update(std::string_view("seed"));
  h.update(f1);
  return h.finish();
}

BitString condition(std::span<const std::uint8_t> f2, std::string_view kappa) {
  const BitString raw = BitString::from_bytes(f2);
  if (kappa == "passthrough") return raw;
  if (kappa == "von-neumann") {
    BitString out;
    for (std::size_t i = 0; i + 1 < raw.size(); i += 2) {
      const int a = raw.bit(i), b = raw.bit(i + 1);
      if (a != b) out.push_back(a);  // 01 -> 0, 10 -> 1
    }
    return out;
  }
  throw std::invalid_argument("unknown conditioner '" + std::string(kappa) + "'");
}

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(std::uint8_t(v >> (8 * i)));
}

// Keystream of `nbits` round-function bits for one Feistel round.
std::vector<std::uint8_t> round_bits(const Digest& tau, int round, const BitString& half,
                                     std::size_t nbits) {
  std::vector<std::uint8_t> out;
  out.reserve(nbits);
  const std::vector<std::uint8_t> packed = half.to_bytes();
  for (std::uint32_t ctr = 0; out.size() < nbits; ++ctr) {
    Sha256 h;
    h.update(std::string_view("feistel"));
    h.update(std::span<const std::uint8_t>(tau.data(), tau.size()));
    const std::uint8_t rb = static_cast<std::uint8_t>(round);
    h.update(&rb, 1);
    std::vector<std::uint8_t> ctr_be;
    put_u32_be(ctr_be, ctr);
    h.update(ctr_be);
    h.update(packed);
    const Digest block = h.finish();
    for (std::size_t i = 0; i < 256 && out.size() < nbits; ++i)
      out.push_back((block[i / 8] >> (7 - i % 8)) & 1);
  }
  return out;
}

constexpr int kFeistelRounds = 10;

}  // namespace

BitString keyed_permutation(const Digest& tau, const BitString& x, bool inverse) {
  const std::size_t len = x.size();
  if (len < 2) return x;
  const std::size_t left_len = len - len / 2;  // left takes the extra bit

  BitString left, right;
  for (std::size_t i = 0; i < left_len; ++i) left.push_back(x.bit(i));
  for (std::size_t i = left_len; i < len; ++i) right.push_back(x.bit(i));

  auto do_round = [&](int round) {
    // Even rounds rewrite the left half from the right half, odd rounds the
    // reverse; each round is an involution, so the inverse just replays the
    // schedule backwards.
    if (round % 2 == 0) {
      const auto ks = round_bits(tau, round, right, left_len);
      for (std::size_t i = 0; i < left_len; ++i) left.set_bit(i, left.bit(i) ^ ks[i]);
    } else {
      const auto ks = round_bits(tau, round, left, len - left_len);
      for (std::size_t i = 0; i < len - left_len; ++i) right.set_bit(i, right.bit(i) ^ ks[i]);
    }
  };

  if (!inverse)
    for (int r = 0; r < kFeistelRounds; ++r) do_round(r);
  else
    for (int r = kFeistelRounds - 1; r >= 0; --r) do_round(r);

  BitString out;
  for (std::size_t i = 0; i < left_len; ++i) out.push_back(left.bit(i));
  for (std::size_t i = 0; i < len - left_len; ++i) out.push_back(right.bit(i));
  return out;
}

std::optional<int> HashStreamReader::next() {
  if (bit_pos_ == 256) {
    Sha256 h;
    h.update(prefix_);
    std::vector<std::uint8_t> ctr_be;
    put_u32_be(ctr_be, counter_++);
    h.update(ctr_be);
    block_ = h.finish();
    bit_pos_ = 0;
  }
  const int bit = (block_[bit_pos_ / 8] >> (7 - bit_pos_ % 8)) & 1;
  ++bit_pos_;
  return bit;
}

DrawResult uniform_int_from_bits(BitReader& stream, std::uint64_t j) {
  if (j == 0) throw std::invalid_argument("draw needs j >= 1");
  if (j == 1) return {0, 0};
  if (j > (std::uint64_t{1} << 62)) throw std::invalid_argument("draw range too large");

  // Binary interval subdivision in integer form: v tracks the current
  // interval size, c the position inside it; once v >= j, the first j
  // positions resolve and the remainder recycles as the new interval.
  DrawResult out;
  std::uint64_t v = 1, c = 0;
  for (;;) {
    const std::optional<int> b = stream.next();
    if (!b) throw InsufficientRandomness("bit stream exhausted during draw");
    ++out.consumed;
    v <<= 1;
    c = (c << 1) | std::uint64_t(*b);
    if (v >= j) {
      if (c < j) {
        out.value = c;
        return out;
      }
      v -= j;
      c -= j;
    }
  }
}

namespace {

// Serves the head bit string first, then falls through to the tail stream.
class ChainReader final : public BitReader {
 public:
  ChainReader(const BitString& head, BitReader& tail) : head_(head), tail_(tail) {}
  std::optional<int> next() override {
    if (pos_ < head_.size()) return head_.bit(pos_++);
    return tail_.next();
  }

 private:
  const BitString& head_;
  std::size_t pos_ = 0;
  BitReader& tail_;
};

}  // namespace

WinnersResult shuffle_winners(const BitString& beta, std::uint64_t k, std::uint64_t l) {
  if (k == 0) throw std::invalid_argument("need at least one participant");
  if (l == 0 || l > k) throw std::invalid_argument("winner count outside [1, k]");

  // Phase A: count how much of beta the draw needs.
  BitStringReader probe(beta);
  {
    std::vector<std::uint32_t> items = identity_permutation(static_cast<std::size_t>(k));
    fisher_yates(items, [&probe](std::uint64_t j) { return uniform_int_from_bits(probe, j).value; });
  }
  const std::size_t used = probe.consumed();
  const BitString beta_prime = beta.prefix(used);

  // Phase B: the actual draw, over beta' extended by an expansion keyed by
  // all of beta'.  The draw is deterministic, so it consumes exactly the
  // beta' prefix and the law over permutations stays the interval
  // algorithm's: exactly uniform when beta is uniform.  The expansion makes
  // the stream total, with any continuation keyed to the whole prefix.
  Sha256 key_hash;
  key_hash.update(std::string_view("expand"));
  key_hash.update(beta_prime.to_bytes());
  std::vector<std::uint8_t> len_be;
  put_u64_be(len_be, beta_prime.size());
  key_hash.update(len_be);
  const Digest key = key_hash.finish();

  std::vector<std::uint8_t> prefix;
  prefix.insert(prefix.end(), {'e', 'x', 'p', 'a', 'n', 'd'});
  prefix.insert(prefix.end(), key.begin(), key.end());
  HashStreamReader expansion(std::move(prefix));
  ChainReader stream(beta_prime, expansion);

  std::vector<std::uint32_t> perm = identity_permutation(static_cast<std::size_t>(k));
  fisher_yates(perm, [&stream](std::uint64_t j) { return uniform_int_from_bits(stream, j).value; });

  WinnersResult out;
  out.beta_prime_bits = used;
  out.winners.reserve(static_cast<std::size_t>(l));
  for (std::uint64_t i = 0; i < l; ++i) out.winners.push_back(std::uint64_t(perm[i]) + 1);
  return out;
}

std::uint64_t count_participants(std::span<const std::uint8_t> f1) {
  if (f1.empty()) return 0;
  std::uint64_t lines = 0;
  for (std::uint8_t b : f1)
    if (b == '\n') ++lines;
  if (f1.back() != '\n') ++lines;  // final newline optional
  return lines;
}

double required_randomness_bits(std::uint64_t k) {
  if (k < 2) return 0.0;
  const double kd = static_cast<double>(k);
  const double bits = (kd + 0.5) * std::log2(kd) - kd * std::log2(std::exp(1.0));
  return std::max(0.0, bits);
}

namespace {

void check_config(const LotteryConfig& cfg) {
  if (cfg.version != kLotteryVersion)
    throw std::invalid_argument("unsupported scheme version '" + cfg.version + "'");
  if (cfg.participants == 0) throw std::invalid_argument("need at least one participant");
  if (cfg.winners == 0 || cfg.winners > cfg.participants)
    throw std::invalid_argument("winner count outside [1, k]");
  if (cfg.shares.size() != cfg.winners)
    throw std::invalid_argument("share list must have one label per winner");
  for (const std::string& s : cfg.shares) {
    if (s.empty()) throw std::invalid_argument("empty share label");
    if (s.find('\n') != std::string::npos || s.find('\r') != std::string::npos)
      throw std::invalid_argument("share label must be a single line");
  }
  if (cfg.conditioner != "passthrough" && cfg.conditioner != "von-neumann")
    throw std::invalid_argument("unknown conditioner '" + cfg.conditioner + "'");
}

}  // namespace

AuditRecord run_lottery(const LotteryConfig& cfg, std::span<const std::uint8_t> f1,
                        std::span<const std::uint8_t> f2) {
  check_config(cfg);
  if (count_participants(f1) != cfg.participants)
    throw std::invalid_argument("participant file does not list k participants");

  AuditRecord rec;
  rec.config = cfg;
  rec.f1_digest = hash_commit(f1);
  rec.f2_digest = hash_commit(f2);
  rec.tau = derive_seed(f1);

  const BitString alpha = condition(f2, cfg.conditioner);
  rec.alpha_bits = alpha.size();
  const BitString beta = keyed_permutation(rec.tau, alpha);
  const WinnersResult draw = shuffle_winners(beta, cfg.participants, cfg.winners);
  rec.beta_prime_bits = draw.beta_prime_bits;
  rec.winners = draw.winners;
  return rec;
}

bool verify_lottery(const AuditRecord& audit, std::span<const std::uint8_t> f1,
                    std::span<const std::uint8_t> f2) {
  try {
    const AuditRecord redo = run_lottery(audit.config, f1, f2);
    return redo.to_text() == audit.to_text();
  } catch (const std::exception&) {
    return false;
  }
}

std::string AuditRecord::to_text() const {
  std::ostringstream out;
  out << "version: " << config.version << "\n";
  out << "participants: " << config.participants << "\n";
  out << "winners: " << config.winners << "\n";
  out << "conditioner: " << config.conditioner << "\n";
  for (const std::string& s : config.shares) out << "share: " << s << "\n";
  out << "f1-digest: " << to_hex(f1_digest) << "\n";
  out << "f2-digest: " << to_hex(f2_digest) << "\n";
  out << "tau: " << to_hex(tau) << "\n";
  out << "alpha-bits: " << alpha_bits << "\n";
  out << "beta-prime-bits: " << beta_prime_bits << "\n";
  for (std::uint64_t w : winners) out << "winner: " << w << "\n";
  return out.str();
}

namespace {

class LineParser {
 public:
  explicit LineParser(std::string_view text) : rest_(text) {}

  std::string expect(std::string_view key) {
    if (rest_.empty()) throw std::invalid_argument("audit record ended before '" + std::string(key) + "'");
    const std::size_t nl = rest_.find('\n');
    if (nl == std::string_view::npos) throw std::invalid_argument("audit record line missing newline");
    std::string_view line = rest_.substr(0, nl);
    rest_.remove_prefix(nl + 1);
    const std::string prefix = std::string(key) + ": ";
    if (line.substr(0, prefix.size()) != prefix)
      throw std::invalid_argument("expected '" + std::string(key) + "' line");
    return std::string(line.substr(prefix.size()));
  }

  std::uint64_t expect_u64(std::string_view key) {
    const std::string v = expect(key);
    std::size_t used = 0;
    std::uint64_t out = 0;
    try {
      out = std::stoull(v, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer in audit record");
    }
    if (used != v.size()) throw std::invalid_argument("bad integer in audit record");
    return out;
  }

  Digest expect_digest(std::string_view key) {
    const std::vector<std::uint8_t> bytes = from_hex(expect(key));
    if (bytes.size() != 32) throw std::invalid_argument("digest must be 32 bytes");
    Digest d{};
    std::copy(bytes.begin(), bytes.end(), d.begin());
    return d;
  }

  bool done() const { return rest_.empty(); }

 private:
  std::string_view rest_;
};

}  // namespace

AuditRecord AuditRecord::from_text(std::string_view text) {
  LineParser p(text);
  AuditRecord rec;
  rec.config.version = p.expect("version");
  rec.config.participants = p.expect_u64("participants");
  rec.config.winners = p.expect_u64("winners");
  rec.config.conditioner = p.expect("conditioner");
  for (std::uint64_t i = 0; i < rec.config.winners; ++i)
    rec.config.shares.push_back(p.expect("share"));
  rec.f1_digest = p.expect_digest("f1-digest");
  rec.f2_digest = p.expect_digest("f2-digest");
  rec.tau = p.expect_digest("tau");
  rec.alpha_bits = p.expect_u64("alpha-bits");
  rec.beta_prime_bits = p.expect_u64("beta-prime-bits");
  for (std::uint64_t i = 0; i < rec.config.winners; ++i)
    rec.winners.push_back(p.expect_u64("winner"));
  if (!p.done()) throw std::invalid_argument("trailing data after audit record");
  return rec;
}

}  // namespace binlot

#include "binlot/bin_maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "binlot/shuffle.hpp"

namespace binlot {
namespace {

bool is_prime(std::uint32_t q) {
  if (q < 2) return false;
  for (std::uint32_t d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

std::uint64_t pow_checked(std::uint64_t base, std::uint32_t exp, const char* what) {
  std::uint64_t out = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) throw std::overflow_error(what);
    out *= base;
  }
  return out;
}

// |B|^|A| capped at budget+1 to keep the overflow check cheap.
std::uint64_t table_space(std::uint64_t b, std::uint64_t a, std::uint64_t budget) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < a; ++i) {
    if (out > budget / std::max<std::uint64_t>(b, 1)) return budget + 1;
    out *= b;
  }
  return out;
}

}  // namespace

const char* bin_kind_name(BinKind k) {
  switch (k) {
    case BinKind::pure: return "pure";
    case BinKind::equal: return "equal";
    case BinKind::affine: return "affine";
    case BinKind::binary_linear: return "binary-linear";
  }
  return "?";
}

std::optional<BinKind> bin_kind_from_name(std::string_view name) {
  if (name == "pure") return BinKind::pure;
  if (name == "equal") return BinKind::equal;
  if (name == "affine") return BinKind::affine;
  if (name == "binary-linear") return BinKind::binary_linear;
  return std::nullopt;
}

BinMapFamily BinMapFamily::pure(std::uint64_t domain, std::uint64_t codomain) {
  if (domain == 0 || codomain == 0) throw std::invalid_argument("empty alphabet");
  if (codomain > UINT32_MAX) throw std::invalid_argument("codomain too large for table entries");
  return BinMapFamily(BinKind::pure, domain, codomain, std::nullopt);
}

BinMapFamily BinMapFamily::equal(std::uint64_t domain, std::uint64_t codomain) {
  if (domain == 0 || codomain == 0) throw std::invalid_argument("empty alphabet");
  if (domain < codomain) throw std::invalid_argument("equal family needs |A| >= |B|");
  if (codomain > UINT32_MAX) throw std::invalid_argument("codomain too large for table entries");
  return BinMapFamily(BinKind::equal, domain, codomain, std::nullopt);
}

BinMapFamily BinMapFamily::affine(std::uint32_t q, std::uint32_t m, std::uint32_t n) {
  if (!is_prime(q) || q > 257) throw std::invalid_argument("q must be a prime <= 257");
  if (m == 0 || n == 0) throw std::invalid_argument("dimensions must be positive");
  const std::uint64_t a = pow_checked(q, m, "affine domain overflows");
  const std::uint64_t b = pow_checked(q, n, "affine codomain overflows");
  if (b > UINT32_MAX) throw std::invalid_argument("codomain too large for table entries");
  return BinMapFamily(BinKind::affine, a, b, FieldParams{q, m, n});
}

BinMapFamily BinMapFamily::binary_linear(std::uint32_t m, std::uint32_t n) {
  if (m < 2 || n < 2) throw std::invalid_argument("binary-linear family needs m, n >= 2");
  const std::uint64_t a = pow_checked(2, m, "binary-linear domain overflows");
  const std::uint64_t b = pow_checked(2, n, "binary-linear codomain overflows");
  if (b > UINT32_MAX) throw std::invalid_argument("codomain too large for table entries");
  return BinMapFamily(BinKind::binary_linear, a, b, FieldParams{2, m, n});
}

namespace {

// Digits of x base q, least significant first.
void to_digits(std::uint64_t x, std::uint32_t q, std::span<std::uint32_t> out) {
  for (auto& d : out) {
    d = static_cast<std::uint32_t>(x % q);
    x /= q;
  }
}

// Table of v -> v M + c over F_q; matrix row-major m x n, vectors as base-q
// integers with digit 0 least significant.
BinMap affine_table(const FieldParams& f, std::span<const std::uint32_t> mat,
                    std::span<const std::uint32_t> offset) {
  const std::uint64_t a = pow_checked(f.q, f.m, "affine domain overflows");
  BinMap out;
  out.table.resize(a);
  std::vector<std::uint32_t> v(f.m), y(f.n);
  for (std::uint64_t x = 0; x < a; ++x) {
    to_digits(x, f.q, v);
    for (std::uint32_t j = 0; j < f.n; ++j) {
      std::uint64_t acc = offset.empty() ? 0 : offset[j];
      for (std::uint32_t i = 0; i < f.m; ++i) acc += std::uint64_t(v[i]) * mat[i * f.n + j];
      y[j] = static_cast<std::uint32_t>(acc % f.q);
    }
    std::uint64_t packed = 0;
    for (std::uint32_t j = f.n; j-- > 0;) packed = packed * f.q + y[j];
    out.table[x] = static_cast<std::uint32_t>(packed);
  }
  return out;
}

BinMap equal_table(std::uint64_t a, std::uint64_t b,
                   std::span<const std::uint32_t> dom_perm,
                   std::span<const std::uint32_t> cod_perm) {
  BinMap out;
  out.table.resize(a);
  for (std::uint64_t x = 0; x < a; ++x)
    out.table[x] = cod_perm[dom_perm[x] % b];
  return out;
}

}  // namespace

BinMap sample_bin_map(const BinMapFamily& fam, SplitRng& rng) {
  switch (fam.kind()) {
    case BinKind::pure: {
      BinMap out;
      out.table.resize(fam.domain_size());
      for (auto& z : out.table)
        z = static_cast<std::uint32_t>(rng.next_below(fam.codomain_size()));
      return out;
    }
    case BinKind::equal: {
      auto dom = identity_permutation(fam.domain_size());
      fisher_yates(dom, [&rng](std::uint64_t j) { return rng.next_below(j); });
      auto cod = identity_permutation(fam.codomain_size());
      fisher_yates(cod, [&rng](std::uint64_t j) { return rng.next_below(j); });
      return equal_table(fam.domain_size(), fam.codomain_size(), dom, cod);
    }
    case BinKind::affine: {
      const FieldParams f = *fam.field();
      std::vector<std::uint32_t> mat(std::size_t(f.m) * f.n), offset(f.n);
      for (auto& e : mat) e = static_cast<std::uint32_t>(rng.next_below(f.q));
      for (auto& e : offset) e = static_cast<std::uint32_t>(rng.next_below(f.q));
      return affine_table(f, mat, offset);
    }
    case BinKind::binary_linear: {
      const FieldParams f = *fam.field();
      std::vector<std::uint32_t> mat(std::size_t(f.m) * f.n);
      for (auto& e : mat) e = static_cast<std::uint32_t>(rng.next_below(2));
      return affine_table(f, mat, {});
    }
  }
  throw std::logic_error("unknown family kind");
}

double equal_bin_collision_prob(std::uint64_t a, std::uint64_t b) {
  if (a < 2) throw std::invalid_argument("collision needs |A| >= 2");
  if (b == 0 || a < b) throw std::invalid_argument("equal family needs |A| >= |B| >= 1");
  const std::uint64_t r = a % b;
  const double num = double(a - r) * double(a - b + r);
  return num / (double(a) * double(a - 1) * double(b) * double(b));
}

namespace {

void enumerate_equal(std::uint64_t a64, std::uint64_t b64,
                     const std::function<void(const BinMap&)>& visit) {
  const std::size_t a = static_cast<std::size_t>(a64);
  const std::size_t b = static_cast<std::size_t>(b64);
  const std::size_t q = a / b;
  const std::size_t r = a % b;

  BinMap map;
  map.table.assign(a, 0);
  std::vector<std::size_t> count(b, 0);
  std::size_t larges = 0;  // bins already at q+1

  // Assign domain points in order; a bin may grow to q+1 only while large
  // slots remain.  Leaves are checked for the exact size profile.
  auto rec = [&](auto&& self, std::size_t x) -> void {
    if (x == a) {
      for (std::size_t z = 0; z < b; ++z)
        if (count[z] != q && count[z] != q + 1) return;
      visit(map);
      return;
    }
    for (std::size_t z = 0; z < b; ++z) {
      if (count[z] == q + 1) continue;
      if (count[z] == q && larges >= r) continue;
      ++count[z];
      const bool grew_large = count[z] == q + 1;
      if (grew_large) ++larges;
      map.table[x] = static_cast<std::uint32_t>(z);
      self(self, x + 1);
      if (grew_large) --larges;
      --count[z];
    }
  };
  rec(rec, 0);
}

void enumerate_tables(std::uint64_t a, std::uint64_t b,
                      const std::function<void(const BinMap&)>& visit) {
  BinMap map;
  map.table.assign(a, 0);
  for (;;) {
    visit(map);
    std::size_t i = 0;
    while (i < a && ++map.table[i] == b) map.table[i++] = 0;
    if (i == a) break;
  }
}

}  // namespace

void for_each_family_map(const BinMapFamily& fam,
                         const std::function<void(const BinMap&)>& visit,
                         std::uint64_t budget) {
  switch (fam.kind()) {
    case BinKind::pure:
    case BinKind::equal: {
      const std::uint64_t space =
          table_space(fam.codomain_size(), fam.domain_size(), budget);
      if (space > budget)
        throw BudgetExceeded("table space " + std::to_string(fam.codomain_size()) + "^" +
                             std::to_string(fam.domain_size()) + " exceeds budget");
      if (fam.kind() == BinKind::pure)
        enumerate_tables(fam.domain_size(), fam.codomain_size(), visit);
      else
        enumerate_equal(fam.domain_size(), fam.codomain_size(), visit);
      return;
    }
    case BinKind::affine:
    case BinKind::binary_linear: {
      const FieldParams f = *fam.field();
      const bool with_offset = fam.kind() == BinKind::affine;
      const std::uint64_t entries = std::uint64_t(f.m) * f.n + (with_offset ? f.n : 0);
      std::uint64_t space = 1;
      for (std::uint64_t i = 0; i < entries; ++i) {
        if (space > budget / f.q) throw BudgetExceeded("matrix space exceeds budget");
        space *= f.q;
      }
      std::vector<std::uint32_t> digits(entries, 0);
      for (;;) {
        const std::span<const std::uint32_t> mat(digits.data(), std::size_t(f.m) * f.n);
        const std::span<const std::uint32_t> off =
            with_offset ? std::span<const std::uint32_t>(digits.data() + f.m * f.n, f.n)
                        : std::span<const std::uint32_t>();
        const BinMap map = affine_table(f, mat, off);
        visit(map);
        std::size_t i = 0;
        while (i < entries && ++digits[i] == f.q) digits[i++] = 0;
        if (i == entries) break;
      }
      return;
    }
  }
}

VerifyReport verify_random_bin(const BinMapFamily& fam, double gamma,
                               bool restrict_nonzero, std::uint64_t budget) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const std::uint64_t a = fam.domain_size();
  const std::uint64_t b = fam.codomain_size();
  if (restrict_nonzero && a < 3)
    throw std::invalid_argument("restriction to nonzero points needs |A| >= 3");
  if (!restrict_nonzero && a < 2)
    throw std::invalid_argument("pair condition needs |A| >= 2");

  constexpr double kTol = 1e-12;
  VerifyReport rep;
  rep.gamma = gamma;
  rep.pair_bound = gamma / (double(b) * double(b));
  const double qz = 1.0 / double(b);
  const std::uint64_t x_lo = restrict_nonzero ? 1 : 0;

  if (fam.kind() == BinKind::pure &&
      table_space(b, a, budget) > budget) {
    // Entries are independent uniforms: the law is available in closed form.
    rep.analytic = true;
    rep.single_dev = 0.0;
    rep.pair_excess = qz * qz - gamma * qz * qz;
    rep.witness_x = x_lo;
    rep.witness_y = x_lo + 1;
    rep.witness_z = 0;
    rep.witness_pair_prob = qz * qz;
    rep.pass = rep.single_dev <= kTol && rep.pair_excess <= kTol;
    return rep;
  }

  if (a >= (std::uint64_t{1} << 13) || a * a * b > (std::uint64_t{1} << 26))
    throw BudgetExceeded("pair table too large for exact verification");

  std::vector<std::uint64_t> cnt1(a * b, 0);
  std::vector<std::uint64_t> cnt2(a * a * b, 0);
  std::uint64_t maps = 0;
  for_each_family_map(
      fam,
      [&](const BinMap& f) {
        ++maps;
        for (std::uint64_t x = x_lo; x < a; ++x) ++cnt1[x * b + f.table[x]];
        for (std::uint64_t x = x_lo; x < a; ++x)
          for (std::uint64_t y = x + 1; y < a; ++y)
            if (f.table[x] == f.table[y]) ++cnt2[(x * a + y) * b + f.table[x]];
      },
      budget);

  rep.ensemble_size = maps;
  const double inv = 1.0 / double(maps);
  for (std::uint64_t x = x_lo; x < a; ++x)
    for (std::uint64_t z = 0; z < b; ++z)
      rep.single_dev = std::max(rep.single_dev, std::abs(double(cnt1[x * b + z]) * inv - qz));

  bool first = true;
  for (std::uint64_t x = x_lo; x < a; ++x)
    for (std::uint64_t y = x + 1; y < a; ++y)
      for (std::uint64_t z = 0; z < b; ++z) {
        const double p = double(cnt2[(x * a + y) * b + z]) * inv;
        const double excess = p - rep.pair_bound;
        if (first || excess > rep.pair_excess) {
          first = false;
          rep.pair_excess = excess;
          rep.witness_x = x;
          rep.witness_y = y;
          rep.witness_z = z;
          rep.witness_pair_prob = p;
        }
      }
  rep.pass = rep.single_dev <= kTol && rep.pair_excess <= kTol;
  return rep;
}

std::vector<std::uint8_t> serialize_bin_map(const BinMap& f) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * f.table.size());
  auto put_u32 = [&out](std::uint32_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 24));
  };
  if (f.table.size() > UINT32_MAX) throw std::invalid_argument("table too large to serialize");
  put_u32(static_cast<std::uint32_t>(f.table.size()));
  for (std::uint32_t v : f.table) put_u32(v);
  return out;
}

BinMap deserialize_bin_map(std::span<const std::uint8_t> bytes) {
  auto get_u32 = [&bytes](std::size_t at) {
    return std::uint32_t(bytes[at]) | (std::uint32_t(bytes[at + 1]) << 8) |
           (std::uint32_t(bytes[at + 2]) << 16) | (std::uint32_t(bytes[at + 3]) << 24);
  };
  if (bytes.size() < 4) throw std::invalid_argument("truncated bin map");
  const std::uint32_t count = get_u32(0);
  if (bytes.size() != 4 + std::size_t(count) * 4)
    throw std::invalid_argument("bin map length mismatch");
  BinMap out;
  out.table.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) out.table[i] = get_u32(4 + std::size_t(i) * 4);
  return out;
}

}  // namespace binlot

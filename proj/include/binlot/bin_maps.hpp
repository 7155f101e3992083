#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "binlot/dist.hpp"
#include "binlot/rng.hpp"

namespace binlot {

enum class BinKind { pure, equal, affine, binary_linear };

const char* bin_kind_name(BinKind k);
std::optional<BinKind> bin_kind_from_name(std::string_view name);

struct FieldParams {
  std::uint32_t q;  // prime characteristic, q <= 257
  std::uint32_t m;  // input dimension, |A| = q^m
  std::uint32_t n;  // output dimension, |B| = q^n
};

// A distribution over maps A -> B, described by its sampling law.
//   pure:          every table entry independent uniform on B.
//   equal:         uniform over surjections whose bin sizes differ by at
//                  most one; realized as a uniform codomain relabeling of a
//                  fixed equal-bin map of a uniformly permuted domain.
//   affine:        v -> v M + c with M uniform over all m x n matrices over
//                  F_q and c uniform over F_q^n.
//   binary_linear: v -> v M over F_2, no offset; m, n >= 2.
class BinMapFamily {
 public:
  static BinMapFamily pure(std::uint64_t domain, std::uint64_t codomain);
  static BinMapFamily equal(std::uint64_t domain, std::uint64_t codomain);
  static BinMapFamily affine(std::uint32_t q, std::uint32_t m, std::uint32_t n);
  static BinMapFamily binary_linear(std::uint32_t m, std::uint32_t n);

  BinKind kind() const { return kind_; }
  std::uint64_t domain_size() const { return domain_; }
  std::uint64_t codomain_size() const { return codomain_; }
  const std::optional<FieldParams>& field() const { return field_; }

 private:
  BinMapFamily(BinKind k, std::uint64_t a, std::uint64_t b, std::optional<FieldParams> f)
      : kind_(k), domain_(a), codomain_(b), field_(f) {}

  BinKind kind_;
  std::uint64_t domain_;
  std::uint64_t codomain_;
  std::optional<FieldParams> field_;
};

// One realized map: table[x] is the bin of domain point x.
struct BinMap {
  std::vector<std::uint32_t> table;

  bool operator==(const BinMap&) const = default;
};

inline std::uint32_t apply(const BinMap& f, std::uint64_t x) { return f.table.at(x); }

// Draw consumption per family is fixed and documented so runs reproduce:
//   pure:          |A| draws below |B|, in domain order.
//   equal:         domain shuffle then codomain shuffle (Fisher-Yates each).
//   affine:        M row-major (m*n draws below q), then c (n draws).
//   binary_linear: M row-major (m*n draws below 2).
BinMap sample_bin_map(const BinMapFamily& fam, SplitRng& rng);

// P{F(x) = z, F(y) = z} for fixed x != y and fixed z under the equal
// family, closed form; by symmetry it does not depend on (x, y, z).
double equal_bin_collision_prob(std::uint64_t a, std::uint64_t b);

// Visits every map of the family once (pure included).  Throws
// BudgetExceeded when the raw table space |B|^|A| (or matrix space)
// exceeds the budget.
void for_each_family_map(const BinMapFamily& fam,
                         const std::function<void(const BinMap&)>& visit,
                         std::uint64_t budget = kDefaultBudget);

struct VerifyReport {
  bool pass = false;
  bool analytic = false;          // true when no enumeration was needed
  std::uint64_t ensemble_size = 0;
  double gamma = 1.0;
  double single_dev = 0.0;        // max over (x,z) of |P{F(x)=z} - 1/|B||
  double pair_excess = 0.0;       // max over (x!=y,z) of P{F(x)=F(y)=z} - gamma/|B|^2
  std::uint64_t witness_x = 0, witness_y = 0, witness_z = 0;
  double witness_pair_prob = 0.0;
  double pair_bound = 0.0;        // gamma / |B|^2
};

// Checks the defining inequalities of a (uniform, gamma)-random-bin map
// against the exact ensemble law.  With restrict_nonzero the conditions are
// only required on domain points != 0.
VerifyReport verify_random_bin(const BinMapFamily& fam, double gamma,
                               bool restrict_nonzero = false,
                               std::uint64_t budget = kDefaultBudget);

// Byte format: u32 little-endian entry count, then one u32 little-endian
// bin index per domain point.
std::vector<std::uint8_t> serialize_bin_map(const BinMap& f);
BinMap deserialize_bin_map(std::span<const std::uint8_t> bytes);

}  // namespace binlot

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "binlot/errors.hpp"

namespace binlot {

// Mass vectors must sum to one within this slack; entries must be >= 0 exactly.
inline constexpr double kMassTolerance = 1e-9;

// Cap on exact enumerations (block support points, ensemble tables).
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

// Probability mass function on the alphabet {0, ..., size-1}.
class Dist {
 public:
  explicit Dist(std::vector<double> mass);

  std::size_t alphabet_size() const { return mass_.size(); }
  double mass(std::size_t symbol) const { return mass_.at(symbol); }
  std::span<const double> masses() const { return mass_; }

  static Dist uniform(std::size_t n);
  static Dist bernoulli(double p_one);  // {1-p, p} on {0, 1}

  bool operator==(const Dist&) const = default;

 private:
  std::vector<double> mass_;
};

// Half L1 distance between laws on the same alphabet.
double stat_distance(const Dist& p, const Dist& q);
double stat_distance(std::span<const double> p, std::span<const double> q);

// lambda * p + (1 - lambda) * q, lambda in [0, 1].
Dist mixture(const Dist& p, const Dist& q, double lambda);

// Shannon entropy in nats; 0 * ln 0 = 0.
double entropy_nats(const Dist& p);

// eps-inf-entropy: sup{ r : P{ -ln P(X) < r } <= eps }, eps in [0, 1).
// eps = 0 recovers min-entropy.
double eps_inf_entropy(const Dist& p, double eps);

// Joint law of a side-information source X_0 (coordinate 0) and m extracted
// sources X_1..X_m on finite alphabets.  Flat storage is C-order: the last
// coordinate varies fastest.
class JointDist {
 public:
  JointDist(std::vector<std::size_t> sizes, std::vector<double> mass);

  std::size_t num_sources() const { return sizes_.size() - 1; }  // m
  std::size_t num_coords() const { return sizes_.size(); }       // m + 1
  std::size_t alphabet_size(std::size_t coord) const { return sizes_.at(coord); }
  std::span<const std::size_t> sizes() const { return sizes_; }

  std::size_t flat_size() const { return mass_.size(); }
  double mass_at(std::size_t flat) const { return mass_.at(flat); }
  double mass(std::span<const std::size_t> symbols) const { return mass_[encode(symbols)]; }
  std::span<const double> masses() const { return mass_; }

  std::size_t encode(std::span<const std::size_t> symbols) const;
  void decode(std::size_t flat, std::span<std::size_t> symbols) const;

  // Flat indices with positive mass, ascending.
  const std::vector<std::size_t>& support() const { return support_; }

  // Marginal over the coordinates in coord_mask (bit i = coordinate i),
  // kept in ascending coordinate order.  The result is again a JointDist
  // whose coordinate 0 is the smallest kept coordinate.
  JointDist marginal(std::uint32_t coord_mask) const;
  Dist marginal_dist(std::size_t coord) const;

  // Independent product: X_0 times X_1 times ... times X_m.
  static JointDist product(const std::vector<Dist>& coords);
  // Single source with a trivial (constant) X_0.
  static JointDist from_source(const Dist& x);

  bool operator==(const JointDist&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<double> mass_;
  std::vector<std::size_t> support_;
};

// Entropy in nats of the marginal over coord_mask.
double subset_entropy_nats(const JointDist& j, std::uint32_t coord_mask);

// Inverse-conditional spectrum of one block realization.
// subset_stat[mask-1] = 1 / P{X_S = x_S | X_0 = x_0} for the nonempty subset
// S of sources encoded by mask (bit i-1 = source i); infinity off support.
// marginal_stat[i-1] = 1 / P{X_i = x_i}.
struct SpectrumStats {
  std::vector<double> subset_stat;
  std::vector<double> marginal_stat;

  double subset(std::uint32_t mask) const { return subset_stat.at(mask - 1); }
  double marginal(std::size_t source) const { return marginal_stat.at(source - 1); }
};

// n independent copies of a base joint law.  Block coordinates are integers
// in [0, |X_i|^n); time step 0 is the most significant digit.
class BlockJoint {
 public:
  BlockJoint(JointDist base, std::uint64_t block_length,
             std::uint64_t budget = kDefaultBudget);

  const JointDist& base() const { return base_; }
  std::uint64_t block_length() const { return n_; }
  std::size_t num_sources() const { return base_.num_sources(); }
  // |X_i|^n; throws std::overflow_error if it does not fit in 64 bits.
  std::uint64_t block_alphabet_size(std::size_t coord) const;
  // |support(base)|^n, guaranteed <= budget by the constructor.
  std::uint64_t support_count() const { return support_count_; }

  // Decomposes a block coordinate into base symbols, time step 0 first.
  void decode_coord(std::size_t coord, std::uint64_t value,
                    std::span<std::size_t> symbols) const;

 private:
  JointDist base_;
  std::uint64_t n_;
  std::uint64_t support_count_;
};

inline BlockJoint block_extend(const JointDist& base, std::uint64_t n,
                               std::uint64_t budget = kDefaultBudget) {
  return BlockJoint(base, n, budget);
}

// Spectrum of one block realization x = (x_0, ..., x_m) in block coordinates.
SpectrumStats spectrum_stats(const BlockJoint& b, std::span<const std::uint64_t> x);

// P{ T not in A_r } by exact enumeration of the block support, where
// A_r = prod over nonempty S of (r * |Y_S|, inf) and |Y_S| = prod of
// out_sizes over S.  With s given, the marginal boxes (r*s, inf) join the
// intersection, one per source.
double typicality_prob(const BlockJoint& b, double r,
                       std::span<const std::uint64_t> out_sizes,
                       std::optional<double> s = std::nullopt);

// Materialized block support: coordinates and mass per point, plus a compact
// index over the distinct X_0 block values (reused across ensemble trials).
class BlockSupport {
 public:
  explicit BlockSupport(const BlockJoint& b);

  std::size_t size() const { return mass_.size(); }
  std::size_t num_sources() const { return stride_ - 1; }
  std::span<const std::uint64_t> coords(std::size_t idx) const {
    return {coords_.data() + idx * stride_, stride_};
  }
  double mass(std::size_t idx) const { return mass_[idx]; }

  std::uint32_t x0_id(std::size_t idx) const { return x0_id_[idx]; }
  std::size_t distinct_x0() const { return x0_mass_.size(); }
  double x0_mass(std::size_t id) const { return x0_mass_[id]; }

 private:
  std::size_t stride_;
  std::vector<std::uint64_t> coords_;
  std::vector<double> mass_;
  std::vector<std::uint32_t> x0_id_;
  std::vector<double> x0_mass_;
};

// Flattens a block law into an explicit JointDist over block coordinates.
// Requires prod |X_i|^n <= budget.
JointDist block_as_joint(const BlockJoint& b, std::uint64_t budget = kDefaultBudget);

}  // namespace binlot

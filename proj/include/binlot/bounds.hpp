#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "binlot/bin_maps.hpp"
#include "binlot/dist.hpp"

namespace binlot {

// Per-source collision factors; gamma_i >= 1.
struct GammaTuple {
  explicit GammaTuple(std::vector<double> g);
  static GammaTuple ones(std::size_t m) { return GammaTuple(std::vector<double>(m, 1.0)); }

  std::size_t size() const { return gamma_.size(); }
  double at(std::size_t i) const { return gamma_.at(i); }  // i in [0, m)
  std::span<const double> values() const { return gamma_; }

 private:
  std::vector<double> gamma_;
};

enum class BoundKind {
  direct,
  converse,
  pure_concentration,
  equal_concentration,
  expected_distance,
};

const char* bound_kind_name(BoundKind k);

// 12 significant digits, shortest form.
std::string format_real(double v);

struct BoundReport {
  BoundKind kind;
  double value = 0.0;  // clamped; raw value kept in components
  double r = 0.0;
  std::optional<double> s;
  std::vector<std::pair<std::string, double>> components;

  // Named-field text record, one "name: value" line per field.
  std::string to_text() const;
};

struct MuMoments {
  double mean = 0.0;
  double var_bound = 0.0;
};

// Mean and variance bound of the bin-weight mu(F, a, y) over any
// (Q, gamma)-random-bin tuple with independent targets Y_i.
MuMoments mu_mean_and_variance_bound(const JointDist& j, const std::vector<Dist>& out_dists,
                                     const GammaTuple& gammas, std::size_t a,
                                     std::span<const std::size_t> y);

// Expected-distance bound for uniform targets of the given sizes,
// clamped to [0, 1].
double expected_distance_bound(const JointDist& j, std::span<const std::uint64_t> out_sizes,
                               const GammaTuple& gammas);
BoundReport expected_distance_report(const JointDist& j, std::span<const std::uint64_t> out_sizes,
                                     const GammaTuple& gammas);

// One-shot achievability: exclusion probability plus sqrt(2^m - 1)/2 * r^{-1/2}.
BoundReport direct_bound(const BlockJoint& b, std::span<const std::uint64_t> out_sizes, double r);

// One-shot converse, valid per deterministic map tuple:
// exclusion probability minus (2^m - 1) r, clamped to >= 0.
BoundReport converse_bound(const BlockJoint& b, std::span<const std::uint64_t> out_sizes, double r);

// Concentration threshold for the pure / equal families: exclusion of the
// joint typicality box (with the marginal r*s constraint) plus the
// kind-specific slack; the distance exceeds it with probability <= e^{-s}.
// kind must be BinKind::pure or BinKind::equal.
BoundReport concentration_threshold(BinKind kind, const BlockJoint& b,
                                    std::span<const std::uint64_t> out_sizes, double r, double s);

struct RateRegionResult {
  bool inside = true;
  std::vector<std::uint32_t> violated;  // source masks, bit i-1 = source i
  std::vector<double> slacks;           // slacks[mask-1] = H(X_S|X_0) - sum R_S
};

// Memoryless achievable rate region membership, rates in nats per symbol.
RateRegionResult rate_region_check(const JointDist& j, std::span<const double> rates);

}  // namespace binlot

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "binlot/bin_maps.hpp"
#include "binlot/dist.hpp"

namespace binlot {

// One realized extractor tuple: map i sends block coordinates of source i
// into [0, out_sizes[i]).
struct ExtractorTuple {
  std::vector<BinMap> maps;
  std::vector<std::uint64_t> out_sizes;
};

// Exact statistical distance between the law of (X_0, phi_1(X_1), ...,
// phi_m(X_m)) and P_{X_0} x uniform, by full enumeration of the block
// support.
double exact_distance(const BlockJoint& b, const ExtractorTuple& phi);
double exact_distance(const BlockSupport& sup, const BlockJoint& b, const ExtractorTuple& phi);

// Per-trial distances for tuples sampled from the given families; trial t
// uses substream (master_seed, t), map i substream (master_seed, t, i).
// jobs > 1 splits trials across threads; output is index-ordered and
// identical at any job count.
std::vector<double> ensemble_distances(const std::vector<BinMapFamily>& families,
                                       const BlockJoint& b, std::uint64_t trials,
                                       std::uint64_t master_seed, unsigned jobs = 1);

struct EnsembleSummary {
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
  double mean = 0.0;
  // (level, order statistic); levels fixed to {0, 0.25, 0.5, 0.75, 0.9, 0.99, 1}.
  std::vector<std::pair<double, double>> quantiles;
  // (threshold, fraction of trials with d >= threshold), thresholds ascending.
  std::vector<std::pair<double, double>> tail_fractions;

  std::string to_text() const;
};

EnsembleSummary summarize_distances(std::span<const double> d,
                                    std::span<const double> thresholds,
                                    std::uint64_t master_seed);

EnsembleSummary ensemble_stats(const std::vector<BinMapFamily>& families, const BlockJoint& b,
                               std::uint64_t trials, std::span<const double> thresholds,
                               std::uint64_t master_seed, unsigned jobs = 1);

// Exposure-resilience study: X uniform on n bits, an instance hides
// k = ceil(alpha n) positions and fixes the rest; the hidden completion is
// uniform.  Evaluates d(phi(Z), uniform) exactly per instance.
struct ExposureReport {
  std::uint64_t n = 0;
  double alpha = 0.0;
  std::uint64_t hidden_bits = 0;
  std::uint64_t out_bits = 0;
  std::uint64_t instances = 0;
  bool exhaustive = false;  // all (pattern, exposed-value) instances visited
  double max_distance = 0.0;
  double mean_distance = 0.0;
  double rate_nats = 0.0;          // ln(out_size) / n
  double entropy_rate_nats = 0.0;  // alpha ln 2
  double pattern_rate_nats = 0.0;  // ln(2n) / n

  std::string to_text() const;
};

// Samples one map from the family (kind pure or equal over 2^n -> 2^out_bits),
// then enumerates every instance when C(n, k) 2^{n-k} <= 2^20 and samples
// `trials` instances otherwise.
ExposureReport exposure_experiment(std::uint64_t n, double alpha, std::uint64_t out_bits,
                                   BinKind kind, std::uint64_t trials,
                                   std::uint64_t master_seed);

// Same experiment against a caller-supplied map with table size 2^n.
ExposureReport exposure_with_map(const BinMap& phi, std::uint64_t out_size, std::uint64_t n,
                                 double alpha, std::uint64_t trials, std::uint64_t master_seed);

}  // namespace binlot

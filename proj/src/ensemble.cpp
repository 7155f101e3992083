#include "binlot/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "binlot/bounds.hpp"
#include "binlot/rng.hpp"

namespace binlot {
namespace {

void check_tuple(const BlockJoint& b, const ExtractorTuple& phi) {
  const std::size_t m = b.num_sources();
  if (phi.maps.size() != m || phi.out_sizes.size() != m)
    throw std::invalid_argument("extractor arity mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    if (phi.maps[i].table.size() != b.block_alphabet_size(i + 1))
      throw std::invalid_argument("map domain does not match block source");
    const std::uint64_t ysz = phi.out_sizes[i];
    if (ysz == 0) throw std::invalid_argument("empty output alphabet");
    for (std::uint32_t z : phi.maps[i].table)
      if (z >= ysz) throw std::invalid_argument("map entry outside declared codomain");
  }
}

// Scratch for repeated distance evaluations over one support.
struct DistanceScratch {
  std::vector<double> joint;          // distinct_x0 * |Y| cells
  std::vector<std::size_t> touched;
  std::uint64_t y_total = 0;

  DistanceScratch(const BlockSupport& sup, std::span<const std::uint64_t> out_sizes) {
    y_total = 1;
    for (std::uint64_t ysz : out_sizes) {
      if (y_total > (std::uint64_t{1} << 26) / std::max<std::uint64_t>(ysz, 1))
        throw BudgetExceeded("output alphabet too large for exact distance");
      y_total *= ysz;
    }
    const std::uint64_t cells = sup.distinct_x0() * y_total;
    if (cells > (std::uint64_t{1} << 26))
      throw BudgetExceeded("joint table too large for exact distance");
    joint.assign(static_cast<std::size_t>(cells), 0.0);
    touched.reserve(sup.size());
  }

  double run(const BlockSupport& sup, const ExtractorTuple& phi) {
    const std::size_t m = phi.maps.size();
    for (std::size_t p = 0; p < sup.size(); ++p) {
      const auto c = sup.coords(p);
      std::uint64_t y = 0;
      for (std::size_t i = 0; i < m; ++i)
        y = y * phi.out_sizes[i] + phi.maps[i].table[static_cast<std::size_t>(c[i + 1])];
      const std::size_t cell = static_cast<std::size_t>(sup.x0_id(p) * y_total + y);
      if (joint[cell] == 0.0) touched.push_back(cell);
      joint[cell] += sup.mass(p);
    }

    // Every cell with either block mass or reference mass lies in a row of a
    // charged X_0 value, so summing rows over [0, |Y|) covers the whole
    // difference.
    double total = 0.0;
    const double inv_y = 1.0 / static_cast<double>(y_total);
    for (std::size_t id = 0; id < sup.distinct_x0(); ++id) {
      const double ref = sup.x0_mass(id) * inv_y;
      const std::size_t row = id * static_cast<std::size_t>(y_total);
      for (std::uint64_t y = 0; y < y_total; ++y)
        total += std::abs(joint[row + static_cast<std::size_t>(y)] - ref);
    }
    for (std::size_t cell : touched) joint[cell] = 0.0;
    touched.clear();
    return 0.5 * total;
  }
};

}  // namespace

double exact_distance(const BlockSupport& sup, const BlockJoint& b, const ExtractorTuple& phi) {
  check_tuple(b, phi);
  DistanceScratch scratch(sup, phi.out_sizes);
  return scratch.run(sup, phi);
}

double exact_distance(const BlockJoint& b, const ExtractorTuple& phi) {
  const BlockSupport sup(b);
  return exact_distance(sup, b, phi);
}

std::vector<double> ensemble_distances(const std::vector<BinMapFamily>& families,
                                       const BlockJoint& b, std::uint64_t trials,
                                       std::uint64_t master_seed, unsigned jobs) {
  const std::size_t m = b.num_sources();
  if (families.size() != m) throw std::invalid_argument("family arity mismatch");
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  std::vector<std::uint64_t> out_sizes;
  for (std::size_t i = 0; i < m; ++i) {
    if (families[i].domain_size() != b.block_alphabet_size(i + 1))
      throw std::invalid_argument("family domain does not match block source");
    out_sizes.push_back(families[i].codomain_size());
  }

  const BlockSupport sup(b);
  const SplitRng root(master_seed);
  std::vector<double> d(static_cast<std::size_t>(trials), 0.0);

  auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
    DistanceScratch scratch(sup, out_sizes);
    ExtractorTuple phi;
    phi.out_sizes = out_sizes;
    phi.maps.resize(m);
    for (std::uint64_t t = lo; t < hi; ++t) {
      SplitRng trial_rng = root.split(t);
      for (std::size_t i = 0; i < m; ++i) {
        SplitRng map_rng = trial_rng.split(i);
        phi.maps[i] = sample_bin_map(families[i], map_rng);
      }
      d[static_cast<std::size_t>(t)] = scratch.run(sup, phi);
    }
  };

  const unsigned hw = std::max(1u, jobs);
  const std::uint64_t nthreads = std::min<std::uint64_t>(hw, trials);
  if (nthreads <= 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + nthreads - 1) / nthreads;
    for (std::uint64_t t0 = 0; t0 < trials; t0 += chunk)
      pool.emplace_back(worker, t0, std::min(trials, t0 + chunk));
    for (auto& th : pool) th.join();
  }
  return d;
}

EnsembleSummary summarize_distances(std::span<const double> d,
                                    std::span<const double> thresholds,
                                    std::uint64_t master_seed) {
  if (d.empty()) throw std::invalid_argument("no trials to summarize");
  EnsembleSummary out;
  out.trials = d.size();
  out.master_seed = master_seed;

  std::vector<double> sorted(d.begin(), d.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  out.mean = sum / static_cast<double>(sorted.size());

  // Order statistic at ceil(level * N), clamped to [1, N].
  const double levels[] = {0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0};
  for (double level : levels) {
    std::size_t rank = static_cast<std::size_t>(std::ceil(level * double(sorted.size())));
    rank = std::min(std::max<std::size_t>(rank, 1), sorted.size());
    out.quantiles.emplace_back(level, sorted[rank - 1]);
  }

  std::vector<double> thr(thresholds.begin(), thresholds.end());
  std::sort(thr.begin(), thr.end());
  for (double t : thr) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), t);
    const double frac = double(sorted.end() - first) / double(sorted.size());
    out.tail_fractions.emplace_back(t, frac);
  }
  return out;
}

EnsembleSummary ensemble_stats(const std::vector<BinMapFamily>& families, const BlockJoint& b,
                               std::uint64_t trials, std::span<const double> thresholds,
                               std::uint64_t master_seed, unsigned jobs) {
  const std::vector<double> d = ensemble_distances(families, b, trials, master_seed, jobs);
  return summarize_distances(d, thresholds, master_seed);
}

std::string EnsembleSummary::to_text() const {
  std::ostringstream out;
  out << "trials: " << trials << "\n";
  out << "master-seed: " << master_seed << "\n";
  out << "mean: " << format_real(mean) << "\n";
  for (const auto& [level, v] : quantiles)
    out << "quantile " << format_real(level) << ": " << format_real(v) << "\n";
  for (const auto& [t, frac] : tail_fractions)
    out << "tail " << format_real(t) << ": " << format_real(frac) << "\n";
  return out.str();
}

namespace {

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (out > cap) return cap + 1;
    out = out * (n - k + i) / i;  // exact: product of i consecutive integers divides by i!
  }
  return out;
}

struct InstanceEval {
  const BinMap& phi;
  std::uint64_t out_size;
  std::uint64_t n;
  std::uint64_t k;
  std::vector<double> count;

  InstanceEval(const BinMap& phi_, std::uint64_t out_size_, std::uint64_t n_, std::uint64_t k_)
      : phi(phi_), out_size(out_size_), n(n_), k(k_), count(out_size_, 0.0) {}

  // hidden: ascending bit positions (0 = most significant of the n-bit word);
  // exposed_base: word with hidden positions zeroed.
  double run(std::span<const std::uint64_t> hidden, std::uint64_t exposed_base) {
    std::fill(count.begin(), count.end(), 0.0);
    const std::uint64_t completions = std::uint64_t{1} << k;
    for (std::uint64_t h = 0; h < completions; ++h) {
      std::uint64_t x = exposed_base;
      for (std::uint64_t t = 0; t < k; ++t)
        if ((h >> (k - 1 - t)) & 1) x |= std::uint64_t{1} << (n - 1 - hidden[t]);
      count[phi.table[static_cast<std::size_t>(x)]] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(completions);
    const double ref = 1.0 / static_cast<double>(out_size);
    double total = 0.0;
    for (double c : count) total += std::abs(c * inv - ref);
    return 0.5 * total;
  }
};

ExposureReport exposure_core(const BinMap& phi, std::uint64_t out_size, std::uint64_t n,
                             double alpha, std::uint64_t trials, std::uint64_t master_seed,
                             std::uint64_t out_bits_for_report) {
  if (n == 0 || n > 24) throw std::invalid_argument("n outside supported range [1, 24]");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha outside (0, 1]");
  if (phi.table.size() != (std::uint64_t{1} << n))
    throw std::invalid_argument("map domain must be 2^n");
  for (std::uint32_t z : phi.table)
    if (z >= out_size) throw std::invalid_argument("map entry outside codomain");

  const std::uint64_t k = static_cast<std::uint64_t>(std::ceil(alpha * double(n)));
  if (k > 20) throw BudgetExceeded("too many hidden bits to enumerate completions");

  ExposureReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.hidden_bits = k;
  rep.out_bits = out_bits_for_report;
  rep.rate_nats = std::log(static_cast<double>(out_size)) / static_cast<double>(n);
  rep.entropy_rate_nats = alpha * std::log(2.0);
  rep.pattern_rate_nats = std::log(2.0 * double(n)) / double(n);

  InstanceEval eval(phi, out_size, n, k);
  const std::uint64_t cap = std::uint64_t{1} << 20;
  const std::uint64_t patterns = binomial_capped(n, k, cap);
  const std::uint64_t exposed_count = std::uint64_t{1} << (n - k);
  const bool exhaustive = patterns <= cap && exposed_count <= cap / patterns;

  double max_d = 0.0, sum_d = 0.0;
  std::uint64_t instances = 0;
  auto absorb = [&](double d) {
    max_d = std::max(max_d, d);
    sum_d += d;
    ++instances;
  };

  if (exhaustive) {
    // All k-subsets in lexicographic order, all exposed values per subset.
    std::vector<std::uint64_t> hidden(k);
    for (std::uint64_t i = 0; i < k; ++i) hidden[i] = i;
    for (;;) {
      std::vector<std::uint64_t> exposed_pos;
      for (std::uint64_t p = 0; p < n; ++p)
        if (std::find(hidden.begin(), hidden.end(), p) == hidden.end()) exposed_pos.push_back(p);
      for (std::uint64_t e = 0; e < exposed_count; ++e) {
        std::uint64_t base = 0;
        for (std::uint64_t t = 0; t < exposed_pos.size(); ++t)
          if ((e >> (exposed_pos.size() - 1 - t)) & 1)
            base |= std::uint64_t{1} << (n - 1 - exposed_pos[t]);
        absorb(eval.run(hidden, base));
      }
      // next k-subset in lexicographic order
      std::int64_t j = static_cast<std::int64_t>(k) - 1;
      while (j >= 0 && hidden[static_cast<std::uint64_t>(j)] ==
                           static_cast<std::uint64_t>(j) + n - k)
        --j;
      if (j < 0) break;
      ++hidden[static_cast<std::uint64_t>(j)];
      for (std::uint64_t t = static_cast<std::uint64_t>(j) + 1; t < k; ++t)
        hidden[t] = hidden[t - 1] + 1;
    }
  } else {
    if (trials == 0) throw std::invalid_argument("need at least one sampled instance");
    const SplitRng root(master_seed);
    std::vector<std::uint64_t> positions(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
      SplitRng rng = root.split(t + 1);  // substream 0 is reserved for map sampling
      for (std::uint64_t p = 0; p < n; ++p) positions[p] = p;
      // Partial Fisher-Yates: place a uniform k-subset in the first k slots.
      for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t j = i + rng.next_below(n - i);
        std::swap(positions[i], positions[j]);
      }
      std::vector<std::uint64_t> hidden(positions.begin(), positions.begin() + k);
      std::sort(hidden.begin(), hidden.end());
      std::uint64_t base = 0;
      for (std::uint64_t p = 0; p < n; ++p) {
        if (std::find(hidden.begin(), hidden.end(), p) != hidden.end()) continue;
        if (rng.next_below(2)) base |= std::uint64_t{1} << (n - 1 - p);
      }
      absorb(eval.run(hidden, base));
    }
  }

  rep.instances = instances;
  rep.exhaustive = exhaustive;
  rep.max_distance = max_d;
  rep.mean_distance = instances ? sum_d / double(instances) : 0.0;
  return rep;
}

}  // namespace

ExposureReport exposure_with_map(const BinMap& phi, std::uint64_t out_size, std::uint64_t n,
                                 double alpha, std::uint64_t trials, std::uint64_t master_seed) {
  std::uint64_t out_bits = 0;
  while ((std::uint64_t{1} << out_bits) < out_size) ++out_bits;
  return exposure_core(phi, out_size, n, alpha, trials, master_seed, out_bits);
}

ExposureReport exposure_experiment(std::uint64_t n, double alpha, std::uint64_t out_bits,
                                   BinKind kind, std::uint64_t trials,
                                   std::uint64_t master_seed) {
  if (kind != BinKind::pure && kind != BinKind::equal)
    throw std::invalid_argument("exposure experiment samples the pure or equal family");
  if (out_bits > n) throw std::invalid_argument("out_bits must not exceed n");
  if (n == 0 || n > 24) throw std::invalid_argument("n outside supported range [1, 24]");

  const std::uint64_t domain = std::uint64_t{1} << n;
  const std::uint64_t codomain = std::uint64_t{1} << out_bits;
  const BinMapFamily fam = kind == BinKind::pure ? BinMapFamily::pure(domain, codomain)
                                                 : BinMapFamily::equal(domain, codomain);
  SplitRng map_rng = SplitRng(master_seed).split(0);
  const BinMap phi = sample_bin_map(fam, map_rng);
  return exposure_core(phi, codomain, n, alpha, trials, master_seed, out_bits);
}

std::string ExposureReport::to_text() const {
  std::ostringstream out;
  out << "n: " << n << "\n";
  out << "alpha: " << format_real(alpha) << "\n";
  out << "hidden-bits: " << hidden_bits << "\n";
  out << "out-bits: " << out_bits << "\n";
  out << "instances: " << instances << "\n";
  out << "exhaustive: " << (exhaustive ? "yes" : "no") << "\n";
  out << "max-distance: " << format_real(max_distance) << "\n";
  out << "mean-distance: " << format_real(mean_distance) << "\n";
  out << "rate-nats: " << format_real(rate_nats) << "\n";
  out << "entropy-rate-nats: " << format_real(entropy_rate_nats) << "\n";
  out << "pattern-rate-nats: " << format_real(pattern_rate_nats) << "\n";
  return out.str();
}

}  // namespace binlot

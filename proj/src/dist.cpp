#include "binlot/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace binlot {
namespace {

void check_mass_vector(std::span<const double> mass) {
  if (mass.empty()) throw std::invalid_argument("empty mass vector");
  double total = 0.0;
  for (double p : mass) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative or NaN mass");
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw std::invalid_argument("mass vector sums to " + std::to_string(total));
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("block alphabet size exceeds 64 bits");
    out *= base;
  }
  return out;
}

}  // namespace

Dist::Dist(std::vector<double> mass) : mass_(std::move(mass)) {
  check_mass_vector(mass_);
}

Dist Dist::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty alphabet");
  return Dist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Dist Dist::bernoulli(double p_one) {
  if (!(p_one >= 0.0 && p_one <= 1.0)) throw std::invalid_argument("bernoulli parameter outside [0, 1]");
  return Dist({1.0 - p_one, p_one});
}

double stat_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("alphabet size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

double stat_distance(const Dist& p, const Dist& q) {
  return stat_distance(p.masses(), q.masses());
}

Dist mixture(const Dist& p, const Dist& q, double lambda) {
  if (p.alphabet_size() != q.alphabet_size())
    throw std::invalid_argument("alphabet size mismatch");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mixture weight outside [0, 1]");
  std::vector<double> out(p.alphabet_size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = lambda * p.mass(i) + (1.0 - lambda) * q.mass(i);
  return Dist(std::move(out));
}

double entropy_nats(const Dist& p) {
  double h = 0.0;
  for (double v : p.masses())
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

double eps_inf_entropy(const Dist& p, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps outside [0, 1)");
  // Distinct self-information values ascending with their cumulative mass.
  // P{-ln P(X) < r} is a left-continuous step function jumping at each value;
  // the sup is the first value whose strict-prefix mass still fits under eps.
  std::vector<std::pair<double, double>> levels;  // (-ln p, mass)
  for (double v : p.masses())
    if (v > 0.0) levels.emplace_back(-std::log(v), v);
  std::sort(levels.begin(), levels.end());
  double below = 0.0;
  for (std::size_t i = 0; i < levels.size();) {
    std::size_t j = i;
    double mass_here = 0.0;
    while (j < levels.size() && levels[j].first == levels[i].first) mass_here += levels[j++].second;
    if (below <= eps) {
      const bool last_group = j == levels.size();
      if (last_group || below + mass_here > eps) return levels[i].first;
    }
    below += mass_here;
    i = j;
  }
  throw std::logic_error("unreachable: total mass exceeds eps < 1");
}

JointDist::JointDist(std::vector<std::size_t> sizes, std::vector<double> mass)
    : sizes_(std::move(sizes)), mass_(std::move(mass)) {
  if (sizes_.empty()) throw std::invalid_argument("joint law needs at least one coordinate");
  std::size_t total = 1;
  for (std::size_t s : sizes_) {
    if (s == 0) throw std::invalid_argument("empty alphabet");
    if (s > std::numeric_limits<std::size_t>::max() / total)
      throw std::overflow_error("joint alphabet too large");
    total *= s;
  }
  if (mass_.size() != total)
    throw std::invalid_argument("mass vector length does not match alphabet product");
  check_mass_vector(mass_);
  for (std::size_t i = 0; i < mass_.size(); ++i)
    if (mass_[i] > 0.0) support_.push_back(i);
}

std::size_t JointDist::encode(std::span<const std::size_t> symbols) const {
  if (symbols.size() != sizes_.size()) throw std::invalid_argument("coordinate count mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (symbols[i] >= sizes_[i]) throw std::out_of_range("symbol outside alphabet");
    flat = flat * sizes_[i] + symbols[i];
  }
  return flat;
}

void JointDist::decode(std::size_t flat, std::span<std::size_t> symbols) const {
  if (symbols.size() != sizes_.size()) throw std::invalid_argument("coordinate count mismatch");
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    symbols[i] = flat % sizes_[i];
    flat /= sizes_[i];
  }
}

JointDist JointDist::marginal(std::uint32_t coord_mask) const {
  if (coord_mask == 0) throw std::invalid_argument("empty coordinate set");
  if (num_coords() < 32 && coord_mask >= (std::uint32_t{1} << num_coords()))
    throw std::invalid_argument("coordinate mask out of range");

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < num_coords(); ++i)
    if (coord_mask & (std::uint32_t{1} << i)) kept.push_back(i);

  std::vector<std::size_t> out_sizes;
  out_sizes.reserve(kept.size());
  for (std::size_t i : kept) out_sizes.push_back(sizes_[i]);
  std::size_t out_total = 1;
  for (std::size_t s : out_sizes) out_total *= s;

  std::vector<double> out(out_total, 0.0);
  std::vector<std::size_t> symbols(num_coords());
  for (std::size_t flat : support_) {
    decode(flat, symbols);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < kept.size(); ++k) idx = idx * out_sizes[k] + symbols[kept[k]];
    out[idx] += mass_[flat];
  }
  return JointDist(std::move(out_sizes), std::move(out));
}

Dist JointDist::marginal_dist(std::size_t coord) const {
  if (coord >= num_coords()) throw std::out_of_range("coordinate index");
  JointDist m = marginal(std::uint32_t{1} << coord);
  return Dist(std::vector<double>(m.masses().begin(), m.masses().end()));
}

JointDist JointDist::product(const std::vector<Dist>& coords) {
  if (coords.empty()) throw std::invalid_argument("empty product");
  std::vector<std::size_t> sizes;
  std::size_t total = 1;
  for (const Dist& d : coords) {
    sizes.push_back(d.alphabet_size());
    total *= d.alphabet_size();
  }
  std::vector<double> mass(total);
  std::vector<std::size_t> symbols(coords.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double p = 1.0;
    for (std::size_t i = coords.size(); i-- > 0;) {
      p *= coords[i].mass(rem % sizes[i]);
      rem /= sizes[i];
    }
    mass[flat] = p;
  }
  return JointDist(std::move(sizes), std::move(mass));
}

JointDist JointDist::from_source(const Dist& x) {
  std::vector<double> mass(x.masses().begin(), x.masses().end());
  return JointDist({1, x.alphabet_size()}, std::move(mass));
}

double subset_entropy_nats(const JointDist& j, std::uint32_t coord_mask) {
  const JointDist m = j.marginal(coord_mask);
  double h = 0.0;
  for (double v : m.masses())
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

BlockJoint::BlockJoint(JointDist base, std::uint64_t block_length, std::uint64_t budget)
    : base_(std::move(base)), n_(block_length) {
  if (n_ == 0) throw std::invalid_argument("block length must be positive");
  support_count_ = 1;
  const std::uint64_t s = base_.support().size();
  for (std::uint64_t i = 0; i < n_; ++i) {
    if (support_count_ > budget / std::max<std::uint64_t>(s, 1))
      throw BudgetExceeded("block support " + std::to_string(s) + "^" +
                           std::to_string(n_) + " exceeds budget " + std::to_string(budget));
    support_count_ *= s;
  }
}

std::uint64_t BlockJoint::block_alphabet_size(std::size_t coord) const {
  return checked_pow(base_.alphabet_size(coord), n_);
}

void BlockJoint::decode_coord(std::size_t coord, std::uint64_t value,
                              std::span<std::size_t> symbols) const {
  if (symbols.size() != n_) throw std::invalid_argument("block length mismatch");
  const std::uint64_t s = base_.alphabet_size(coord);
  for (std::size_t t = n_; t-- > 0;) {
    symbols[t] = static_cast<std::size_t>(value % s);
    value /= s;
  }
}

SpectrumStats spectrum_stats(const BlockJoint& b, std::span<const std::uint64_t> x) {
  const JointDist& base = b.base();
  const std::size_t m = base.num_sources();
  if (m == 0) throw std::invalid_argument("spectrum needs at least one source");
  if (x.size() != m + 1) throw std::invalid_argument("block point has wrong arity");
  const std::size_t n = static_cast<std::size_t>(b.block_length());

  // Per-coordinate symbol sequences, time step 0 first.
  std::vector<std::vector<std::size_t>> sym(m + 1, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i <= m; ++i) b.decode_coord(i, x[i], sym[i]);

  const std::uint32_t full = (std::uint32_t{1} << m) - 1;
  SpectrumStats out;
  out.subset_stat.resize(full);
  out.marginal_stat.resize(m);

  const JointDist marg0 = base.marginal(1);
  std::vector<std::size_t> point;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const JointDist joint0S = base.marginal((mask << 1) | 1u);
    std::vector<std::size_t> coords{0};  // original coordinates kept, ascending
    for (std::size_t i = 1; i <= m; ++i)
      if (mask & (std::uint32_t{1} << (i - 1))) coords.push_back(i);
    double p = 1.0;
    point.resize(coords.size());
    for (std::size_t t = 0; t < n && p > 0.0; ++t) {
      for (std::size_t k = 0; k < coords.size(); ++k) point[k] = sym[coords[k]][t];
      const double denom = marg0.mass_at(sym[0][t]);
      const double num = joint0S.mass(point);
      p = denom > 0.0 ? p * (num / denom) : 0.0;
    }
    out.subset_stat[mask - 1] = p > 0.0 ? 1.0 / p : std::numeric_limits<double>::infinity();
  }

  for (std::size_t i = 1; i <= m; ++i) {
    const Dist mi = base.marginal_dist(i);
    double p = 1.0;
    for (std::size_t t = 0; t < n && p > 0.0; ++t) p *= mi.mass(sym[i][t]);
    out.marginal_stat[i - 1] = p > 0.0 ? 1.0 / p : std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

// Shared support-sequence walker.  Base support points carry precomputed
// per-subset conditionals; the recursion maintains running products.
struct SupportTables {
  std::size_t m = 0;
  std::size_t count = 0;                       // base support size
  std::vector<double> mass;                    // joint mass per support point
  std::vector<std::vector<double>> cond;       // [mask-1][k] = P(x_S | x_0)
  std::vector<std::vector<double>> marg;       // [i-1][k]    = P(x_i)
  std::vector<std::vector<std::size_t>> symbols;

  explicit SupportTables(const JointDist& base, bool with_marginals) {
    m = base.num_sources();
    if (m == 0) throw std::invalid_argument("need at least one source");
    count = base.support().size();
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    mass.resize(count);
    symbols.assign(count, std::vector<std::size_t>(m + 1));
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t flat = base.support()[k];
      mass[k] = base.mass_at(flat);
      base.decode(flat, symbols[k]);
    }
    const JointDist marg0 = base.marginal(1);
    cond.resize(full);
    std::vector<std::size_t> point;
    for (std::uint32_t sub = 1; sub <= full; ++sub) {
      const JointDist joint0S = base.marginal((sub << 1) | 1u);
      std::vector<std::size_t> coords{0};
      for (std::size_t i = 1; i <= m; ++i)
        if (sub & (std::uint32_t{1} << (i - 1))) coords.push_back(i);
      cond[sub - 1].resize(count);
      point.resize(coords.size());
      for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t c = 0; c < coords.size(); ++c) point[c] = symbols[k][coords[c]];
        cond[sub - 1][k] = joint0S.mass(point) / marg0.mass_at(symbols[k][0]);
      }
    }
    if (with_marginals) {
      marg.resize(m);
      for (std::size_t i = 1; i <= m; ++i) {
        const Dist mi = base.marginal_dist(i);
        marg[i - 1].resize(count);
        for (std::size_t k = 0; k < count; ++k) marg[i - 1][k] = mi.mass(symbols[k][i]);
      }
    }
  }
};

}  // namespace

double typicality_prob(const BlockJoint& b, double r,
                       std::span<const std::uint64_t> out_sizes,
                       std::optional<double> s) {
  if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
  if (s && !(*s > 0.0)) throw std::invalid_argument("s must be positive");
  const std::size_t m = b.base().num_sources();
  if (out_sizes.size() != m) throw std::invalid_argument("out_sizes arity mismatch");
  for (std::uint64_t y : out_sizes)
    if (y == 0) throw std::invalid_argument("empty output alphabet");

  const SupportTables tab(b.base(), s.has_value());
  const std::uint32_t full = (std::uint32_t{1} << m) - 1;
  const std::size_t n = static_cast<std::size_t>(b.block_length());

  // T_S <= r |Y_S|  <=>  r |Y_S| P(x_S | x_0) >= 1; precompute the factors.
  std::vector<double> box(full);
  for (std::uint32_t sub = 1; sub <= full; ++sub) {
    double ys = 1.0;
    for (std::size_t i = 1; i <= m; ++i)
      if (sub & (std::uint32_t{1} << (i - 1))) ys *= static_cast<double>(out_sizes[i - 1]);
    box[sub - 1] = r * ys;
  }
  const double rs = s ? r * *s : 0.0;

  const std::size_t lanes = full + (s ? m : 0);
  std::vector<double> prod((n + 1) * lanes, 1.0);
  std::vector<double> mass_prefix(n + 1, 1.0);

  double excluded = 0.0;
  // Depth-first walk over support sequences; prod row d holds products after
  // d chosen time steps.
  std::vector<std::size_t> choice(n, 0);
  std::size_t depth = 0;
  for (;;) {
    if (depth == n) {
      const double* row = prod.data() + depth * lanes;
      bool out = false;
      for (std::uint32_t sub = 1; sub <= full && !out; ++sub)
        if (row[sub - 1] * box[sub - 1] >= 1.0) out = true;
      if (s)
        for (std::size_t i = 0; i < m && !out; ++i)
          if (row[full + i] * rs >= 1.0) out = true;
      if (out) excluded += mass_prefix[depth];
      // Backtrack to the deepest level with an unexplored branch.
      while (depth > 0 && choice[depth - 1] + 1 == tab.count) --depth;
      if (depth == 0) break;
      ++choice[depth - 1];
      --depth;
      continue;
    }
    const std::size_t k = choice[depth];
    const double* row = prod.data() + depth * lanes;
    double* next = prod.data() + (depth + 1) * lanes;
    for (std::uint32_t sub = 1; sub <= full; ++sub)
      next[sub - 1] = row[sub - 1] * tab.cond[sub - 1][k];
    if (s)
      for (std::size_t i = 0; i < m; ++i)
        next[full + i] = row[full + i] * tab.marg[i][k];
    mass_prefix[depth + 1] = mass_prefix[depth] * tab.mass[k];
    ++depth;
    if (depth < n) choice[depth] = 0;
  }
  return excluded;
}

BlockSupport::BlockSupport(const BlockJoint& b) {
  const JointDist& base = b.base();
  const std::size_t coords_n = base.num_coords();
  stride_ = coords_n;
  const std::size_t n = static_cast<std::size_t>(b.block_length());
  const std::size_t count = base.support().size();
  const std::size_t total = static_cast<std::size_t>(b.support_count());

  std::vector<std::vector<std::size_t>> symbols(count, std::vector<std::size_t>(coords_n));
  std::vector<double> pmass(count);
  for (std::size_t k = 0; k < count; ++k) {
    base.decode(base.support()[k], symbols[k]);
    pmass[k] = base.mass_at(base.support()[k]);
  }

  coords_.assign(total * stride_, 0);
  mass_.assign(total, 0.0);
  x0_id_.assign(total, 0);

  std::vector<std::uint64_t> cur(coords_n, 0);
  std::vector<std::size_t> choice(n, 0);
  std::vector<std::vector<std::uint64_t>> saved(n, std::vector<std::uint64_t>(coords_n));
  std::vector<double> mass_prefix(n + 1, 1.0);
  std::unordered_map<std::uint64_t, std::uint32_t> x0_index;

  std::size_t emit = 0;
  std::size_t depth = 0;
  for (;;) {
    if (depth == n) {
      std::copy(cur.begin(), cur.end(), coords_.begin() + emit * stride_);
      mass_[emit] = mass_prefix[n];
      auto [it, fresh] = x0_index.try_emplace(cur[0], static_cast<std::uint32_t>(x0_mass_.size()));
      if (fresh) x0_mass_.push_back(0.0);
      x0_id_[emit] = it->second;
      x0_mass_[it->second] += mass_[emit];
      ++emit;
      while (depth > 0 && choice[depth - 1] + 1 == count) {
        --depth;
        cur = saved[depth];
      }
      if (depth == 0) break;
      ++choice[depth - 1];
      cur = saved[depth - 1];
      --depth;
      continue;
    }
    saved[depth] = cur;
    const std::size_t k = choice[depth];
    for (std::size_t i = 0; i < coords_n; ++i)
      cur[i] = cur[i] * base.alphabet_size(i) + symbols[k][i];
    mass_prefix[depth + 1] = mass_prefix[depth] * pmass[k];
    ++depth;
    if (depth < n) choice[depth] = 0;
  }
}

JointDist block_as_joint(const BlockJoint& b, std::uint64_t budget) {
  const JointDist& base = b.base();
  const std::size_t coords_n = base.num_coords();
  std::uint64_t total = 1;
  std::vector<std::size_t> sizes(coords_n);
  for (std::size_t i = 0; i < coords_n; ++i) {
    const std::uint64_t bs = b.block_alphabet_size(i);
    if (bs > budget || total > budget / bs)
      throw BudgetExceeded("block alphabet exceeds budget " + std::to_string(budget));
    total *= bs;
    sizes[i] = static_cast<std::size_t>(bs);
  }

  std::vector<double> mass(static_cast<std::size_t>(total), 0.0);
  const BlockSupport sup(b);
  for (std::size_t p = 0; p < sup.size(); ++p) {
    const auto c = sup.coords(p);
    std::size_t flat = 0;
    for (std::size_t i = 0; i < coords_n; ++i)
      flat = flat * sizes[i] + static_cast<std::size_t>(c[i]);
    mass[flat] += sup.mass(p);
  }
  return JointDist(std::move(sizes), std::move(mass));
}

}  // namespace binlot

#include "binlot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace binlot {

GammaTuple::GammaTuple(std::vector<double> g) : gamma_(std::move(g)) {
  if (gamma_.empty()) throw std::invalid_argument("empty gamma tuple");
  for (double v : gamma_)
    if (!(v >= 1.0)) throw std::invalid_argument("gamma entries must be >= 1");
}

const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::direct: return "direct";
    case BoundKind::converse: return "converse";
    case BoundKind::pure_concentration: return "pure-concentration";
    case BoundKind::equal_concentration: return "equal-concentration";
    case BoundKind::expected_distance: return "expected-distance";
  }
  return "?";
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string BoundReport::to_text() const {
  std::ostringstream out;
  out << "kind: " << bound_kind_name(kind) << "\n";
  if (r > 0.0) out << "r: " << format_real(r) << "\n";
  if (s) out << "s: " << format_real(*s) << "\n";
  out << "value: " << format_real(value) << "\n";
  for (const auto& [name, v] : components)
    out << name << ": " << format_real(v) << "\n";
  return out.str();
}

namespace {

// nu(a, S) = sum over u of P_{X_0 X_S}(a, u)^2, organized so the marginal's
// coordinate 0 (slowest stride) is X_0.
double nu_squared_mass(const JointDist& j, std::uint32_t source_mask, std::size_t a) {
  const JointDist marg = j.marginal((source_mask << 1) | 1u);
  const std::size_t rest = marg.flat_size() / marg.alphabet_size(0);
  double out = 0.0;
  for (std::size_t u = 0; u < rest; ++u) {
    const double p = marg.mass_at(a * rest + u);
    out += p * p;
  }
  return out;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

MuMoments mu_mean_and_variance_bound(const JointDist& j, const std::vector<Dist>& out_dists,
                                     const GammaTuple& gammas, std::size_t a,
                                     std::span<const std::size_t> y) {
  const std::size_t m = j.num_sources();
  if (m == 0 || m > 20) throw std::invalid_argument("source count out of range");
  if (out_dists.size() != m || gammas.size() != m || y.size() != m)
    throw std::invalid_argument("per-source argument arity mismatch");
  if (a >= j.alphabet_size(0)) throw std::out_of_range("side-information symbol");
  for (std::size_t i = 0; i < m; ++i)
    if (y[i] >= out_dists[i].alphabet_size()) throw std::out_of_range("output symbol");

  const double p0 = j.marginal_dist(0).mass(a);
  double py = 1.0;       // P_Y(y)
  double gamma_all = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    py *= out_dists[i].mass(y[i]);
    gamma_all *= gammas.at(i);
  }

  MuMoments out;
  out.mean = p0 * py;
  out.var_bound = (gamma_all - 1.0) * p0 * p0 * py * py;

  const std::uint32_t full = (std::uint32_t{1} << m) - 1;
  for (std::uint32_t sub = 1; sub <= full; ++sub) {
    double gamma_comp = 1.0;  // product over the complement of S
    double py_comp = 1.0;     // P_{Y_{S^c}}(y_{S^c})
    for (std::size_t i = 0; i < m; ++i)
      if (!(sub & (std::uint32_t{1} << i))) {
        gamma_comp *= gammas.at(i);
        py_comp *= out_dists[i].mass(y[i]);
      }
    out.var_bound += gamma_comp * py * py_comp * nu_squared_mass(j, sub, a);
  }
  return out;
}

double expected_distance_bound(const JointDist& j, std::span<const std::uint64_t> out_sizes,
                               const GammaTuple& gammas) {
  const std::size_t m = j.num_sources();
  if (m == 0 || m > 20) throw std::invalid_argument("source count out of range");
  if (out_sizes.size() != m || gammas.size() != m)
    throw std::invalid_argument("per-source argument arity mismatch");

  std::vector<Dist> outs;
  outs.reserve(m);
  std::uint64_t y_total = 1;
  for (std::uint64_t ysz : out_sizes) {
    if (ysz == 0) throw std::invalid_argument("empty output alphabet");
    outs.emplace_back(Dist::uniform(static_cast<std::size_t>(ysz)));
    y_total *= ysz;
  }

  // Uniform targets make the variance bound independent of y, leaving a
  // factor |Y| on the sum over a.
  const std::vector<std::size_t> y0(m, 0);
  double total = 0.0;
  for (std::size_t a = 0; a < j.alphabet_size(0); ++a) {
    const MuMoments mm = mu_mean_and_variance_bound(j, outs, gammas, a, y0);
    total += std::sqrt(mm.var_bound);
  }
  return clamp01(0.5 * static_cast<double>(y_total) * total);
}

BoundReport expected_distance_report(const JointDist& j, std::span<const std::uint64_t> out_sizes,
                                     const GammaTuple& gammas) {
  BoundReport rep;
  rep.kind = BoundKind::expected_distance;
  rep.value = expected_distance_bound(j, out_sizes, gammas);
  rep.components.emplace_back("value", rep.value);
  return rep;
}

BoundReport direct_bound(const BlockJoint& b, std::span<const std::uint64_t> out_sizes, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("direct bound needs r > 1");
  const std::size_t m = b.num_sources();
  const double exclusion = typicality_prob(b, r, out_sizes);
  const double slack = std::sqrt(std::pow(2.0, double(m)) - 1.0) / 2.0 / std::sqrt(r);
  BoundReport rep;
  rep.kind = BoundKind::direct;
  rep.r = r;
  rep.value = clamp01(exclusion + slack);
  rep.components.emplace_back("exclusion", exclusion);
  rep.components.emplace_back("slack", slack);
  rep.components.emplace_back("raw", exclusion + slack);
  return rep;
}

BoundReport converse_bound(const BlockJoint& b, std::span<const std::uint64_t> out_sizes, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("converse bound needs r in (0,1)");
  const std::size_t m = b.num_sources();
  const double exclusion = typicality_prob(b, r, out_sizes);
  const double slack = (std::pow(2.0, double(m)) - 1.0) * r;
  BoundReport rep;
  rep.kind = BoundKind::converse;
  rep.r = r;
  rep.value = std::max(0.0, exclusion - slack);
  rep.components.emplace_back("exclusion", exclusion);
  rep.components.emplace_back("slack", slack);
  rep.components.emplace_back("raw", exclusion - slack);
  return rep;
}

BoundReport concentration_threshold(BinKind kind, const BlockJoint& b,
                                    std::span<const std::uint64_t> out_sizes, double r, double s) {
  if (kind != BinKind::pure && kind != BinKind::equal)
    throw std::invalid_argument("concentration threshold covers the pure and equal families");
  if (!(r > 1.0)) throw std::invalid_argument("concentration threshold needs r > 1");
  if (!(s > 0.0)) throw std::invalid_argument("concentration threshold needs s > 0");

  const std::size_t m = b.num_sources();
  const double exclusion = typicality_prob(b, r, out_sizes, s);
  const double root_sub = std::sqrt(std::pow(2.0, double(m)) - 1.0);
  const double root_marg = std::sqrt(2.0 * double(m));
  const double slack = (kind == BinKind::pure)
                           ? (root_sub + root_marg) / 2.0 / std::sqrt(r)
                           : (root_sub + 2.0 * root_marg) / 2.0 / std::sqrt(r);
  BoundReport rep;
  rep.kind = kind == BinKind::pure ? BoundKind::pure_concentration : BoundKind::equal_concentration;
  rep.r = r;
  rep.s = s;
  rep.value = clamp01(exclusion + slack);
  rep.components.emplace_back("exclusion", exclusion);
  rep.components.emplace_back("slack", slack);
  rep.components.emplace_back("raw", exclusion + slack);
  rep.components.emplace_back("tail", std::exp(-s));
  return rep;
}

RateRegionResult rate_region_check(const JointDist& j, std::span<const double> rates) {
  const std::size_t m = j.num_sources();
  if (m == 0 || m > 20) throw std::invalid_argument("source count out of range");
  if (rates.size() != m) throw std::invalid_argument("rate arity mismatch");
  for (double v : rates)
    if (!(v >= 0.0)) throw std::invalid_argument("rates must be nonnegative");

  constexpr double kTol = 1e-12;
  const double h0 = subset_entropy_nats(j, 1u);
  const std::uint32_t full = (std::uint32_t{1} << m) - 1;

  RateRegionResult out;
  out.slacks.resize(full);
  for (std::uint32_t sub = 1; sub <= full; ++sub) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (sub & (std::uint32_t{1} << i)) sum += rates[i];
    const double cond_ent = subset_entropy_nats(j, (sub << 1) | 1u) - h0;
    out.slacks[sub - 1] = cond_ent - sum;
    if (out.slacks[sub - 1] < -kTol) {
      out.inside = false;
      out.violated.push_back(sub);
    }
  }
  return out;
}

}  // namespace binlot

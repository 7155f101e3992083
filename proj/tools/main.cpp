#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "binlot/bin_maps.hpp"
#include "binlot/bounds.hpp"
#include "binlot/dist.hpp"
#include "binlot/dist_io.hpp"
#include "binlot/ensemble.hpp"
#include "binlot/lottery.hpp"

namespace {

using namespace binlot;

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  return out;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

void write_file_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("short write to " + path);
}

std::vector<std::uint64_t> out_sizes_from_bits(const std::vector<std::uint64_t>& bits,
                                               std::size_t m) {
  std::vector<std::uint64_t> sizes = [&] {
    if (bits.size() == m) {
      std::vector<std::uint64_t> s;
      for (std::uint64_t b : bits) {
        if (b > 30) throw std::invalid_argument("--out-bits entries must be <= 30");
        s.push_back(std::uint64_t{1} << b);
      }
      return s;
    }
    if (bits.size() == 1 && m > 1)
      return std::vector<std::uint64_t>(m, std::uint64_t{1} << bits[0]);
    throw std::invalid_argument("--out-bits needs one entry per source");
  }();
  return sizes;
}

BinMapFamily family_for(const std::string& name, std::uint64_t domain, std::uint64_t codomain) {
  const auto kind = bin_kind_from_name(name);
  if (!kind) throw std::invalid_argument("unknown family '" + name + "'");
  switch (*kind) {
    case BinKind::pure:
      return BinMapFamily::pure(domain, codomain);
    case BinKind::equal:
      return BinMapFamily::equal(domain, codomain);
    case BinKind::affine:
    case BinKind::binary_linear: {
      // CLI restricts the field families to q = 2, so sizes must be powers
      // of two; other primes are reachable through the library.
      auto log2_exact = [](std::uint64_t v, const char* what) {
        std::uint32_t bits = 0;
        while ((std::uint64_t{1} << bits) < v) ++bits;
        if ((std::uint64_t{1} << bits) != v) throw std::invalid_argument(what);
        return bits;
      };
      const std::uint32_t m = log2_exact(domain, "field family needs a power-of-two domain");
      const std::uint32_t n = log2_exact(codomain, "field family needs a power-of-two codomain");
      return *kind == BinKind::affine ? BinMapFamily::affine(2, m, n)
                                      : BinMapFamily::binary_linear(m, n);
    }
  }
  throw std::logic_error("unreachable");
}

struct ExtractArgs {
  std::string source;
  std::uint64_t n = 1;
  std::vector<std::uint64_t> out_bits;
  std::string family = "equal";
  std::uint64_t seed = 0;
  std::string map_out;
};

int run_extract(const ExtractArgs& a) {
  const JointDist base = read_joint_file(a.source);
  const BlockJoint block(base, a.n);
  const std::size_t m = base.num_sources();
  const auto out_sizes = out_sizes_from_bits(a.out_bits, m);

  std::vector<BinMapFamily> fams;
  for (std::size_t i = 0; i < m; ++i)
    fams.push_back(family_for(a.family, block.block_alphabet_size(i + 1), out_sizes[i]));

  SplitRng root(a.seed);
  ExtractorTuple phi;
  phi.out_sizes = out_sizes;
  for (std::size_t i = 0; i < m; ++i) {
    SplitRng map_rng = root.split(0).split(i);
    phi.maps.push_back(sample_bin_map(fams[i], map_rng));
  }

  std::cout << "family: " << a.family << "\n";
  std::cout << "n: " << a.n << "\n";
  std::cout << "seed: " << a.seed << "\n";
  for (std::size_t i = 0; i < m; ++i) {
    std::cout << "out-size-" << (i + 1) << ": " << out_sizes[i] << "\n";
    std::cout << "rate-nats-" << (i + 1) << ": "
              << format_real(std::log(double(out_sizes[i])) / double(a.n)) << "\n";
  }
  std::cout << "distance: " << format_real(exact_distance(block, phi)) << "\n";

  if (!a.map_out.empty()) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::string path = m == 1 ? a.map_out : a.map_out + "." + std::to_string(i + 1);
      write_file_bytes(path, serialize_bin_map(phi.maps[i]));
    }
  }
  return 0;
}

struct BoundArgs {
  std::string source;
  std::uint64_t n = 1;
  std::vector<std::uint64_t> out_bits;
  double r = 0.0;
  double s = 0.0;
  std::string family = "pure";
  std::vector<double> gammas;
  std::vector<double> rates;
};

int run_bounds(const std::string& kind, const BoundArgs& a) {
  const JointDist base = read_joint_file(a.source);
  const std::size_t m = base.num_sources();

  if (kind == "region") {
    const RateRegionResult res = rate_region_check(base, a.rates);
    std::cout << "inside: " << (res.inside ? "yes" : "no") << "\n";
    for (std::uint32_t mask = 1; mask <= res.slacks.size(); ++mask) {
      std::cout << "slack {";
      bool first = true;
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::uint32_t{1} << i)) {
          if (!first) std::cout << ",";
          std::cout << (i + 1);
          first = false;
        }
      std::cout << "}: " << format_real(res.slacks[mask - 1]) << "\n";
    }
    return res.inside ? 0 : 1;
  }

  const auto out_sizes = out_sizes_from_bits(a.out_bits, m);
  if (kind == "expected") {
    const JointDist j = a.n == 1 ? base : block_as_joint(BlockJoint(base, a.n));
    const GammaTuple g = a.gammas.empty() ? GammaTuple::ones(m) : GammaTuple(a.gammas);
    std::cout << expected_distance_report(j, out_sizes, g).to_text();
    return 0;
  }

  const BlockJoint block(base, a.n);
  if (kind == "direct") {
    std::cout << direct_bound(block, out_sizes, a.r).to_text();
  } else if (kind == "converse") {
    std::cout << converse_bound(block, out_sizes, a.r).to_text();
  } else if (kind == "concentration") {
    const auto fam_kind = bin_kind_from_name(a.family);
    if (!fam_kind) throw std::invalid_argument("unknown family '" + a.family + "'");
    std::cout << concentration_threshold(*fam_kind, block, out_sizes, a.r, a.s).to_text();
  } else {
    throw std::invalid_argument("unknown bound kind '" + kind + "'");
  }
  return 0;
}

struct SimulateArgs {
  std::string source;
  std::uint64_t n = 1;
  std::vector<std::uint64_t> out_bits;
  std::string family = "pure";
  std::uint64_t trials = 256;
  std::uint64_t seed = 0;
  std::vector<double> thresholds{0.05, 0.1, 0.25, 0.5};
  unsigned jobs = 1;
  std::string csv;
  double alpha = 0.5;
};

int run_simulate_ensemble(const SimulateArgs& a) {
  const JointDist base = read_joint_file(a.source);
  const BlockJoint block(base, a.n);
  const std::size_t m = base.num_sources();
  const auto out_sizes = out_sizes_from_bits(a.out_bits, m);

  std::vector<BinMapFamily> fams;
  for (std::size_t i = 0; i < m; ++i)
    fams.push_back(family_for(a.family, block.block_alphabet_size(i + 1), out_sizes[i]));

  const std::vector<double> d = ensemble_distances(fams, block, a.trials, a.seed, a.jobs);
  std::cout << summarize_distances(d, a.thresholds, a.seed).to_text();

  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << "trial,distance\n";
    for (std::size_t t = 0; t < d.size(); ++t) csv << t << "," << format_real(d[t]) << "\n";
    write_file_text(a.csv, csv.str());
  }
  return 0;
}

int run_simulate_exposure(const SimulateArgs& a) {
  if (a.out_bits.size() != 1)
    throw std::invalid_argument("exposure experiment takes a single --out-bits value");
  const auto kind = bin_kind_from_name(a.family);
  if (!kind) throw std::invalid_argument("unknown family '" + a.family + "'");
  const ExposureReport rep =
      exposure_experiment(a.n, a.alpha, a.out_bits[0], *kind, a.trials, a.seed);
  std::cout << rep.to_text();
  return 0;
}

struct LotteryArgs {
  std::string participants;
  std::string data;
  std::uint64_t winners = 1;
  std::string shares;
  std::string kappa = "passthrough";
  std::string audit;
};

std::vector<std::string> split_shares(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!s.empty()) out.push_back(cur);
  return out;
}

int run_lottery_run(const LotteryArgs& a) {
  const auto f1 = read_file_bytes(a.participants);
  const auto f2 = read_file_bytes(a.data);

  LotteryConfig cfg;
  cfg.participants = count_participants(f1);
  cfg.winners = a.winners;
  cfg.conditioner = a.kappa;
  cfg.shares = a.shares.empty() ? std::vector<std::string>() : split_shares(a.shares);
  if (cfg.shares.empty())
    for (std::uint64_t i = 1; i <= a.winners; ++i)
      cfg.shares.push_back("prize-" + std::to_string(i));

  std::cerr << "required-bits-estimate: " << format_real(required_randomness_bits(cfg.participants))
            << "\n";
  const AuditRecord rec = run_lottery(cfg, f1, f2);
  const std::string text = rec.to_text();
  std::cout << text;
  if (!a.audit.empty()) write_file_text(a.audit, text);
  return 0;
}

int run_lottery_verify(const LotteryArgs& a) {
  const auto f1 = read_file_bytes(a.participants);
  const auto f2 = read_file_bytes(a.data);
  std::ifstream in(a.audit, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + a.audit);
  std::stringstream buf;
  buf << in.rdbuf();
  const AuditRecord rec = AuditRecord::from_text(buf.str());
  if (verify_lottery(rec, f1, f2)) {
    std::cout << "OK\n";
    return 0;
  }
  std::cout << "MISMATCH\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-bin extraction toolkit and auditable lottery"};
  app.require_subcommand(1);

  ExtractArgs ex;
  CLI::App* extract = app.add_subcommand("extract", "sample an extractor tuple and evaluate it");
  extract->add_option("--source", ex.source, "distribution file")->required();
  extract->add_option("--n", ex.n, "block length")->required();
  extract->add_option("--out-bits", ex.out_bits, "output bits per source")
      ->required()
      ->delimiter(',');
  extract->add_option("--family", ex.family, "pure|equal|affine|binary-linear");
  extract->add_option("--seed", ex.seed, "master seed")->required();
  extract->add_option("--map-out", ex.map_out, "write sampled map(s) to this path");

  BoundArgs ba;
  std::string bound_kind;
  CLI::App* bounds = app.add_subcommand("bounds", "evaluate one-shot bounds and regions");
  bounds->add_option("kind", bound_kind, "direct|converse|concentration|expected|region")
      ->required();
  bounds->add_option("--source", ba.source, "distribution file")->required();
  bounds->add_option("--n", ba.n, "block length");
  bounds->add_option("--out-bits", ba.out_bits, "output bits per source")->delimiter(',');
  bounds->add_option("--r", ba.r, "typicality radius");
  bounds->add_option("--s", ba.s, "concentration tail exponent");
  bounds->add_option("--family", ba.family, "pure|equal (concentration)");
  bounds->add_option("--gamma", ba.gammas, "per-source gamma factors")->delimiter(',');
  bounds->add_option("--rates", ba.rates, "per-source rates in nats/symbol")->delimiter(',');

  SimulateArgs sa;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble studies");
  CLI::App* sim_ens = simulate->add_subcommand("ensemble", "distance of sampled tuples");
  sim_ens->add_option("--source", sa.source, "distribution file")->required();
  sim_ens->add_option("--n", sa.n, "block length")->required();
  sim_ens->add_option("--out-bits", sa.out_bits, "output bits per source")
      ->required()
      ->delimiter(',');
  sim_ens->add_option("--family", sa.family, "pure|equal|affine|binary-linear");
  sim_ens->add_option("--trials", sa.trials, "number of sampled tuples");
  sim_ens->add_option("--seed", sa.seed, "master seed")->required();
  sim_ens->add_option("--thresholds", sa.thresholds, "tail thresholds")->delimiter(',');
  sim_ens->add_option("--jobs", sa.jobs, "worker threads");
  sim_ens->add_option("--csv", sa.csv, "write per-trial distances to this CSV file");
  CLI::App* sim_exp = simulate->add_subcommand("exposure", "exposure-resilience experiment");
  sim_exp->add_option("--n", sa.n, "source bits")->required();
  sim_exp->add_option("--alpha", sa.alpha, "hidden fraction in (0,1]")->required();
  sim_exp->add_option("--out-bits", sa.out_bits, "output bits")->required()->delimiter(',');
  sim_exp->add_option("--family", sa.family, "pure|equal");
  sim_exp->add_option("--trials", sa.trials, "sampled exposure patterns");
  sim_exp->add_option("--seed", sa.seed, "master seed")->required();
  simulate->require_subcommand(1);

  LotteryArgs la;
  CLI::App* lrun = app.add_subcommand("lottery-run", "run the lottery pipeline");
  lrun->add_option("--participants", la.participants, "participant list file (f1)")->required();
  lrun->add_option("--data", la.data, "public randomness file (f2)")->required();
  lrun->add_option("--winners", la.winners, "number of winners")->required();
  lrun->add_option("--shares", la.shares, "comma-separated prize labels");
  lrun->add_option("--kappa", la.kappa, "passthrough|von-neumann");
  lrun->add_option("--audit", la.audit, "write the audit record to this path");

  CLI::App* lver = app.add_subcommand("lottery-verify", "verify an audit record");
  lver->add_option("--audit", la.audit, "audit record file")->required();
  lver->add_option("--participants", la.participants, "participant list file (f1)")->required();
  lver->add_option("--data", la.data, "public randomness file (f2)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (extract->parsed()) return run_extract(ex);
    if (bounds->parsed()) return run_bounds(bound_kind, ba);
    if (simulate->parsed()) {
      if (sim_ens->parsed()) return run_simulate_ensemble(sa);
      return run_simulate_exposure(sa);
    }
    if (lrun->parsed()) return run_lottery_run(la);
    if (lver->parsed()) return run_lottery_verify(la);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no command\n";
  return 2;
}

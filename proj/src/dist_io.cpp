#include "binlot/dist_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace binlot {
namespace {

// Token stream with '#' comments stripped to end of line.
class Tokens {
 public:
  explicit Tokens(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) toks_.push_back(tok);
    }
  }

  bool done() const { return pos_ == toks_.size(); }

  std::string next(const char* what) {
    if (done()) throw std::invalid_argument(std::string("unexpected end of input, wanted ") + what);
    return toks_[pos_++];
  }

  std::size_t next_size(const char* what) {
    const std::string t = next(what);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(t, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer '" + t + "'");
    }
    if (used != t.size()) throw std::invalid_argument("bad integer '" + t + "'");
    return static_cast<std::size_t>(v);
  }

  double next_real(const char* what) {
    const std::string t = next(what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad real '" + t + "'");
    }
    if (used != t.size()) throw std::invalid_argument("bad real '" + t + "'");
    return v;
  }

 private:
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

JointDist read_joint(std::istream& in) {
  Tokens toks(in);
  const std::string head = toks.next("'dist' or 'joint'");

  std::vector<std::size_t> sizes;
  if (head == "dist") {
    sizes = {1, toks.next_size("alphabet size")};
  } else if (head == "joint") {
    const std::size_t coords = toks.next_size("coordinate count");
    if (coords < 2) throw std::invalid_argument("joint law needs at least two coordinates");
    for (std::size_t i = 0; i < coords; ++i) sizes.push_back(toks.next_size("alphabet size"));
  } else {
    throw std::invalid_argument("expected 'dist' or 'joint', got '" + head + "'");
  }

  std::size_t total = 1;
  for (std::size_t s : sizes) total *= s;
  std::vector<double> mass(total);
  for (std::size_t i = 0; i < total; ++i) mass[i] = toks.next_real("mass");
  if (!toks.done()) throw std::invalid_argument("trailing tokens after mass vector");
  return JointDist(std::move(sizes), std::move(mass));
}

JointDist read_joint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_joint(in);
}

void write_joint(std::ostream& out, const JointDist& j) {
  if (j.num_coords() == 2 && j.alphabet_size(0) == 1) {
    out << "dist " << j.alphabet_size(1) << "\n";
  } else {
    out << "joint " << j.num_coords();
    for (std::size_t s : j.sizes()) out << ' ' << s;
    out << "\n";
  }
  out.precision(17);
  for (std::size_t i = 0; i < j.flat_size(); ++i)
    out << j.mass_at(i) << (i + 1 == j.flat_size() ? "\n" : " ");
}

}  // namespace binlot

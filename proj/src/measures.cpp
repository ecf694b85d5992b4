#include "tmep/measures.hpp"

#include "tmep/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace tmep {

namespace {

std::vector<Atom> merge_sorted(std::vector<Atom> atoms, double merge_tol) {
  std::erase_if(atoms, [](const Atom& a) { return !(a.weight > 0.0); });
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  std::vector<Atom> merged;
  double moment = 0.0;
  for (const Atom& a : atoms) {
    if (!merged.empty() && a.location - merged.back().location <= merge_tol) {
      Atom& last = merged.back();
      moment += a.location * a.weight;
      last.weight += a.weight;
      last.location = moment / last.weight;
    } else {
      merged.push_back(a);
      moment = a.location * a.weight;
    }
  }
  return merged;
}

// Index of the atom of q closest to s, or npos when none lies within tol.
std::size_t find_match(const std::vector<Atom>& q, double s, double tol) {
  auto it = std::lower_bound(q.begin(), q.end(), s,
                             [](const Atom& a, double x) { return a.location < x; });
  std::size_t best = std::string::npos;
  double best_dist = tol;
  auto consider = [&](std::vector<Atom>::const_iterator c) {
    const double dist = std::abs(c->location - s);
    if (dist <= best_dist) {
      best_dist = dist;
      best = static_cast<std::size_t>(c - q.begin());
    }
  };
  if (it != q.end()) consider(it);
  if (it != q.begin()) consider(std::prev(it));
  return best;
}

// Pairs atoms of p and q by location; unmatched entries carry weight 0.
std::vector<std::pair<double, double>> align(const AtomicMeasure& p, const AtomicMeasure& q,
                                             double tol) {
  std::vector<std::pair<double, double>> out;
  std::vector<bool> used(q.size(), false);
  for (const Atom& a : p.atoms()) {
    const std::size_t j = find_match(q.atoms(), a.location, tol);
    if (j != std::string::npos && !used[j]) {
      used[j] = true;
      out.emplace_back(a.weight, q.atoms()[j].weight);
    } else {
      out.emplace_back(a.weight, 0.0);
    }
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (!used[j]) out.emplace_back(0.0, q.atoms()[j].weight);
  }
  return out;
}

}  // namespace

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms, double merge_tol) {
  AtomicMeasure q;
  q.atoms_ = merge_sorted(std::move(atoms), merge_tol);
  const double mass = q.total_mass();
  if (std::abs(mass - 1.0) > 1e-11) {
    std::ostringstream os;
    os.precision(17);
    os << "atomic measure has total mass " << mass;
    throw NumericalIntegrityError(os.str());
  }
  return q;
}

AtomicMeasure AtomicMeasure::normalized(std::vector<Atom> atoms, double merge_tol) {
  AtomicMeasure q;
  q.atoms_ = merge_sorted(std::move(atoms), merge_tol);
  const double mass = q.total_mass();
  if (!(mass > 0.0)) throw NumericalIntegrityError("atomic measure has no mass");
  for (Atom& a : q.atoms_) a.weight /= mass;
  return q;
}

AtomicMeasure AtomicMeasure::dirac(double location) {
  AtomicMeasure q;
  q.atoms_.push_back({location, 1.0});
  return q;
}

double AtomicMeasure::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.weight;
  return m;
}

double AtomicMeasure::weight_at(double s, double tol) const {
  const std::size_t j = find_match(atoms_, s, tol);
  return j == std::string::npos ? 0.0 : atoms_[j].weight;
}

AtomicMeasure reflect(const AtomicMeasure& q) {
  std::vector<Atom> atoms;
  atoms.reserve(q.size());
  for (auto it = q.atoms().rbegin(); it != q.atoms().rend(); ++it) {
    atoms.push_back({-it->location, it->weight});
  }
  return AtomicMeasure::from_atoms(std::move(atoms), 0.0);
}

std::vector<DensityRatio> rn_derivative(const AtomicMeasure& p, const AtomicMeasure& q,
                                        double match_tol, double weight_floor) {
  std::vector<DensityRatio> out;
  for (const Atom& a : p.atoms()) {
    if (a.weight <= weight_floor) continue;
    const std::size_t j = find_match(q.atoms(), a.location, match_tol);
    if (j == std::string::npos) {
      std::ostringstream os;
      os.precision(17);
      os << "atom at s=" << a.location << " (weight " << a.weight
         << ") has no counterpart in the dominating measure";
      throw AbsoluteContinuityError(os.str(), a.location);
    }
    out.push_back({a.location, a.weight / q.atoms()[j].weight});
  }
  return out;
}

double moment(const AtomicMeasure& q, unsigned k) {
  double m = 0.0;
  for (const Atom& a : q.atoms()) m += std::pow(a.location, double(k)) * a.weight;
  return m;
}

std::complex<double> cf_eval(const AtomicMeasure& q, std::complex<double> alpha) {
  std::complex<double> f = 0.0;
  for (const Atom& a : q.atoms()) f += a.weight * std::exp(-alpha * a.location);
  return f;
}

double distance_w1(const AtomicMeasure& p, const AtomicMeasure& q) {
  // Sweep the merged support accumulating |F_P - F_Q| times segment length.
  const auto& pa = p.atoms();
  const auto& qa = q.atoms();
  std::size_t i = 0, j = 0;
  double fp = 0.0, fq = 0.0, dist = 0.0;
  double prev = 0.0;
  bool started = false;
  while (i < pa.size() || j < qa.size()) {
    const double next = (j >= qa.size() || (i < pa.size() && pa[i].location <= qa[j].location))
                            ? pa[i].location
                            : qa[j].location;
    if (started) dist += std::abs(fp - fq) * (next - prev);
    while (i < pa.size() && pa[i].location == next) fp += pa[i++].weight;
    while (j < qa.size() && qa[j].location == next) fq += qa[j++].weight;
    prev = next;
    started = true;
  }
  return dist;
}

double distance_tv(const AtomicMeasure& p, const AtomicMeasure& q, double match_tol) {
  double total = 0.0;
  for (const auto& [wp, wq] : align(p, q, match_tol)) total += std::abs(wp - wq);
  return 0.5 * total;
}

double max_atom_discrepancy(const AtomicMeasure& p, const AtomicMeasure& q, double match_tol) {
  double worst = 0.0;
  for (const auto& [wp, wq] : align(p, q, match_tol)) worst = std::max(worst, std::abs(wp - wq));
  return worst;
}

std::vector<double> recover_weights(std::span<const double> support,
                                    std::span<const std::complex<double>> alphas,
                                    std::span<const std::complex<double>> values) {
  if (alphas.size() != values.size()) throw ShapeError("recover_weights: sample size mismatch");
  const auto n = static_cast<Eigen::Index>(alphas.size());
  const auto k = static_cast<Eigen::Index>(support.size());
  // Real and imaginary parts stacked so the solution is real.
  Eigen::MatrixXd design(2 * n, k);
  Eigen::VectorXd rhs(2 * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const std::complex<double> e = std::exp(-alphas[r] * support[c]);
      design(2 * r, c) = e.real();
      design(2 * r + 1, c) = e.imag();
    }
    rhs(2 * r) = values[r].real();
    rhs(2 * r + 1) = values[r].imag();
  }
  const Eigen::VectorXd w = design.completeOrthogonalDecomposition().solve(rhs);
  return {w.data(), w.data() + w.size()};
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

void write_csv(std::ostream& os, const AtomicMeasure& q) {
  os << "s,weight\n";
  for (const Atom& a : q.atoms()) os << format_number(a.location) << ',' << format_number(a.weight) << '\n';
}

AtomicMeasure read_csv(std::istream& is, double merge_tol) {
  std::string line;
  if (!std::getline(is, line) || line != "s,weight") {
    throw ConfigError("measure CSV must start with the header 's,weight'");
  }
  std::vector<Atom> atoms;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed measure CSV row: " + line);
    atoms.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return AtomicMeasure::from_atoms(std::move(atoms), merge_tol);
}

}  // namespace tmep

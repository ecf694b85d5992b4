#pragma once

// Finitely supported probability measures on the real line.

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tmep {

inline constexpr double kDefaultMergeTol = 1e-8;

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Sorted atoms with strictly positive weights summing to one.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  /// Sorts, drops nonpositive weights and merges atoms whose neighbouring
  /// locations differ by at most merge_tol (weighted-mean location). Throws
  /// NumericalIntegrityError if the surviving mass is not 1 within 1e-11.
  static AtomicMeasure from_atoms(std::vector<Atom> atoms, double merge_tol = kDefaultMergeTol);
  /// Same, but rescales the merged weights to unit mass first.
  static AtomicMeasure normalized(std::vector<Atom> atoms, double merge_tol = kDefaultMergeTol);
  static AtomicMeasure dirac(double location);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;
  /// Weight of the atom within tol of s, or 0.
  double weight_at(double s, double tol = kDefaultMergeTol) const;

 private:
  std::vector<Atom> atoms_;
};

/// Q o r with r(s) = -s.
AtomicMeasure reflect(const AtomicMeasure& q);

struct DensityRatio {
  double location = 0.0;
  double ratio = 0.0;
};

/// dP/dQ at each atom of P carrying weight above weight_floor. Throws
/// AbsoluteContinuityError if such an atom has no partner in Q within match_tol.
std::vector<DensityRatio> rn_derivative(const AtomicMeasure& p, const AtomicMeasure& q,
                                        double match_tol = kDefaultMergeTol,
                                        double weight_floor = 0.0);

double moment(const AtomicMeasure& q, unsigned k);
/// int e^{-alpha s} dQ(s).
std::complex<double> cf_eval(const AtomicMeasure& q, std::complex<double> alpha);

/// Wasserstein-1 distance, the integral of |F_P - F_Q|.
double distance_w1(const AtomicMeasure& p, const AtomicMeasure& q);
/// Total variation sup_A |P(A) - Q(A)|: half the matched weight differences
/// plus half the unmatched mass.
double distance_tv(const AtomicMeasure& p, const AtomicMeasure& q,
                   double match_tol = kDefaultMergeTol);
/// Largest atomwise weight difference over the union of supports.
double max_atom_discrepancy(const AtomicMeasure& p, const AtomicMeasure& q,
                            double match_tol = kDefaultMergeTol);

/// Least-squares weights on a known support from characteristic function
/// samples F(alpha_j) = sum_k w_k e^{-alpha_j s_k}.
std::vector<double> recover_weights(std::span<const double> support,
                                    std::span<const std::complex<double>> alphas,
                                    std::span<const std::complex<double>> values);

/// `s,weight` header then one row per atom, 17 significant digits.
void write_csv(std::ostream& os, const AtomicMeasure& q);
AtomicMeasure read_csv(std::istream& is, double merge_tol = kDefaultMergeTol);

/// %.17g formatting shared by every emitted number.
std::string format_number(double x);

}  // namespace tmep

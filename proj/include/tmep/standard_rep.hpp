#pragma once

// Standard representation on Hilbert-Schmidt space. The algebra acts by left
// multiplication, the commutant by right multiplication, J X = X^dagger, the
// natural cone is the set of positive semidefinite matrices and a state nu is
// represented by nu^{1/2}. Every modular object is a (left, right) pair.

#include "tmep/operator_core.hpp"

#include <cstdint>
#include <functional>
#include <limits>

namespace tmep {

/// A matrix viewed as a vector with <X, Y> = tr(X^dagger Y).
class StandardVector {
 public:
  StandardVector() = default;
  explicit StandardVector(Matrix m) : m_(std::move(m)) {}

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex inner(const StandardVector& other) const;
  double norm() const { return m_.norm(); }
  /// J X = X^dagger.
  StandardVector modular_conjugation() const { return StandardVector(m_.adjoint()); }

 private:
  Matrix m_;
};

/// X -> left * X * right. Never expanded into a d^2 x d^2 matrix.
struct SandwichMap {
  Matrix left;
  Matrix right;

  static SandwichMap identity(Index dim);
  static SandwichMap left_multiplication(const Matrix& a);

  Index dim() const { return left.rows(); }
  Matrix apply(const Matrix& x) const { return left * x * right; }
  StandardVector apply(const StandardVector& x) const {
    return StandardVector(apply(x.matrix()));
  }
  /// (this o other)(X) = this(other(X)).
  SandwichMap compose(const SandwichMap& other) const {
    return {left * other.left, other.right * right};
  }
};

StandardVector vector_representative(const DensityMatrix& nu);

/// Delta_{nu|rho}^alpha = (nu^alpha, rho^{-alpha}).
SandwichMap relative_modular(const DensityMatrix& nu, const DensityMatrix& rho, Complex alpha);
/// Delta_rho^alpha.
SandwichMap modular_operator(const DensityMatrix& rho, Complex alpha);
/// Modular automorphism A -> rho^{i theta} A rho^{-i theta}.
SandwichMap modular_flow(const DensityMatrix& rho, double theta);

/// [D nu : D rho]_alpha = nu^alpha rho^{-alpha} for complex alpha.
Matrix cocycle(const DensityMatrix& nu, const DensityMatrix& rho, Complex alpha);

struct CocycleCertificate {
  Matrix unitary;                 ///< nu^{it} rho^{-it}
  Matrix fitted_left;             ///< left factor recovered from the map
  double unitarity_defect = 0.0;  ///< ||u u^dagger - 1||_max
  double right_factor_defect = 0.0;
  double fit_residual = 0.0;      ///< map vs. left multiplication on probes
  double formula_residual = 0.0;  ///< ||fitted_left - unitary||_max
  double max_residual() const;
};

/// Connes cocycle at imaginary argument i t, with a certificate that the
/// composite Delta_{nu|rho}^{it} o Delta_rho^{-it} is a left multiplication.
CocycleCertificate connes_cocycle(const DensityMatrix& nu, const DensityMatrix& rho, double t);

/// Araki relative entropy tr(nu (log rho - log nu)); nonpositive.
double relative_entropy(const DensityMatrix& nu, const DensityMatrix& rho);

/// sum_a P_a nu P_a.
DensityMatrix dephase(const DensityMatrix& nu, const SpectralResolution& res);

struct CesaroResult {
  Complex numeric;        ///< (1/R) int_0^R tr(nu sigma^theta(A)) d theta, midpoint rule
  Complex limit;          ///< tr(nu_bar A)
  double error = 0.0;     ///< |numeric - limit|
  double bound = 0.0;     ///< C / (R g)
  double gap = std::numeric_limits<double>::infinity();  ///< min |log l_a - log l_b|
  bool gapless = false;   ///< omega fully degenerate
};

CesaroResult cesaro_average(const DensityMatrix& nu, const DensityMatrix& omega,
                            const Matrix& a, double horizon, int points_per_unit = 64,
                            double cluster_tol = kDefaultClusterTol);

/// e^{-itH} Phi e^{itH}.
StandardVector liouvillean_evolve(const HermitianMatrix& h, const StandardVector& phi, double t);

/// State at time t: omega_t = e^{-itH} omega e^{itH}.
DensityMatrix evolve_state(const DensityMatrix& omega, const HermitianMatrix& h, double t);

// ---------------------------------------------------------------------------
// Identity residuals. Maps on Hilbert-Schmidt space are compared on every
// matrix unit when dim <= kExhaustiveProbeDim, otherwise on seeded Gaussian
// probe matrices.

inline constexpr Index kExhaustiveProbeDim = 16;

using HsMap = std::function<Matrix(const Matrix&)>;

/// max over probes X of ||F(X) - G(X)||_max / max(1, ||G(X)||_max).
double map_discrepancy(const HsMap& f, const HsMap& g, Index dim,
                       std::uint64_t seed = 0x5eed, int random_probes = 6);

/// X -> e^{itH}(omega (e^{-itH} X e^{itH}) omega_t^{-1}) e^{-itH} against
/// X -> omega_{-t} X omega^{-1}.
double conjugated_modular_residual(const DensityMatrix& omega, const HermitianMatrix& h, double t);

/// Residuals of the anti-unitary U X = conj(X) for real H and real omega.
struct TimeReversalResiduals {
  double implements_theta = 0.0;    ///< U(A X) = conj(A) U(X)
  double fixes_cone = 0.0;          ///< U Omega = Omega and U maps the cone into itself
  double commutes_with_j = 0.0;     ///< U J = J U
  double commutes_with_liouvillean = 0.0;  ///< U L = L U
  double reverses_modular = 0.0;    ///< U Delta_{omega_{-t}|omega}^{1/2} U = Delta_{omega_t|omega}^{1/2}
  double max() const;
};

TimeReversalResiduals time_reversal_residuals(const DensityMatrix& omega,
                                              const HermitianMatrix& h, double t);

/// [D nu:D rho]_{it} [D rho:D mu]_{it} against [D nu:D mu]_{it}.
double cocycle_chain_residual(const DensityMatrix& nu, const DensityMatrix& rho,
                              const DensityMatrix& mu, double t);

/// J Delta_{nu|mu} J against Delta_{mu|nu}^{-1}.
double j_flip_residual(const DensityMatrix& nu, const DensityMatrix& mu);

}  // namespace tmep

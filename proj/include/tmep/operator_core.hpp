#pragma once

// Dense Hermitian linear algebra: cached eigendecompositions, eigenvalue
// clustering, matrix functions, Kronecker products and partial traces.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace tmep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultClusterTol = 1e-9;
inline constexpr double kFaithfulnessThreshold = 1e-12;

/// Eigenpairs with ascending eigenvalues; vectors are the columns.
struct Eigensystem {
  RealVector values;
  Matrix vectors;
};

namespace detail {
struct EigenCache {
  std::once_flag once;
  Eigensystem system;
};
}  // namespace detail

/// Immutable Hermitian matrix. The input is symmetrized as (M + M^dagger)/2
/// and the eigendecomposition is computed once, on first use, and shared
/// between copies.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Matrix& m);

  /// Adopts a known eigensystem. The caller guarantees that it diagonalizes m.
  static HermitianMatrix from_eigensystem(const RealVector& values,
                                          const Matrix& vectors);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  const Eigensystem& eigensystem() const;
  bool is_real() const;

  /// Sum over eigenpairs of f(lambda) |v><v|.
  Matrix apply(const std::function<Complex(double)>& f) const;

  static HermitianMatrix identity(Index dim);

 private:
  Matrix m_;
  std::shared_ptr<detail::EigenCache> cache_;
};

/// Positive semidefinite, unit trace Hermitian matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Validates hermiticity, positivity (eigenvalues >= -1e-12) and trace.
  explicit DensityMatrix(const Matrix& m);
  explicit DensityMatrix(const HermitianMatrix& h);

  /// Skips the positivity check for states that are positive by
  /// construction (products, conjugations, dephasings of valid states).
  static DensityMatrix trusted(const Matrix& m);
  static DensityMatrix trusted(const HermitianMatrix& h);
  static DensityMatrix maximally_mixed(Index dim);
  /// Unit vector psi -> |psi><psi|.
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  Index dim() const { return h_.dim(); }
  const Matrix& matrix() const { return h_.matrix(); }
  const HermitianMatrix& hermitian() const { return h_; }
  const Eigensystem& eigensystem() const { return h_.eigensystem(); }

  double min_eigenvalue() const;
  bool faithful(double threshold = kFaithfulnessThreshold) const;

  /// rho^alpha with lambda^alpha = exp(alpha log lambda). Zero eigenvalues
  /// are allowed when Re(alpha) > 0; alpha == 0 always gives the identity.
  Matrix power(Complex alpha) const;
  Matrix log() const;
  Matrix sqrt() const { return power(0.5); }

  /// tr(rho A).
  Complex expectation(const Matrix& a) const;

 private:
  HermitianMatrix h_;
};

/// Eigenvalues grouped into clusters with their orthogonal projections.
/// Labels are 0..size()-1 ordered by strictly decreasing value. Projections
/// are stored as blocks of an orthonormal eigenbasis, P_a = B_a B_a^dagger.
class SpectralResolution {
 public:
  SpectralResolution() = default;
  SpectralResolution(std::vector<double> values, std::vector<Index> offsets,
                     Matrix basis, double cluster_tol);

  std::size_t size() const { return values_.size(); }
  Index dim() const { return basis_.rows(); }
  double value(std::size_t a) const { return values_[a]; }
  const std::vector<double>& values() const { return values_; }
  double cluster_tol() const { return cluster_tol_; }

  Index block_begin(std::size_t a) const { return offsets_[a]; }
  Index block_size(std::size_t a) const { return offsets_[a + 1] - offsets_[a]; }
  /// Orthonormal eigenbasis, columns grouped by cluster.
  const Matrix& basis() const { return basis_; }
  auto block(std::size_t a) const {
    return basis_.middleCols(block_begin(a), block_size(a));
  }
  /// Cluster index of each basis column.
  std::vector<std::size_t> column_labels() const;

  Matrix projection(std::size_t a) const;
  /// Sum of lambda_a P_a.
  Matrix reconstruct() const;

 private:
  std::vector<double> values_;
  std::vector<Index> offsets_;
  Matrix basis_;
  double cluster_tol_ = kDefaultClusterTol;
};

/// Groups eigenvalues of m into clusters. Neighbouring eigenvalues merge when
/// their gap is at most cluster_tol * max(|lambda_i|, |lambda_j|) plus a
/// roundoff floor of dim * eps * max|lambda|.
SpectralResolution spectral_decompose(const HermitianMatrix& m,
                                      double cluster_tol = kDefaultClusterTol);

/// f applied through the cached eigendecomposition.
Matrix matrix_function(const HermitianMatrix& m,
                       const std::function<Complex(double)>& f);
/// Variant for positivity-requiring maps (log, complex powers). Throws
/// FaithfulnessError if any eigenvalue is at or below the threshold.
Matrix matrix_function_positive(const DensityMatrix& rho,
                                const std::function<Complex(double)>& f,
                                double threshold = kFaithfulnessThreshold);

/// exp(-i t H).
Matrix propagator(const HermitianMatrix& h, double t);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron(std::span<const Matrix> factors);

/// Traces out every factor except `kept`.
Matrix partial_trace(const Matrix& m, std::span<const Index> factor_dims,
                     std::size_t kept);

/// Places `op` on factor `which` of a tensor product: 1 x .. x op x .. x 1.
Matrix embed(const Matrix& op, std::span<const Index> factor_dims,
             std::size_t which);

/// Frobenius norm of M - M^dagger.
double hermiticity_defect(const Matrix& m);

}  // namespace tmep

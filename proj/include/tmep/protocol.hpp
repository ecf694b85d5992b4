#pragma once

// Two-times measurement of S = -log omega with Hamiltonian evolution between
// the measurements, and the equivalent routes to its entropy production
// statistics:
//   direct    p(b,a) = tr(e^{-itH} P_a nu P_a e^{itH} P_b), binned by
//             E(b,a) = -log l_b + log l_a
//   trace     F(alpha) = tr(omega_{-t}^alpha omega^{-alpha} nu_bar)
//   spectral  spectral measure of -log Delta_{omega_{-t}|omega} for Omega_{nu_bar}
//   cocycle   tr(nu_bar [D omega_{-t}:D omega]_{conj(alpha)/2}^* [D omega_{-t}:D omega]_{alpha/2})

#include "tmep/measures.hpp"
#include "tmep/operator_core.hpp"
#include "tmep/standard_rep.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace tmep {

/// p(b, a) for every pair of cluster labels of omega.
struct JointDistribution {
  std::vector<double> values;  ///< lambda_a per label, strictly decreasing
  Eigen::MatrixXd probs;       ///< probs(b, a)
  double correction = 0.0;     ///< |total - 1| removed by renormalization

  std::size_t size() const { return values.size(); }
  double total() const { return probs.sum(); }
  /// p_nu(a) = sum_b p(b, a).
  double first_outcome(std::size_t a) const { return probs.col(Index(a)).sum(); }
};

/// Entries at or below this magnitude are roundoff and are set to zero.
inline constexpr double kProbabilityFloor = 1e-14;

/// Caches the propagator expressed in omega's eigenbasis so that many initial
/// states can be run through the protocol at fixed (omega, H, t).
class TwoTimeProtocol {
 public:
  TwoTimeProtocol(SpectralResolution res, const HermitianMatrix& h, double t);

  const SpectralResolution& resolution() const { return res_; }
  double time() const { return t_; }
  JointDistribution joint_distribution(const DensityMatrix& nu) const;

 private:
  SpectralResolution res_;
  double t_;
  Matrix rotated_;  // V^dagger e^{-itH} V
};

JointDistribution joint_distribution(const DensityMatrix& nu, const SpectralResolution& res,
                                     const HermitianMatrix& h, double t);

/// Q(s) = sum over E(b,a) = s of p(b,a).
AtomicMeasure ep_measure(const JointDistribution& jd, double merge_tol = kDefaultMergeTol);
/// Same, checking that jd was built on res.
AtomicMeasure ep_measure(const JointDistribution& jd, const SpectralResolution& res,
                         double merge_tol = kDefaultMergeTol);

/// Objects shared by the modular routes at fixed (omega, H, t). The backward
/// state omega_{-t} = e^{itH} omega e^{-itH} is obtained from an independent
/// eigendecomposition of its modular Hamiltonian -log omega_{-t}.
class ModularContext {
 public:
  ModularContext(const DensityMatrix& omega, const HermitianMatrix& h, double t,
                 double cluster_tol = kDefaultClusterTol);

  const DensityMatrix& omega() const { return omega_; }
  const DensityMatrix& omega_back() const { return omega_back_; }
  const HermitianMatrix& entropy_back() const { return entropy_back_; }
  const SpectralResolution& resolution() const { return res_; }
  double time() const { return t_; }
  /// V_back^dagger W: eigenvectors of -log omega_{-t} against the cluster basis W of omega.
  const Matrix& overlap() const { return overlap_; }
  /// log of omega's eigenvalue for each column of the cluster basis.
  const RealVector& log_eigenvalues() const { return log_values_; }

 private:
  DensityMatrix omega_;
  HermitianMatrix entropy_back_;  // -log omega_{-t}
  DensityMatrix omega_back_;
  SpectralResolution res_;
  Matrix overlap_;
  RealVector log_values_;
  double t_;
};

/// Trace formula evaluated with a dephased state (nu_bar = dephase(nu)).
Complex char_function_trace(const ModularContext& ctx, const DensityMatrix& nu_bar, Complex alpha);
/// nu = omega: tr(omega_{-t}^alpha omega^{1-alpha}), analytic in 0 <= Re alpha <= 1.
Complex char_function_reference(const ModularContext& ctx, Complex alpha);
Complex char_function_trace(const DensityMatrix& nu, const DensityMatrix& omega,
                            const HermitianMatrix& h, double t, Complex alpha);

/// Spectral measure of -log Delta_{rho|omega} for the vector phi, where
/// entropy_back = -log rho.
AtomicMeasure ep_measure_spectral(const StandardVector& phi, const HermitianMatrix& entropy_back,
                                  const DensityMatrix& omega,
                                  double merge_tol = kDefaultMergeTol);
AtomicMeasure ep_measure_spectral(const StandardVector& phi, const ModularContext& ctx,
                                  double merge_tol = kDefaultMergeTol);
AtomicMeasure ep_measure_spectral(const StandardVector& phi, const DensityMatrix& omega,
                                  const HermitianMatrix& h, double t,
                                  double merge_tol = kDefaultMergeTol);

/// Spectral measure for Omega_{nu_bar}, nu_bar = dephase(nu). The representative is
/// block diagonal in omega's cluster basis, so only cluster-sized blocks are diagonalized.
AtomicMeasure ep_measure_spectral_dephased(const DensityMatrix& nu, const ModularContext& ctx,
                                           double merge_tol = kDefaultMergeTol);

/// State-independent factors of the matrix routes at one alpha, so that several
/// states can be evaluated at O(d^2) each.
struct MatrixRouteKernel {
  Complex alpha;
  Matrix trace_kernel;                  ///< omega_{-t}^alpha omega^{-alpha}
  std::optional<Matrix> cocycle_kernel;  ///< [..]_{conj(alpha)/2}^dagger [..]_{alpha/2}, imaginary alpha
};
MatrixRouteKernel matrix_route_kernel(const ModularContext& ctx, Complex alpha);
Complex char_function_trace(const MatrixRouteKernel& k, const DensityMatrix& nu_bar);
Complex char_function_reference(const MatrixRouteKernel& k, const ModularContext& ctx);
Complex char_function_cocycle_product(const MatrixRouteKernel& k, const DensityMatrix& nu_bar);

/// Dephased cocycle product; alpha must be purely imaginary.
Complex char_function_cocycle_product(const ModularContext& ctx, const DensityMatrix& nu_bar,
                                      Complex alpha);
Complex char_function_cocycle_product(const DensityMatrix& nu, const DensityMatrix& omega,
                                      const HermitianMatrix& h, double t, Complex alpha);

enum class Route { direct, trace, spectral, cocycle_product };
std::string_view route_name(Route r);
inline constexpr Route kAllRoutes[] = {Route::direct, Route::trace, Route::spectral,
                                       Route::cocycle_product};

struct CharFunctionGrid {
  std::vector<Complex> alphas;
  std::vector<Complex> values;
  Route route = Route::direct;
};

/// Evaluates F_{nu,t} over alphas along one route. The cocycle route
/// requires imaginary alphas.
CharFunctionGrid char_function_grid(Route route, const TwoTimeProtocol& protocol,
                                    const ModularContext& ctx, const DensityMatrix& nu,
                                    std::span<const Complex> alphas,
                                    double merge_tol = kDefaultMergeTol);

/// n points of i*R evenly covering [-max_imag, max_imag].
std::vector<Complex> imaginary_grid(double max_imag, int n);

}  // namespace tmep

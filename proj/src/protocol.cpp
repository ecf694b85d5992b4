#include "tmep/protocol.hpp"

#include "tmep/errors.hpp"

#include <cmath>
#include <sstream>

namespace tmep {

namespace {

Complex trace_of_product(const Matrix& a, const Matrix& b) {
  return a.transpose().cwiseProduct(b).sum();
}

}  // namespace

TwoTimeProtocol::TwoTimeProtocol(SpectralResolution res, const HermitianMatrix& h, double t)
    : res_(std::move(res)), t_(t) {
  if (h.dim() != res_.dim()) throw ShapeError("two-time protocol: Hamiltonian dimension mismatch");
  const Matrix& v = res_.basis();
  rotated_ = v.adjoint() * propagator(h, t) * v;
}

JointDistribution TwoTimeProtocol::joint_distribution(const DensityMatrix& nu) const {
  if (nu.dim() != res_.dim()) throw ShapeError("joint_distribution: state dimension mismatch");
  const std::size_t k = res_.size();
  const Matrix& v = res_.basis();
  const Matrix nu_r = v.adjoint() * nu.matrix() * v;
  const auto labels = res_.column_labels();

  JointDistribution jd;
  jd.values = res_.values();
  jd.probs = Eigen::MatrixXd::Zero(Index(k), Index(k));
  for (std::size_t a = 0; a < k; ++a) {
    const Index ba = res_.block_begin(a), na = res_.block_size(a);
    const auto w_a = rotated_.middleCols(ba, na);
    const Matrix evolved = w_a * nu_r.block(ba, ba, na, na);
    // Diagonal of W_a nu_aa W_a^dagger, summed per second-outcome cluster.
    const Eigen::VectorXd diag = evolved.cwiseProduct(w_a.conjugate()).rowwise().sum().real();
    for (Index i = 0; i < diag.size(); ++i) jd.probs(Index(labels[i]), Index(a)) += diag[i];
  }

  for (Index j = 0; j < jd.probs.cols(); ++j) {
    for (Index i = 0; i < jd.probs.rows(); ++i) {
      double& p = jd.probs(i, j);
      if (p < -1e-12) {
        std::ostringstream os;
        os << "joint distribution entry p(" << i << "," << j << ") = " << p << " is negative";
        throw NumericalIntegrityError(os.str());
      }
      if (p <= kProbabilityFloor) p = 0.0;
    }
  }
  const double total = jd.probs.sum();
  jd.correction = std::abs(total - 1.0);
  if (jd.correction > 1e-8) {
    std::ostringstream os;
    os.precision(17);
    os << "joint distribution sums to " << total;
    throw NumericalIntegrityError(os.str());
  }
  if (jd.correction > 0.0) jd.probs /= total;
  return jd;
}

JointDistribution joint_distribution(const DensityMatrix& nu, const SpectralResolution& res,
                                     const HermitianMatrix& h, double t) {
  return TwoTimeProtocol(res, h, t).joint_distribution(nu);
}

AtomicMeasure ep_measure(const JointDistribution& jd, double merge_tol) {
  const std::size_t k = jd.size();
  std::vector<double> logs(k);
  for (std::size_t a = 0; a < k; ++a) logs[a] = std::log(jd.values[a]);
  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const double p = jd.probs(Index(b), Index(a));
      if (p > 0.0) atoms.push_back({a == b ? 0.0 : logs[a] - logs[b], p});
    }
  }
  return AtomicMeasure::normalized(std::move(atoms), merge_tol);
}

AtomicMeasure ep_measure(const JointDistribution& jd, const SpectralResolution& res,
                         double merge_tol) {
  if (jd.values != res.values()) throw ShapeError("ep_measure: alphabet mismatch");
  return ep_measure(jd, merge_tol);
}

ModularContext::ModularContext(const DensityMatrix& omega, const HermitianMatrix& h, double t,
                               double cluster_tol)
    : omega_(omega), t_(t) {
  if (h.dim() != omega.dim()) throw ShapeError("modular context: dimension mismatch");
  const Matrix entropy = -omega.log();
  const Matrix u = propagator(h, t);  // e^{-itH}
  entropy_back_ = HermitianMatrix(Matrix(u.adjoint() * entropy * u));
  const auto& es = entropy_back_.eigensystem();
  omega_back_ = DensityMatrix::trusted(
      HermitianMatrix::from_eigensystem((-es.values.array()).exp().matrix(), es.vectors));
  res_ = spectral_decompose(omega.hermitian(), cluster_tol);
  overlap_ = es.vectors.adjoint() * res_.basis();
  // The cluster basis lists omega's eigenvectors in decreasing order.
  const auto& ref = omega.eigensystem().values;
  const Index d = ref.size();
  log_values_.resize(d);
  for (Index k = 0; k < d; ++k) log_values_[k] = std::log(ref[d - 1 - k]);
}

MatrixRouteKernel matrix_route_kernel(const ModularContext& ctx, Complex alpha) {
  MatrixRouteKernel k;
  k.alpha = alpha;
  k.trace_kernel = ctx.omega_back().power(alpha) * ctx.omega().power(-alpha);
  if (alpha.real() == 0.0) {
    const Matrix half = cocycle(ctx.omega_back(), ctx.omega(), alpha * 0.5);
    const Matrix half_conj = cocycle(ctx.omega_back(), ctx.omega(), std::conj(alpha) * 0.5);
    k.cocycle_kernel = half_conj.adjoint() * half;
  }
  return k;
}

Complex char_function_trace(const MatrixRouteKernel& k, const DensityMatrix& nu_bar) {
  return trace_of_product(k.trace_kernel, nu_bar.matrix());
}

Complex char_function_reference(const MatrixRouteKernel& k, const ModularContext& ctx) {
  return trace_of_product(k.trace_kernel, ctx.omega().matrix());
}

Complex char_function_cocycle_product(const MatrixRouteKernel& k, const DensityMatrix& nu_bar) {
  if (!k.cocycle_kernel) {
    throw ShapeError("cocycle-product route is defined for imaginary alpha only");
  }
  return trace_of_product(nu_bar.matrix(), *k.cocycle_kernel);
}

Complex char_function_trace(const ModularContext& ctx, const DensityMatrix& nu_bar,
                            Complex alpha) {
  const Matrix right = ctx.omega().power(-alpha) * nu_bar.matrix();
  return trace_of_product(ctx.omega_back().power(alpha), right);
}

Complex char_function_reference(const ModularContext& ctx, Complex alpha) {
  return trace_of_product(ctx.omega_back().power(alpha), ctx.omega().power(1.0 - alpha));
}

Complex char_function_trace(const DensityMatrix& nu, const DensityMatrix& omega,
                            const HermitianMatrix& h, double t, Complex alpha) {
  const ModularContext ctx(omega, h, t);
  if (nu.dim() == omega.dim() && nu.matrix() == omega.matrix()) {
    return char_function_reference(ctx, alpha);
  }
  return char_function_trace(ctx, dephase(nu, ctx.resolution()), alpha);
}

AtomicMeasure ep_measure_spectral(const StandardVector& phi, const HermitianMatrix& entropy_back,
                                  const DensityMatrix& omega, double merge_tol) {
  if (phi.dim() != omega.dim() || entropy_back.dim() != omega.dim()) {
    throw ShapeError("ep_measure_spectral: dimension mismatch");
  }
  if (!omega.faithful()) {
    throw FaithfulnessError("ep_measure_spectral requires a faithful omega",
                            omega.min_eigenvalue());
  }
  const auto& back = entropy_back.eigensystem();
  const auto& ref = omega.eigensystem();
  const Matrix amplitudes = back.vectors.adjoint() * phi.matrix() * ref.vectors;
  const Index d = omega.dim();
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(d * d));
  for (Index a = 0; a < d; ++a) {
    const double log_lambda = std::log(ref.values[a]);
    for (Index b = 0; b < d; ++b) {
      const double w = std::norm(amplitudes(b, a));
      if (w > kProbabilityFloor) atoms.push_back({back.values[b] + log_lambda, w});
    }
  }
  return AtomicMeasure::normalized(std::move(atoms), merge_tol);
}

AtomicMeasure ep_measure_spectral(const StandardVector& phi, const ModularContext& ctx,
                                  double merge_tol) {
  return ep_measure_spectral(phi, ctx.entropy_back(), ctx.omega(), merge_tol);
}

AtomicMeasure ep_measure_spectral(const StandardVector& phi, const DensityMatrix& omega,
                                  const HermitianMatrix& h, double t, double merge_tol) {
  return ep_measure_spectral(phi, ModularContext(omega, h, t), merge_tol);
}

AtomicMeasure ep_measure_spectral_dephased(const DensityMatrix& nu, const ModularContext& ctx,
                                           double merge_tol) {
  const SpectralResolution& res = ctx.resolution();
  if (nu.dim() != res.dim()) throw ShapeError("ep_measure_spectral: dimension mismatch");
  const Matrix& w = res.basis();
  const Matrix rotated = w.adjoint() * nu.matrix() * w;
  const Matrix& overlap = ctx.overlap();
  const RealVector& back = ctx.entropy_back().eigensystem().values;
  const Index d = nu.dim();
  Matrix amplitudes(d, d);
  for (std::size_t a = 0; a < res.size(); ++a) {
    const Index b0 = res.block_begin(a), n = res.block_size(a);
    const Matrix block = (rotated.block(b0, b0, n, n) + rotated.block(b0, b0, n, n).adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    const RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix root = es.eigenvectors() * roots.cast<Complex>().asDiagonal() *
                        es.eigenvectors().adjoint();
    amplitudes.middleCols(b0, n) = overlap.middleCols(b0, n) * root;
  }
  std::vector<Atom> atoms;
  for (Index c = 0; c < d; ++c) {
    const double log_lambda = ctx.log_eigenvalues()[c];
    for (Index b = 0; b < d; ++b) {
      const double weight = std::norm(amplitudes(b, c));
      if (weight > kProbabilityFloor) atoms.push_back({back[b] + log_lambda, weight});
    }
  }
  return AtomicMeasure::normalized(std::move(atoms), merge_tol);
}

Complex char_function_cocycle_product(const ModularContext& ctx, const DensityMatrix& nu_bar,
                                      Complex alpha) {
  if (alpha.real() != 0.0) {
    throw ShapeError("cocycle-product route is defined for imaginary alpha only");
  }
  const Matrix half = cocycle(ctx.omega_back(), ctx.omega(), alpha * 0.5);
  const Matrix half_conj = cocycle(ctx.omega_back(), ctx.omega(), std::conj(alpha) * 0.5);
  return trace_of_product(nu_bar.matrix(), Matrix(half_conj.adjoint() * half));
}

Complex char_function_cocycle_product(const DensityMatrix& nu, const DensityMatrix& omega,
                                      const HermitianMatrix& h, double t, Complex alpha) {
  const ModularContext ctx(omega, h, t);
  return char_function_cocycle_product(ctx, dephase(nu, ctx.resolution()), alpha);
}

std::string_view route_name(Route r) {
  switch (r) {
    case Route::direct: return "direct";
    case Route::trace: return "trace";
    case Route::spectral: return "spectral";
    case Route::cocycle_product: return "cocycle-product";
  }
  return "unknown";
}

CharFunctionGrid char_function_grid(Route route, const TwoTimeProtocol& protocol,
                                    const ModularContext& ctx, const DensityMatrix& nu,
                                    std::span<const Complex> alphas, double merge_tol) {
  CharFunctionGrid grid;
  grid.route = route;
  grid.alphas.assign(alphas.begin(), alphas.end());
  grid.values.reserve(alphas.size());
  switch (route) {
    case Route::direct: {
      const AtomicMeasure q = ep_measure(protocol.joint_distribution(nu), merge_tol);
      for (Complex a : alphas) grid.values.push_back(cf_eval(q, a));
      break;
    }
    case Route::spectral: {
      const AtomicMeasure q = ep_measure_spectral_dephased(nu, ctx, merge_tol);
      for (Complex a : alphas) grid.values.push_back(cf_eval(q, a));
      break;
    }
    case Route::trace: {
      const DensityMatrix nu_bar = dephase(nu, ctx.resolution());
      for (Complex a : alphas) grid.values.push_back(char_function_trace(ctx, nu_bar, a));
      break;
    }
    case Route::cocycle_product: {
      const DensityMatrix nu_bar = dephase(nu, ctx.resolution());
      for (Complex a : alphas) {
        grid.values.push_back(char_function_cocycle_product(ctx, nu_bar, a));
      }
      break;
    }
  }
  return grid;
}

std::vector<Complex> imaginary_grid(double max_imag, int n) {
  std::vector<Complex> out;
  if (n == 1) return {Complex(0.0, 0.0)};
  for (int k = 0; k < n; ++k) {
    out.emplace_back(0.0, -max_imag + 2.0 * max_imag * double(k) / double(n - 1));
  }
  return out;
}

}  // namespace tmep

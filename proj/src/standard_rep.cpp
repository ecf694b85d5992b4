#include "tmep/standard_rep.hpp"

#include "tmep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tmep {

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Matrix gaussian_matrix(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix x(dim, dim);
  const double scale = 1.0 / std::sqrt(2.0 * double(dim));
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) x(i, j) = Complex(normal(rng), normal(rng)) * scale;
  }
  return x;
}

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
  if (a.dim() != b.dim()) throw ShapeError(std::string(what) + ": dimension mismatch");
}

}  // namespace

Complex StandardVector::inner(const StandardVector& other) const {
  if (other.dim() != dim()) throw ShapeError("inner product: dimension mismatch");
  return m_.conjugate().cwiseProduct(other.m_).sum();
}

SandwichMap SandwichMap::identity(Index dim) {
  return {Matrix::Identity(dim, dim), Matrix::Identity(dim, dim)};
}

SandwichMap SandwichMap::left_multiplication(const Matrix& a) {
  return {a, Matrix::Identity(a.rows(), a.rows())};
}

StandardVector vector_representative(const DensityMatrix& nu) {
  return StandardVector(nu.sqrt());
}

SandwichMap relative_modular(const DensityMatrix& nu, const DensityMatrix& rho, Complex alpha) {
  require_same_dim(nu, rho, "relative_modular");
  return {nu.power(alpha), rho.power(-alpha)};
}

SandwichMap modular_operator(const DensityMatrix& rho, Complex alpha) {
  return relative_modular(rho, rho, alpha);
}

SandwichMap modular_flow(const DensityMatrix& rho, double theta) {
  return {rho.power(Complex(0.0, theta)), rho.power(Complex(0.0, -theta))};
}

Matrix cocycle(const DensityMatrix& nu, const DensityMatrix& rho, Complex alpha) {
  require_same_dim(nu, rho, "cocycle");
  return nu.power(alpha) * rho.power(-alpha);
}

double CocycleCertificate::max_residual() const {
  return std::max({unitarity_defect, right_factor_defect, fit_residual, formula_residual});
}

CocycleCertificate connes_cocycle(const DensityMatrix& nu, const DensityMatrix& rho, double t) {
  require_same_dim(nu, rho, "connes_cocycle");
  if (!nu.faithful() || !rho.faithful()) {
    const double lo = std::min(nu.min_eigenvalue(), rho.min_eigenvalue());
    throw FaithfulnessError("connes_cocycle requires faithful states", lo);
  }
  const Index d = nu.dim();
  const Complex it(0.0, t);
  const SandwichMap composite =
      relative_modular(nu, rho, it).compose(modular_operator(rho, -it));

  CocycleCertificate cert;
  cert.unitary = cocycle(nu, rho, it);
  cert.unitarity_defect =
      max_abs(cert.unitary * cert.unitary.adjoint() - Matrix::Identity(d, d));
  cert.right_factor_defect = max_abs(composite.right - Matrix::Identity(d, d));

  // Column j of the left factor is the first column of map(e_{j0}).
  cert.fitted_left.resize(d, d);
  for (Index j = 0; j < d; ++j) {
    Matrix unit = Matrix::Zero(d, d);
    unit(j, 0) = 1.0;
    cert.fitted_left.col(j) = composite.apply(unit).col(0);
  }
  const Matrix fitted = cert.fitted_left;
  cert.fit_residual = map_discrepancy([&](const Matrix& x) { return composite.apply(x); },
                                      [&](const Matrix& x) { return Matrix(fitted * x); }, d);
  cert.formula_residual = max_abs(cert.fitted_left - cert.unitary);
  return cert;
}

double relative_entropy(const DensityMatrix& nu, const DensityMatrix& rho) {
  require_same_dim(nu, rho, "relative_entropy");
  const Matrix diff = rho.log() - nu.log();
  return nu.expectation(diff).real();
}

DensityMatrix dephase(const DensityMatrix& nu, const SpectralResolution& res) {
  if (nu.dim() != res.dim()) throw ShapeError("dephase: dimension mismatch");
  const Matrix& v = res.basis();
  const Matrix rotated = v.adjoint() * nu.matrix() * v;
  Matrix blocks = Matrix::Zero(nu.dim(), nu.dim());
  for (std::size_t a = 0; a < res.size(); ++a) {
    const Index b = res.block_begin(a), n = res.block_size(a);
    blocks.block(b, b, n, n) = rotated.block(b, b, n, n);
  }
  return DensityMatrix::trusted(Matrix(v * blocks * v.adjoint()));
}

CesaroResult cesaro_average(const DensityMatrix& nu, const DensityMatrix& omega,
                            const Matrix& a, double horizon, int points_per_unit,
                            double cluster_tol) {
  require_same_dim(nu, omega, "cesaro_average");
  if (a.rows() != nu.dim() || a.cols() != nu.dim()) {
    throw ShapeError("cesaro_average: observable dimension mismatch");
  }
  if (!(horizon > 0.0) || points_per_unit < 1) {
    throw ShapeError("cesaro_average: horizon and quadrature density must be positive");
  }
  if (!omega.faithful()) {
    throw FaithfulnessError("cesaro_average requires a faithful omega", omega.min_eigenvalue());
  }
  const SpectralResolution res = spectral_decompose(omega.hermitian(), cluster_tol);
  const std::size_t k = res.size();
  const Matrix& v = res.basis();
  const Matrix nu_r = v.adjoint() * nu.matrix() * v;
  const Matrix a_r = v.adjoint() * a * v;

  // tr(nu w^{i th} A w^{-i th}) = sum_{ab} c_ab exp(i th (log l_a - log l_b)),
  // c_ab = sum_{i in a, j in b} nu_r(j,i) A_r(i,j).
  std::vector<double> logs(k);
  for (std::size_t x = 0; x < k; ++x) logs[x] = std::log(res.value(x));
  struct Term {
    Complex coeff;
    double freq;
  };
  std::vector<Term> oscillating;
  CesaroResult out;
  out.limit = 0.0;
  double coeff_sum = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      const Index bx = res.block_begin(x), nx = res.block_size(x);
      const Index by = res.block_begin(y), ny = res.block_size(y);
      const Complex c = (nu_r.block(by, bx, ny, nx).transpose().cwiseProduct(
                             a_r.block(bx, by, nx, ny)))
                            .sum();
      if (x == y) {
        out.limit += c;
      } else if (std::abs(c) > 0.0) {
        oscillating.push_back({c, logs[x] - logs[y]});
        coeff_sum += std::abs(c);
      }
    }
  }
  for (std::size_t x = 0; x + 1 < k; ++x) {
    out.gap = std::min(out.gap, std::abs(logs[x] - logs[x + 1]));
  }
  out.gapless = (k == 1);

  const auto n = static_cast<long>(std::ceil(horizon * points_per_unit));
  const double h = horizon / double(n);
  Complex acc = 0.0;
  for (const Term& term : oscillating) {
    // Midpoint rule; phases accumulated by recurrence with periodic resync.
    const Complex step = std::exp(Complex(0.0, term.freq * h));
    Complex phase = std::exp(Complex(0.0, term.freq * 0.5 * h));
    Complex partial = 0.0;
    for (long i = 0; i < n; ++i) {
      if ((i & 1023) == 0) phase = std::exp(Complex(0.0, term.freq * (double(i) + 0.5) * h));
      partial += phase;
      phase *= step;
    }
    acc += term.coeff * partial * h;
  }
  out.numeric = out.limit + acc / horizon;
  out.error = std::abs(out.numeric - out.limit);
  out.bound = out.gapless ? 0.0 : 2.0 * coeff_sum / (horizon * out.gap);
  return out;
}

StandardVector liouvillean_evolve(const HermitianMatrix& h, const StandardVector& phi, double t) {
  if (h.dim() != phi.dim()) throw ShapeError("liouvillean_evolve: dimension mismatch");
  const Matrix u = propagator(h, t);
  return StandardVector(u * phi.matrix() * u.adjoint());
}

DensityMatrix evolve_state(const DensityMatrix& omega, const HermitianMatrix& h, double t) {
  if (h.dim() != omega.dim()) throw ShapeError("evolve_state: dimension mismatch");
  const Matrix u = propagator(h, t);
  return DensityMatrix::trusted(Matrix(u * omega.matrix() * u.adjoint()));
}

double map_discrepancy(const HsMap& f, const HsMap& g, Index dim, std::uint64_t seed,
                       int random_probes) {
  double worst = 0.0;
  auto probe = [&](const Matrix& x) {
    const Matrix gx = g(x);
    const double scale = std::max(1.0, max_abs(gx));
    worst = std::max(worst, max_abs(f(x) - gx) / scale);
  };
  if (dim <= kExhaustiveProbeDim) {
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j < dim; ++j) {
        Matrix unit = Matrix::Zero(dim, dim);
        unit(i, j) = 1.0;
        probe(unit);
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int p = 0; p < random_probes; ++p) probe(gaussian_matrix(dim, rng));
  }
  return worst;
}

double conjugated_modular_residual(const DensityMatrix& omega, const HermitianMatrix& h,
                                   double t) {
  const Matrix u = propagator(h, t);  // e^{-itH}
  const DensityMatrix omega_t = evolve_state(omega, h, t);
  const DensityMatrix omega_mt = evolve_state(omega, h, -t);
  const Matrix omega_t_inv = omega_t.power(-1.0);
  const Matrix omega_inv = omega.power(-1.0);
  const Matrix& w = omega.matrix();
  return map_discrepancy(
      [&](const Matrix& x) {
        return Matrix(u.adjoint() * (w * (u * x * u.adjoint()) * omega_t_inv) * u);
      },
      [&](const Matrix& x) { return Matrix(omega_mt.matrix() * x * omega_inv); }, omega.dim());
}

double TimeReversalResiduals::max() const {
  return std::max({implements_theta, fixes_cone, commutes_with_j, commutes_with_liouvillean,
                   reverses_modular});
}

TimeReversalResiduals time_reversal_residuals(const DensityMatrix& omega,
                                              const HermitianMatrix& h, double t) {
  if (h.dim() != omega.dim()) throw ShapeError("time_reversal_residuals: dimension mismatch");
  const Index d = omega.dim();
  auto flip = [](const Matrix& x) { return Matrix(x.conjugate()); };
  TimeReversalResiduals r;

  std::mt19937_64 rng(0x7e57);
  for (int k = 0; k < 3; ++k) {
    const Matrix a = gaussian_matrix(d, rng);
    r.implements_theta = std::max(
        r.implements_theta,
        map_discrepancy([&](const Matrix& x) { return flip(a * x); },
                        [&](const Matrix& x) { return Matrix(a.conjugate() * flip(x)); }, d));
  }

  const Matrix omega_half = omega.sqrt();
  r.fixes_cone = max_abs(flip(omega_half) - omega_half);
  {
    const Matrix g = gaussian_matrix(d, rng);
    const HermitianMatrix positive(Matrix(g * g.adjoint()));
    const HermitianMatrix flipped(flip(positive.matrix()));
    const double lo = flipped.eigensystem().values[0];
    r.fixes_cone = std::max(r.fixes_cone, std::max(0.0, -lo));
  }

  r.commutes_with_j = map_discrepancy([&](const Matrix& x) { return flip(x.adjoint()); },
                                      [&](const Matrix& x) { return Matrix(flip(x).adjoint()); }, d);

  const Matrix& hm = h.matrix();
  auto liouvillean = [&](const Matrix& x) { return Matrix(hm * x - x * hm); };
  r.commutes_with_liouvillean =
      map_discrepancy([&](const Matrix& x) { return flip(liouvillean(x)); },
                      [&](const Matrix& x) { return liouvillean(flip(x)); }, d);

  const DensityMatrix omega_mt = evolve_state(omega, h, -t);
  const DensityMatrix omega_t = evolve_state(omega, h, t);
  const SandwichMap back = relative_modular(omega_mt, omega, 0.5);
  const SandwichMap forward = relative_modular(omega_t, omega, 0.5);
  r.reverses_modular = map_discrepancy([&](const Matrix& x) { return flip(back.apply(flip(x))); },
                                       [&](const Matrix& x) { return forward.apply(x); }, d);
  return r;
}

double cocycle_chain_residual(const DensityMatrix& nu, const DensityMatrix& rho,
                              const DensityMatrix& mu, double t) {
  const Complex it(0.0, t);
  const Matrix lhs = cocycle(nu, rho, it) * cocycle(rho, mu, it);
  return max_abs(lhs - cocycle(nu, mu, it));
}

double j_flip_residual(const DensityMatrix& nu, const DensityMatrix& mu) {
  const SandwichMap forward = relative_modular(nu, mu, 1.0);
  const SandwichMap inverse = relative_modular(mu, nu, -1.0);
  return map_discrepancy(
      [&](const Matrix& x) { return Matrix(forward.apply(Matrix(x.adjoint())).adjoint()); },
      [&](const Matrix& x) { return inverse.apply(x); }, nu.dim());
}

}  // namespace tmep

#include "tmep/operator_core.hpp"

#include "tmep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace tmep {

namespace {

Eigensystem solve_eigensystem(const Matrix& m) {
  const bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
  Eigensystem es;
  Eigen::ComputationInfo info;
  if (real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.real());
    info = solver.info();
    if (info == Eigen::Success) {
      es.values = solver.eigenvalues();
      es.vectors = solver.eigenvectors().cast<Complex>();
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    info = solver.info();
    if (info == Eigen::Success) {
      es.values = solver.eigenvalues();
      es.vectors = solver.eigenvectors();
    }
  }
  if (info != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver failed to converge: dim=" << m.rows()
       << " norm=" << m.norm() << " finite=" << m.allFinite()
       << " hermiticity_defect=" << hermiticity_defect(m);
    throw EigensolverError(os.str());
  }
  return es;
}

Matrix weighted_outer(const Matrix& vectors, const Eigen::VectorXcd& weights) {
  return (vectors * weights.asDiagonal()) * vectors.adjoint();
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Matrix& m)
    : cache_(std::make_shared<detail::EigenCache>()) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ShapeError("Hermitian matrix must be square with dim >= 1");
  }
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::from_eigensystem(const RealVector& values,
                                                  const Matrix& vectors) {
  if (vectors.rows() != vectors.cols() || vectors.cols() != values.size()) {
    throw ShapeError("eigensystem shape mismatch");
  }
  // Sort ascending so the cached layout matches what the solver would give.
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return values[i] < values[j]; });
  Eigensystem es;
  es.values.resize(values.size());
  es.vectors.resize(vectors.rows(), vectors.cols());
  for (Index k = 0; k < values.size(); ++k) {
    es.values[k] = values[order[k]];
    es.vectors.col(k) = vectors.col(order[k]);
  }
  HermitianMatrix h(weighted_outer(es.vectors, es.values.cast<Complex>()));
  std::call_once(h.cache_->once, [&] { h.cache_->system = std::move(es); });
  return h;
}

const Eigensystem& HermitianMatrix::eigensystem() const {
  if (!cache_) throw ShapeError("empty Hermitian matrix");
  std::call_once(cache_->once, [this] { cache_->system = solve_eigensystem(m_); });
  return cache_->system;
}

bool HermitianMatrix::is_real() const {
  return m_.imag().cwiseAbs().maxCoeff() == 0.0;
}

Matrix HermitianMatrix::apply(const std::function<Complex(double)>& f) const {
  const auto& es = eigensystem();
  Eigen::VectorXcd w(es.values.size());
  for (Index i = 0; i < w.size(); ++i) w[i] = f(es.values[i]);
  return weighted_outer(es.vectors, w);
}

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return from_eigensystem(RealVector::Ones(dim), Matrix::Identity(dim, dim));
}

DensityMatrix::DensityMatrix(const Matrix& m) : DensityMatrix(HermitianMatrix(m)) {}

DensityMatrix::DensityMatrix(const HermitianMatrix& h) : h_(h) {
  const double tr = h_.matrix().trace().real();
  if (std::abs(tr - 1.0) > 1e-12 * std::max<double>(1.0, std::sqrt(double(dim())))) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix trace is " << tr << ", expected 1";
    throw NumericalIntegrityError(os.str());
  }
  const double lo = min_eigenvalue();
  if (lo < -1e-12) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lo;
    throw NumericalIntegrityError(os.str());
  }
}

DensityMatrix DensityMatrix::trusted(const Matrix& m) {
  return trusted(HermitianMatrix(m));
}

DensityMatrix DensityMatrix::trusted(const HermitianMatrix& h) {
  DensityMatrix rho;
  rho.h_ = h;
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return trusted(HermitianMatrix::from_eigensystem(
      RealVector::Constant(dim, 1.0 / double(dim)), Matrix::Identity(dim, dim)));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw ShapeError("pure state from zero vector");
  const Eigen::VectorXcd u = psi / n;
  return trusted(Matrix(u * u.adjoint()));
}

double DensityMatrix::min_eigenvalue() const { return eigensystem().values[0]; }

bool DensityMatrix::faithful(double threshold) const {
  return min_eigenvalue() > threshold;
}

Matrix DensityMatrix::power(Complex alpha) const {
  if (alpha == Complex(0.0)) return Matrix::Identity(dim(), dim());
  if (alpha.real() > 0.0) {
    return h_.apply([alpha](double x) -> Complex {
      if (x <= kFaithfulnessThreshold) return 0.0;
      return std::exp(alpha * std::log(x));
    });
  }
  return matrix_function_positive(
      *this, [alpha](double x) { return std::exp(alpha * std::log(x)); });
}

Matrix DensityMatrix::log() const {
  return matrix_function_positive(*this, [](double x) { return Complex(std::log(x)); });
}

Complex DensityMatrix::expectation(const Matrix& a) const {
  if (a.rows() != dim() || a.cols() != dim()) throw ShapeError("expectation: dimension mismatch");
  return (matrix().transpose().cwiseProduct(a)).sum();
}

SpectralResolution::SpectralResolution(std::vector<double> values,
                                       std::vector<Index> offsets, Matrix basis,
                                       double cluster_tol)
    : values_(std::move(values)),
      offsets_(std::move(offsets)),
      basis_(std::move(basis)),
      cluster_tol_(cluster_tol) {
  if (offsets_.size() != values_.size() + 1 || offsets_.back() != basis_.cols()) {
    throw ShapeError("spectral resolution: inconsistent cluster offsets");
  }
}

std::vector<std::size_t> SpectralResolution::column_labels() const {
  std::vector<std::size_t> labels(static_cast<std::size_t>(basis_.cols()));
  for (std::size_t a = 0; a < size(); ++a) {
    for (Index c = offsets_[a]; c < offsets_[a + 1]; ++c) labels[c] = a;
  }
  return labels;
}

Matrix SpectralResolution::projection(std::size_t a) const {
  const auto b = block(a);
  return b * b.adjoint();
}

Matrix SpectralResolution::reconstruct() const {
  Eigen::VectorXcd w(basis_.cols());
  for (std::size_t a = 0; a < size(); ++a) {
    w.segment(offsets_[a], block_size(a)).setConstant(values_[a]);
  }
  return weighted_outer(basis_, w);
}

SpectralResolution spectral_decompose(const HermitianMatrix& m, double cluster_tol) {
  if (!(cluster_tol >= 0.0)) throw ShapeError("cluster_tol must be nonnegative");
  const auto& es = m.eigensystem();
  const Index d = es.values.size();
  const double scale = es.values.cwiseAbs().maxCoeff();
  const double floor = double(d) * std::numeric_limits<double>::epsilon() * scale;

  // Walk eigenvalues in decreasing order.
  Matrix basis(d, d);
  std::vector<double> values;
  std::vector<Index> offsets{0};
  double sum = 0.0;
  Index count = 0;
  for (Index k = 0; k < d; ++k) {
    const Index src = d - 1 - k;
    const double x = es.values[src];
    if (count > 0) {
      const double prev = es.values[src + 1];
      const double gap = prev - x;
      if (gap > cluster_tol * std::max(std::abs(prev), std::abs(x)) + floor) {
        values.push_back(sum / double(count));
        offsets.push_back(k);
        sum = 0.0;
        count = 0;
      }
    }
    basis.col(k) = es.vectors.col(src);
    sum += x;
    ++count;
  }
  values.push_back(sum / double(count));
  offsets.push_back(d);
  return SpectralResolution(std::move(values), std::move(offsets), std::move(basis),
                            cluster_tol);
}

Matrix matrix_function(const HermitianMatrix& m, const std::function<Complex(double)>& f) {
  return m.apply(f);
}

Matrix matrix_function_positive(const DensityMatrix& rho,
                                const std::function<Complex(double)>& f,
                                double threshold) {
  const double lo = rho.min_eigenvalue();
  if (lo <= threshold) {
    std::ostringstream os;
    os << "state is not faithful: eigenvalue " << lo << " <= threshold " << threshold;
    throw FaithfulnessError(os.str(), lo);
  }
  return rho.hermitian().apply(f);
}

Matrix propagator(const HermitianMatrix& h, double t) {
  return h.apply([t](double e) { return std::exp(Complex(0.0, -t * e)); });
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron(std::span<const Matrix> factors) {
  if (factors.empty()) return Matrix::Identity(1, 1);
  Matrix out = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

Matrix partial_trace(const Matrix& m, std::span<const Index> factor_dims, std::size_t kept) {
  if (kept >= factor_dims.size()) throw ShapeError("partial_trace: kept factor out of range");
  Index total = 1;
  for (Index f : factor_dims) total *= f;
  if (m.rows() != total || m.cols() != total) {
    throw ShapeError("partial_trace: factor dimensions do not multiply to matrix dimension");
  }
  Index left = 1;
  for (std::size_t k = 0; k < kept; ++k) left *= factor_dims[k];
  const Index dk = factor_dims[kept];
  const Index right = total / (left * dk);
  Matrix out = Matrix::Zero(dk, dk);
  for (Index l = 0; l < left; ++l) {
    for (Index x = 0; x < dk; ++x) {
      for (Index y = 0; y < dk; ++y) {
        Complex acc = 0.0;
        for (Index r = 0; r < right; ++r) {
          acc += m((l * dk + x) * right + r, (l * dk + y) * right + r);
        }
        out(x, y) += acc;
      }
    }
  }
  return out;
}

Matrix embed(const Matrix& op, std::span<const Index> factor_dims, std::size_t which) {
  if (which >= factor_dims.size() || op.rows() != factor_dims[which] ||
      op.cols() != factor_dims[which]) {
    throw ShapeError("embed: operator does not match factor dimension");
  }
  Index left = 1, right = 1;
  for (std::size_t k = 0; k < which; ++k) left *= factor_dims[k];
  for (std::size_t k = which + 1; k < factor_dims.size(); ++k) right *= factor_dims[k];
  return kron(kron(Matrix::Identity(left, left), op), Matrix::Identity(right, right));
}

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).norm(); }

}  // namespace tmep

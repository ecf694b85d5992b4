#include "tmep/models.hpp"

#include "tmep/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace tmep {

namespace {

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Matrix pauli_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Matrix site_operator(const Matrix& op, int site, int sites) {
  const std::vector<Index> dims(static_cast<std::size_t>(sites), 2);
  return embed(op, dims, static_cast<std::size_t>(site));
}

Matrix hopping(Index n) {
  Matrix x = Matrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) x(k, k + 1) = x(k + 1, k) = 1.0;
  if (n == 1) x(0, 0) = 1.0;
  return x;
}

Matrix goe(Index dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) g(i, j) = normal(rng);
  return (g + g.transpose()) / std::sqrt(8.0 * double(dim));
}

Matrix complex_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

// Reservoir Gibbs state with eigenvalues exp(-beta E)/Z from the chain's own
// eigensystem, so products over reservoirs stay exact.
struct ExactState {
  RealVector values;
  Matrix vectors;
};

ExactState exact_gibbs(const HermitianMatrix& h, double beta) {
  const auto& es = h.eigensystem();
  const double lo = es.values.minCoeff();
  RealVector w = (-beta * (es.values.array() - lo)).exp();
  // Vectorized exp can return subnormals where the true value underflows.
  w = (w.array() < std::numeric_limits<double>::min()).select(0.0, w);
  w /= w.sum();
  return {w, es.vectors};
}

ExactState kron_state(const ExactState& a, const ExactState& b) {
  ExactState out;
  out.values.resize(a.values.size() * b.values.size());
  for (Index i = 0; i < a.values.size(); ++i)
    for (Index j = 0; j < b.values.size(); ++j)
      out.values[i * b.values.size() + j] = a.values[i] * b.values[j];
  out.vectors = kron(a.vectors, b.vectors);
  return out;
}

DensityMatrix to_density(const ExactState& s) {
  return DensityMatrix::trusted(HermitianMatrix::from_eigensystem(s.values, s.vectors));
}

}  // namespace

DensityMatrix Model::product_state(const DensityMatrix& nu_s) const {
  if (nu_s.dim() != system_dim()) throw ShapeError("product_state: system dimension mismatch");
  if (system_dim() == 1) return reservoir_state;
  return DensityMatrix::trusted(kron(nu_s.matrix(), reservoir_state.matrix()));
}

Matrix Model::reservoir_energy(std::size_t j) const {
  if (j >= reservoir_hamiltonians.size()) throw ShapeError("reservoir index out of range");
  return embed(reservoir_hamiltonians[j].matrix(), factor_dims, j + 1);
}

DensityMatrix gibbs(const HermitianMatrix& h, double beta) {
  return to_density(exact_gibbs(h, beta));
}

HermitianMatrix ising_chain(int sites, double coupling, double field) {
  if (sites < 1) throw ShapeError("ising_chain: at least one site required");
  const Index d = Index(1) << sites;
  Matrix h = Matrix::Zero(d, d);
  for (int k = 0; k < sites; ++k) h += field * site_operator(pauli_x(), k, sites);
  for (int k = 0; k + 1 < sites; ++k) {
    h += coupling * site_operator(pauli_z(), k, sites) * site_operator(pauli_z(), k + 1, sites);
  }
  return HermitianMatrix(h);
}

long open_system_dimension(const OpenSystemSpec& spec) {
  long d = spec.system_dim;
  for (const auto& r : spec.reservoirs) {
    if (r.chain_length < 1 || r.chain_length > 30) return -1;
    d *= 1L << r.chain_length;
    if (d > (1L << 40)) return -1;
  }
  return d;
}

Model build_open_system(const OpenSystemSpec& spec, long dim_cap, std::string name) {
  if (spec.system_dim < 1) throw ShapeError("system dimension must be positive");
  if (spec.reservoirs.empty()) throw ShapeError("at least one reservoir is required");
  for (const auto& r : spec.reservoirs) {
    if (r.chain_length < 1) throw ShapeError("reservoir chain length must be positive");
    if (!(r.beta > 0.0)) throw ShapeError("reservoir inverse temperature must be positive");
  }
  const long total = open_system_dimension(spec);
  if (total < 0 || total > dim_cap) {
    std::ostringstream os;
    os << "model requires dimension " << (total < 0 ? std::string("> 2^40") : std::to_string(total))
       << ", above the cap of " << dim_cap;
    throw ResourceError(os.str(), total);
  }

  Model m;
  m.name = std::move(name);
  m.open_system = true;
  m.spec = spec;
  const Index n = spec.system_dim;
  m.factor_dims.push_back(n);
  for (const auto& r : spec.reservoirs) m.factor_dims.push_back(Index(1) << r.chain_length);

  Matrix hs = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) hs(k, k) = spec.system_energy * double(k);
  Matrix h = embed(hs, m.factor_dims, 0);

  const Matrix x_s = hopping(n);
  ExactState reservoirs{RealVector::Ones(1), Matrix::Identity(1, 1)};
  for (std::size_t j = 0; j < spec.reservoirs.size(); ++j) {
    const auto& r = spec.reservoirs[j];
    const HermitianMatrix hj = ising_chain(r.chain_length, r.coupling, r.field);
    m.reservoir_hamiltonians.push_back(hj);
    const ExactState wj = exact_gibbs(hj, r.beta);
    m.reservoir_states.push_back(to_density(wj));
    reservoirs = kron_state(reservoirs, wj);

    h += embed(hj.matrix(), m.factor_dims, j + 1);
    // V_j = X_S x sigma^z on the first site of chain j. Coupling through sigma^x
    // would commute with a one-site reservoir's Gibbs state.
    const Matrix first_site = site_operator(pauli_z(), 0, r.chain_length);
    const Matrix left = embed(x_s, m.factor_dims, 0);
    const Matrix right = embed(first_site, m.factor_dims, j + 1);
    h += spec.coupling_strength * (left * right);
  }
  m.reservoir_state = to_density(reservoirs);
  const ExactState system{RealVector::Constant(n, 1.0 / double(n)), Matrix::Identity(n, n)};
  m.omega = to_density(kron_state(system, reservoirs));
  m.hamiltonian = HermitianMatrix(h);
  return m;
}

Model build_explicit(std::string name, const Matrix& hamiltonian, const Matrix& omega) {
  if (hamiltonian.rows() != omega.rows()) throw ShapeError("explicit model: dimension mismatch");
  Model m;
  m.name = std::move(name);
  m.hamiltonian = HermitianMatrix(hamiltonian);
  m.omega = DensityMatrix(omega);
  if (!m.omega.faithful()) {
    throw FaithfulnessError("reference state must be faithful", m.omega.min_eigenvalue());
  }
  m.factor_dims = {1, hamiltonian.rows()};
  m.reservoir_state = m.omega;
  m.reservoir_states = {m.omega};
  return m;
}

Model fixture_a() {
  Matrix omega = Matrix::Zero(2, 2);
  omega(0, 0) = 0.75;
  omega(1, 1) = 0.25;
  return build_explicit("FIX-A", pauli_x(), omega);
}

OpenSystemSpec fixture_d_spec(int chain_length) {
  OpenSystemSpec spec;
  spec.system_dim = 2;
  spec.system_energy = 1.0;
  spec.coupling_strength = 0.5;
  spec.reservoirs = {ReservoirSpec{chain_length, 1.0, 0.5, 0.4},
                     ReservoirSpec{chain_length, 2.0, 0.5, 0.4}};
  return spec;
}

Model fixture_d(int chain_length) {
  return build_open_system(fixture_d_spec(chain_length), kDefaultDimensionCap,
                           chain_length == 1 ? "FIX-D" : "FIX-D-n" + std::to_string(chain_length));
}

Model random_model(std::uint64_t seed, Index dim) {
  Rng rng(seed);
  const Matrix h = goe(dim, rng) * 2.0;
  const HermitianMatrix k(Matrix(goe(dim, rng) * 2.0));
  Model m;
  m.name = "random-" + std::to_string(seed) + "-d" + std::to_string(dim);
  m.hamiltonian = HermitianMatrix(h);
  m.omega = gibbs(k, 1.0);
  m.factor_dims = {1, dim};
  m.reservoir_state = m.omega;
  m.reservoir_states = {m.omega};
  return m;
}

DensityMatrix random_pure_state(Index dim, Rng& rng) {
  const Matrix g = complex_gaussian(dim, 1, rng);
  return DensityMatrix::pure(g.col(0));
}

DensityMatrix random_mixed_state(Index dim, Rng& rng) {
  const Matrix g = complex_gaussian(dim, dim, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

Matrix random_observable(Index dim, Rng& rng) {
  const Matrix g = complex_gaussian(dim, dim, rng);
  const HermitianMatrix a(g);
  const double norm = a.eigensystem().values.cwiseAbs().maxCoeff();
  return a.matrix() / norm;
}

DensityMatrix perturbed_gibbs_state(const Model& model, const DensityMatrix& nu_s,
                                    std::size_t reservoir, double beta_prime) {
  if (!model.open_system) throw ShapeError("perturbed Gibbs state needs an open-system model");
  if (reservoir >= model.reservoir_states.size()) throw ShapeError("reservoir index out of range");
  if (nu_s.dim() != model.system_dim()) throw ShapeError("system state dimension mismatch");
  const auto& r = model.spec.reservoirs[reservoir];
  // First-site terms: its field and, for chains, the first bond.
  Matrix local = r.field * site_operator(pauli_x(), 0, r.chain_length);
  if (r.chain_length > 1) {
    local += r.coupling * site_operator(pauli_z(), 0, r.chain_length) *
             site_operator(pauli_z(), 1, r.chain_length);
  }
  const HermitianMatrix weighted(Matrix(r.beta * model.reservoir_hamiltonians[reservoir].matrix() +
                                        (beta_prime - r.beta) * local));
  const DensityMatrix perturbed = gibbs(weighted, 1.0);

  Matrix out = nu_s.matrix();
  for (std::size_t j = 0; j < model.reservoir_states.size(); ++j) {
    out = kron(out, j == reservoir ? perturbed.matrix() : model.reservoir_states[j].matrix());
  }
  return DensityMatrix::trusted(out);
}

double kms_check(const DensityMatrix& nu, const HermitianMatrix& h, double beta, const Matrix& a,
                 const Matrix& b, double t) {
  const auto& es = h.eigensystem();
  const double shift = es.values.minCoeff();
  const Matrix damp = h.apply([&](double e) { return Complex(std::exp(-beta * (e - shift))); });
  const Matrix grow = h.apply([&](double e) { return Complex(std::exp(beta * (e - shift))); });
  const Matrix u = propagator(h, t);
  const Matrix b_t = u.adjoint() * b * u;
  const Matrix b_shifted = damp * b_t * grow;
  return std::abs(nu.expectation(a * b_shifted) - nu.expectation(b_t * a));
}

EntropyDecompositionReport entropy_decomposition_check(const Model& model,
                                                       const SpectralResolution& res,
                                                       const JointDistribution& jd) {
  if (!model.open_system) throw ShapeError("entropy decomposition needs an open-system model");
  if (jd.values != res.values()) throw ShapeError("entropy decomposition: alphabet mismatch");
  const std::size_t k = res.size();
  const std::size_t m = model.reservoir_hamiltonians.size();
  std::vector<std::vector<double>> energy(k, std::vector<double>(m, 0.0));
  std::vector<bool> usable(k, true);
  EntropyDecompositionReport report;

  for (std::size_t j = 0; j < m; ++j) {
    const Matrix rotated = res.basis().adjoint() * model.reservoir_energy(j) * res.basis();
    for (std::size_t a = 0; a < k; ++a) {
      const Index b0 = res.block_begin(a), n = res.block_size(a);
      const Matrix block = rotated.block(b0, b0, n, n);
      const double e = block.trace().real() / double(n);
      energy[a][j] = e;
      const double defect =
          (block - e * Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
      if (defect > 1e-8 && usable[a]) {
        usable[a] = false;
        std::ostringstream os;
        os << "cluster " << a << " mixes reservoir " << j << " energies (defect " << defect << ")";
        report.skipped.push_back(os.str());
      }
    }
  }

  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (!usable[a] || !usable[b] || jd.probs(Index(b), Index(a)) <= 1e-12) continue;
      const double entropy = -std::log(jd.values[b]) + std::log(jd.values[a]);
      double dumped = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        dumped += model.spec.reservoirs[j].beta * (energy[b][j] - energy[a][j]);
      }
      report.residual = std::max(report.residual, std::abs(entropy - dumped));
    }
  }
  return report;
}

}  // namespace tmep

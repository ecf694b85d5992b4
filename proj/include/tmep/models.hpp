#pragma once

// Finite open quantum systems: a small system S of dimension N coupled
// through its "hopping" operator to M transverse-field Ising chains, each in
// its own Gibbs state. Everything is real in the product basis, so entrywise
// conjugation is a time reversal fixing both H and omega.

#include "tmep/operator_core.hpp"
#include "tmep/protocol.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace tmep {

inline constexpr long kDefaultDimensionCap = 4096;

struct ReservoirSpec {
  int chain_length = 1;
  double beta = 1.0;
  double coupling = 0.5;  ///< nearest-neighbour sigma^z sigma^z coupling J
  double field = 0.4;     ///< transverse field h
};

struct OpenSystemSpec {
  int system_dim = 2;
  double system_energy = 1.0;  ///< H_S = energy * diag(0, 1, .., N-1)
  std::vector<ReservoirSpec> reservoirs;
  double coupling_strength = 0.5;  ///< lambda in H = H_S + sum H_j + lambda sum V_j
};

/// A finite model (H, omega). For open systems omega = (1/N) x omega_R and the
/// first tensor factor is the small system; an explicit model is treated as a
/// trivial one-dimensional system coupled to a single "reservoir" carrying omega.
struct Model {
  std::string name;
  HermitianMatrix hamiltonian;
  DensityMatrix omega;
  std::vector<Index> factor_dims;  ///< {N, d_1, .., d_M}
  bool open_system = false;
  OpenSystemSpec spec;
  std::vector<HermitianMatrix> reservoir_hamiltonians;  ///< H_j on factor j
  std::vector<DensityMatrix> reservoir_states;          ///< omega_j
  DensityMatrix reservoir_state;                        ///< omega_R

  Index dim() const { return hamiltonian.dim(); }
  Index system_dim() const { return factor_dims.front(); }
  /// nu_S x omega_R.
  DensityMatrix product_state(const DensityMatrix& nu_s) const;
  /// H_j embedded in the full space.
  Matrix reservoir_energy(std::size_t j) const;
};

/// e^{-beta H} / tr e^{-beta H}, with the spectrum shifted by its minimum.
DensityMatrix gibbs(const HermitianMatrix& h, double beta);

/// Transverse-field Ising chain sum J Z_k Z_{k+1} + h sum X_k (open ends).
HermitianMatrix ising_chain(int sites, double coupling, double field);

long open_system_dimension(const OpenSystemSpec& spec);
/// Throws ResourceError when the total dimension exceeds dim_cap.
Model build_open_system(const OpenSystemSpec& spec, long dim_cap = kDefaultDimensionCap,
                        std::string name = "open-system");
Model build_explicit(std::string name, const Matrix& hamiltonian, const Matrix& omega);

/// omega = diag(3/4, 1/4), H = sigma_x.
Model fixture_a();
/// N = 2, two single-site reservoirs at beta = 1 and 2, lambda = 1/2.
OpenSystemSpec fixture_d_spec(int chain_length = 1);
Model fixture_d(int chain_length = 1);

/// Real random model: H from a scaled GOE, omega = Gibbs(K, 1) for an
/// independent GOE matrix K with spectral width about 4.
Model random_model(std::uint64_t seed, Index dim);

using Rng = std::mt19937_64;
/// Haar-random pure state.
DensityMatrix random_pure_state(Index dim, Rng& rng);
/// Ginibre-induced mixed state G G^dagger / tr(G G^dagger).
DensityMatrix random_mixed_state(Index dim, Rng& rng);
/// Hermitian matrix with ||A|| <= 1 (operator norm).
Matrix random_observable(Index dim, Rng& rng);

/// nu_S x omega_R with reservoir j replaced by a Gibbs state whose first-site
/// terms are weighted by beta_prime instead of beta_j.
DensityMatrix perturbed_gibbs_state(const Model& model, const DensityMatrix& nu_s,
                                    std::size_t reservoir, double beta_prime);

/// |nu(A B_{t+i beta}) - nu(B_t A)| with B_z = e^{izH} B e^{-izH}.
double kms_check(const DensityMatrix& nu, const HermitianMatrix& h, double beta, const Matrix& a,
                 const Matrix& b, double t);

struct EntropyDecompositionReport {
  double residual = 0.0;
  std::vector<std::string> skipped;  ///< clusters mixing distinct energy vectors
};

/// Compares E(b,a) with sum_j beta_j (E_j(b) - E_j(a)) on every outcome pair
/// of nonnegligible probability.
EntropyDecompositionReport entropy_decomposition_check(const Model& model,
                                                       const SpectralResolution& res,
                                                       const JointDistribution& jd);

}  // namespace tmep

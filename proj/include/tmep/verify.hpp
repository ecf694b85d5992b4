#pragma once

// Check battery: each identity of the entropy production theory becomes a
// CheckReport with a residual, a threshold and a verdict.

#include "tmep/models.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tmep {

struct CheckReport {
  std::string check;
  std::string fingerprint;
  nlohmann::json params = nlohmann::json::object();
  double residual_max = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::vector<std::string> notes;

  /// {check, fingerprint, params, residual_max, threshold, verdict, seconds}.
  /// Diagnostics go under params.notes when present.
  nlohmann::json to_json(bool with_time = true) const;
};

/// 1e-9 up to dimension 512, 1e-7 above.
double default_threshold(Index dim);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fingerprint(std::string_view text);

struct CheckOptions {
  double cluster_tol = kDefaultClusterTol;
  double merge_tol = kDefaultMergeTol;
  std::optional<double> threshold;  ///< overrides default_threshold
  std::uint64_t seed = 1;
  std::string fingerprint;

  double threshold_for(Index dim) const { return threshold ? *threshold : default_threshold(dim); }
};

/// Exact objects at fixed (omega, H, t), shared between checks.
struct Snapshot {
  Snapshot(const Model& model, double t, double cluster_tol = kDefaultClusterTol);
  const Model& model;
  double t;
  ModularContext ctx;
  TwoTimeProtocol protocol;

  AtomicMeasure measure(const DensityMatrix& nu, double merge_tol = kDefaultMergeTol) const;
};

CheckReport check_mean_entropy(const Model& model, double t, const CheckOptions& opt = {});

struct StripGrid {
  int real_points = 9;
  int imag_points = 9;
  double max_imag = 2.0;
};
CheckReport check_strip_symmetry(const Model& model, double t, const StripGrid& grid = {},
                                 const CheckOptions& opt = {});

CheckReport check_transpose_relation(const Model& model, double t, const CheckOptions& opt = {});

struct DephasingOptions {
  int samples = 10;
  std::vector<double> horizons{1e2, 1e3, 1e4};
  int points_per_unit = 64;
  double min_rate = 0.8;
  bool cesaro = true;
};
CheckReport check_dephasing_invariance(const Model& model, double t,
                                       const DephasingOptions& dopt = {},
                                       const CheckOptions& opt = {});
CheckReport check_dephasing_invariance(const Snapshot& snap, const DephasingOptions& dopt,
                                       const CheckOptions& opt);

/// Default nu_S = diag(0.9, 0.1, 0, ..) renormalized; for a one-dimensional
/// system it is [1].
DensityMatrix default_system_state(Index dim);
CheckReport check_product_state_theorem(const Model& model, double t,
                                        const std::optional<DensityMatrix>& nu_s = std::nullopt,
                                        const CheckOptions& opt = {});

CheckReport check_modular_identities(const Model& model, double t, const CheckOptions& opt = {});

struct RouteOptions {
  int alpha_points = 41;
  double max_imag = 10.0;
  /// Points evaluated by the matrix-power routes (trace, cocycle-product);
  /// 0 means all. The direct and spectral routes always use the full grid.
  int matrix_route_points = 0;
  int random_states = 1;
};
CheckReport check_route_equivalence(const Model& model, double t, const RouteOptions& ropt = {},
                                    const CheckOptions& opt = {});
/// extra_states are added to omega, the default product state and the
/// seeded random states.
CheckReport check_route_equivalence(const Snapshot& snap, const RouteOptions& ropt,
                                    const CheckOptions& opt,
                                    const std::vector<DensityMatrix>& extra_states = {});

/// Open systems only.
CheckReport check_entropy_decomposition(const Model& model, double t,
                                        const CheckOptions& opt = {});

struct CheckJob {
  std::string name;
  std::function<CheckReport()> run;
};

/// Full battery at one time. Seven checks, plus the entropy decomposition
/// for open systems.
std::vector<CheckJob> battery(const Model& model, double t, const CheckOptions& opt = {});

/// Runs jobs on up to `workers` threads; results keep the job order. An
/// exception inside a job becomes a failing report named after the job.
std::vector<CheckReport> run_jobs(const std::vector<CheckJob>& jobs, int workers);

struct ScalingOptions {
  std::vector<int> chain_lengths{1, 2, 3, 4, 5};
  double t = 1.0;
  std::size_t perturbed_reservoir = 0;
  double beta_ratio = 0.5;  ///< beta' = beta_ratio * beta_j
  std::optional<DensityMatrix> nu_s;
  long dim_cap = kDefaultDimensionCap;
};

struct ScalingRow {
  int n = 0;
  Index dim = 0;
  double w1 = 0.0;
  double tv = 0.0;
  double seconds = 0.0;
  std::vector<CheckReport> checks;  ///< exact per-n identities
  bool pass() const;
};

/// W1(Q_{nu,t}, Q_{nu_S x omega_R, t}) per chain length, for nu equal to
/// nu_S x omega_R with one reservoir's first-site Gibbs weight changed. The
/// trend is reported only; the per-n identity checks carry the verdict.
std::vector<ScalingRow> scaling_study(const OpenSystemSpec& base, const ScalingOptions& sopt,
                                      const CheckOptions& opt = {},
                                      const std::function<void(const ScalingRow&)>& progress = {});

}  // namespace tmep

#pragma once

// Experiment configuration: a versioned JSON document describing the model,
// the initial state, the time and alpha grids, tolerances and the scaling
// study. Parsing reports the offending line or field path.

#include "tmep/models.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmep {

inline constexpr int kSchemaVersion = 1;

enum class StateKind { reference, product, pure_random, mixed_random, perturbed_gibbs };

struct StateSpec {
  StateKind kind = StateKind::reference;
  std::optional<Matrix> system_state;  ///< nu_S for product / perturbed-gibbs
  std::size_t reservoir = 0;           ///< perturbed-gibbs
  double beta_ratio = 0.5;             ///< beta' = beta_ratio * beta_j
  std::uint64_t seed = 1;
};

struct ModelSpec {
  bool explicit_model = false;
  OpenSystemSpec open;
  Matrix hamiltonian;  ///< explicit models
  Matrix omega;
};

struct ScalingSpec {
  std::vector<int> chain_lengths{1, 2, 3, 4, 5};
  double t = 1.0;
  std::size_t reservoir = 0;
  double beta_ratio = 0.5;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string name = "experiment";
  ModelSpec model;
  StateSpec state;
  std::vector<double> times{1.0};
  double alpha_max_imag = 10.0;
  int alpha_points = 41;
  std::vector<Complex> extra_alphas;
  std::vector<Route> routes{kAllRoutes[0], kAllRoutes[1], kAllRoutes[2], kAllRoutes[3]};
  double cluster_tol = kDefaultClusterTol;
  double merge_tol = kDefaultMergeTol;
  std::optional<double> threshold;
  ScalingSpec scaling;
  long dim_cap = kDefaultDimensionCap;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  /// Imaginary grid followed by the extra points.
  std::vector<Complex> alphas() const;
};

std::string_view state_kind_name(StateKind k);

ExperimentConfig parse_config(const nlohmann::json& j);
/// Parses text; syntax errors name the line and column.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);
/// Pretty-printed JSON with a trailing newline.
std::string emit_config(const ExperimentConfig& c);

/// Model described by the config; the dimension cap is the config value
/// unless overridden by TMEP_DIM_CAP.
Model build_model(const ExperimentConfig& c);
long effective_dim_cap(const ExperimentConfig& c);
/// Initial state nu on the model's space.
DensityMatrix build_state(const ExperimentConfig& c, const Model& model);

ExperimentConfig fixture_a_config();
ExperimentConfig fixture_d_config();

}  // namespace tmep

#include "tmep/verify.hpp"

#include "tmep/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace tmep {

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
 public:
  Recorder(std::string name, const CheckOptions& opt, Index dim) : start_(Clock::now()) {
    report_.check = std::move(name);
    report_.fingerprint = opt.fingerprint;
    report_.threshold = opt.threshold_for(dim);
    report_.params["dim"] = dim;
  }

  nlohmann::json& params() { return report_.params; }
  void note(std::string text) { report_.notes.push_back(std::move(text)); }
  void fail(std::string text) {
    failed_ = true;
    note(std::move(text));
  }

  /// Records a named residual; NaN counts as a failure.
  void residual(const std::string& key, double value) {
    report_.params["residuals"][key] = value;
    if (std::isnan(value)) {
      fail(key + " is NaN");
      return;
    }
    report_.residual_max = std::max(report_.residual_max, value);
  }

  CheckReport finish() {
    report_.pass = !failed_ && report_.residual_max <= report_.threshold;
    report_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(report_);
  }

 private:
  CheckReport report_;
  Clock::time_point start_;
  bool failed_ = false;
};

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::vector<DensityMatrix> sample_states(const Model& model, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DensityMatrix> out;
  const Index d = model.dim(), n = model.system_dim();
  for (int k = 0; k < count; ++k) {
    switch (k % 3) {
      case 0: out.push_back(random_pure_state(d, rng)); break;
      case 1: out.push_back(random_mixed_state(d, rng)); break;
      default:
        if (n > 1) {
          out.push_back(model.product_state(random_mixed_state(n, rng)));
        } else {
          out.push_back(random_mixed_state(d, rng));
        }
    }
  }
  return out;
}

std::vector<std::size_t> spread_indices(std::size_t n, int wanted) {
  std::vector<std::size_t> idx;
  if (wanted <= 0 || std::size_t(wanted) >= n) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  if (wanted == 1) return {n / 2};
  for (int k = 0; k < wanted; ++k) {
    idx.push_back(std::size_t(std::llround(double(k) * double(n - 1) / double(wanted - 1))));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

// Least-squares slope of log(err) against log(horizon).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace

nlohmann::json CheckReport::to_json(bool with_time) const {
  nlohmann::json j;
  j["check"] = check;
  j["fingerprint"] = fingerprint;
  nlohmann::json p = params;
  if (!notes.empty()) p["notes"] = notes;
  j["params"] = p;
  j["residual_max"] = residual_max;
  j["threshold"] = threshold;
  j["verdict"] = pass ? "pass" : "fail";
  if (with_time) j["seconds"] = seconds;
  return j;
}

double default_threshold(Index dim) { return dim > 512 ? 1e-7 : 1e-9; }

std::string fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Snapshot::Snapshot(const Model& m, double time, double cluster_tol)
    : model(m),
      t(time),
      ctx(m.omega, m.hamiltonian, time, cluster_tol),
      protocol(ctx.resolution(), m.hamiltonian, time) {}

AtomicMeasure Snapshot::measure(const DensityMatrix& nu, double merge_tol) const {
  return ep_measure(protocol.joint_distribution(nu), merge_tol);
}

CheckReport check_mean_entropy(const Model& model, double t, const CheckOptions& opt) {
  Recorder rec("mean_entropy", opt, model.dim());
  rec.params()["t"] = t;
  const Snapshot snap(model, t, opt.cluster_tol);
  const AtomicMeasure q = snap.measure(model.omega, opt.merge_tol);
  const double mean = moment(q, 1);
  const double ent = relative_entropy(evolve_state(model.omega, model.hamiltonian, t), model.omega);
  rec.params()["mean"] = mean;
  rec.params()["relative_entropy"] = ent;
  rec.residual("mean_plus_entropy", std::abs(mean + ent));
  rec.residual("negative_mean", std::max(0.0, -mean));
  if (mean < -1e-12) rec.fail("mean entropy production is negative");
  return rec.finish();
}

CheckReport check_strip_symmetry(const Model& model, double t, const StripGrid& grid,
                                 const CheckOptions& opt) {
  Recorder rec("strip_symmetry", opt, model.dim());
  rec.params()["t"] = t;
  rec.params()["grid"] = {{"real_points", grid.real_points},
                          {"imag_points", grid.imag_points},
                          {"max_imag", grid.max_imag}};
  const ModularContext forward(model.omega, model.hamiltonian, t, opt.cluster_tol);
  const ModularContext backward(model.omega, model.hamiltonian, -t, opt.cluster_tol);
  double reversal = 0.0, symmetry = 0.0;
  for (int i = 0; i < grid.real_points; ++i) {
    const double re = grid.real_points == 1 ? 0.5 : double(i) / double(grid.real_points - 1);
    for (int j = 0; j < grid.imag_points; ++j) {
      const double im = grid.imag_points == 1
                            ? 0.0
                            : -grid.max_imag + 2.0 * grid.max_imag * double(j) /
                                                   double(grid.imag_points - 1);
      const Complex alpha(re, im);
      const Complex mirrored = 1.0 - std::conj(alpha);
      const Complex f = char_function_reference(forward, alpha);
      reversal = std::max(reversal,
                          std::abs(f - std::conj(char_function_reference(backward, mirrored))));
      symmetry = std::max(symmetry,
                          std::abs(f - std::conj(char_function_reference(forward, mirrored))));
    }
  }
  rec.residual("time_reversal_pair", reversal);
  if (model.hamiltonian.is_real() && model.omega.hermitian().is_real()) {
    rec.residual("fluctuation_symmetry", symmetry);
  } else {
    rec.note("model is not real in the product basis; fluctuation symmetry not asserted");
    rec.params()["fluctuation_symmetry_unasserted"] = symmetry;
  }
  return rec.finish();
}

CheckReport check_transpose_relation(const Model& model, double t, const CheckOptions& opt) {
  Recorder rec("transpose_relation", opt, model.dim());
  rec.params()["t"] = t;
  const Snapshot snap(model, t, opt.cluster_tol);
  const AtomicMeasure q = snap.measure(model.omega, opt.merge_tol);
  rec.params()["atoms"] = q.size();
  try {
    double worst = 0.0;
    for (const auto& r : rn_derivative(reflect(q), q, opt.merge_tol, 1e-12)) {
      const double expected = std::exp(-r.location);
      worst = std::max(worst, std::abs(r.ratio - expected) / expected);
    }
    rec.residual("relative_ratio_error", worst);
  } catch (const AbsoluteContinuityError& e) {
    rec.fail(e.what());
  }
  return rec.finish();
}

CheckReport check_dephasing_invariance(const Snapshot& snap, const DephasingOptions& dopt,
                                       const CheckOptions& opt) {
  const Model& model = snap.model;
  Recorder rec("dephasing_invariance", opt, model.dim());
  rec.params()["t"] = snap.t;
  rec.params()["samples"] = dopt.samples;
  rec.params()["seed"] = opt.seed;
  const auto& res = snap.ctx.resolution();
  const auto states = sample_states(model, dopt.samples, opt.seed);
  double protocol_gap = 0.0, spectral_gap = 0.0;
  for (const auto& nu : states) {
    const DensityMatrix nu_bar = dephase(nu, res);
    const AtomicMeasure q = snap.measure(nu, opt.merge_tol);
    protocol_gap = std::max(protocol_gap,
                            max_atom_discrepancy(q, snap.measure(nu_bar, opt.merge_tol),
                                                 opt.merge_tol));
    const AtomicMeasure spectral = ep_measure_spectral_dephased(nu, snap.ctx, opt.merge_tol);
    spectral_gap = std::max(spectral_gap, max_atom_discrepancy(q, spectral, opt.merge_tol));
  }
  rec.residual("protocol_nu_vs_nu_bar", protocol_gap);
  rec.residual("protocol_vs_spectral_nu_bar", spectral_gap);

  if (dopt.cesaro && !states.empty()) {
    // Observable: the Connes cocycle [D omega_{-t} : D omega]_{i}.
    const Matrix a = cocycle(snap.ctx.omega_back(), model.omega, Complex(0.0, 1.0));
    std::vector<double> errors;
    nlohmann::json rows = nlohmann::json::array();
    bool within_bound = true;
    for (double horizon : dopt.horizons) {
      const CesaroResult c =
          cesaro_average(states.front(), model.omega, a, horizon, dopt.points_per_unit,
                         opt.cluster_tol);
      errors.push_back(c.error);
      rows.push_back({{"R", horizon}, {"error", c.error}, {"bound", c.bound}});
      // Midpoint quadrature inflates each term by at most (freq h)^2 / 24.
      if (c.error > c.bound * (1.0 + 1e-3) + 1e-12) within_bound = false;
    }
    rec.params()["cesaro"] = rows;
    if (!within_bound) rec.fail("Cesaro error exceeds the gap bound");
    const bool converged =
        std::all_of(errors.begin(), errors.end(), [](double e) { return e < 1e-13; });
    if (converged) {
      rec.note("Cesaro average exact at every horizon");
      rec.params()["cesaro_rate"] = "exact";
    } else if (std::any_of(errors.begin(), errors.end(), [](double e) { return e <= 0.0; })) {
      rec.fail("Cesaro error vanished at some horizons only; rate undefined");
    } else {
      const double rate = -log_log_slope(dopt.horizons, errors);
      rec.params()["cesaro_rate"] = rate;
      if (!(rate >= dopt.min_rate)) {
        std::ostringstream os;
        os << "Cesaro rate exponent " << rate << " below " << dopt.min_rate;
        rec.fail(os.str());
      }
    }
  }
  return rec.finish();
}

CheckReport check_dephasing_invariance(const Model& model, double t, const DephasingOptions& dopt,
                                       const CheckOptions& opt) {
  const Snapshot snap(model, t, opt.cluster_tol);
  return check_dephasing_invariance(snap, dopt, opt);
}

DensityMatrix default_system_state(Index dim) {
  if (dim == 1) return DensityMatrix::maximally_mixed(1);
  Matrix m = Matrix::Zero(dim, dim);
  m(0, 0) = 0.9;
  m(1, 1) = 0.1;
  return DensityMatrix(m);
}

CheckReport check_product_state_theorem(const Model& model, double t,
                                        const std::optional<DensityMatrix>& nu_s,
                                        const CheckOptions& opt) {
  Recorder rec("product_state_theorem", opt, model.dim());
  const DensityMatrix sys = nu_s ? *nu_s : default_system_state(model.system_dim());
  const Index n = model.system_dim();
  const double gamma = std::max(0.0, sys.min_eigenvalue());
  const bool faithful = sys.faithful();
  rec.params()["t"] = t;
  rec.params()["system_dim"] = n;
  rec.params()["gamma"] = gamma;
  rec.params()["bounds"] = {faithful ? gamma * double(n) : 0.0, double(n)};

  const Snapshot snap(model, t, opt.cluster_tol);
  const DensityMatrix nu = model.product_state(sys);
  const AtomicMeasure q_nu = snap.measure(nu, opt.merge_tol);
  const AtomicMeasure q_omega = snap.measure(model.omega, opt.merge_tol);
  const AtomicMeasure spectral =
      ep_measure_spectral(vector_representative(nu), snap.ctx, opt.merge_tol);
  rec.residual("protocol_vs_spectral", max_atom_discrepancy(q_nu, spectral, opt.merge_tol));

  try {
    const auto ratios = rn_derivative(q_nu, q_omega, opt.merge_tol, 1e-12);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : ratios) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    rec.params()["ratio_range"] = {lo, hi};
    rec.residual("upper_bound_excess", std::max(0.0, hi - double(n)));
    if (faithful) {
      rec.residual("lower_bound_deficit", std::max(0.0, gamma * double(n) - lo));
    } else {
      rec.note("system state not faithful; lower bound skipped");
    }
  } catch (const AbsoluteContinuityError& e) {
    rec.fail(e.what());
  }
  return rec.finish();
}

CheckReport check_modular_identities(const Model& model, double t, const CheckOptions& opt) {
  Recorder rec("modular_identities", opt, model.dim());
  rec.params()["t"] = t;
  rec.params()["seed"] = opt.seed;
  const Index d = model.dim();
  const DensityMatrix& omega = model.omega;
  const HermitianMatrix& h = model.hamiltonian;
  const ModularContext ctx(omega, h, t, opt.cluster_tol);
  Rng rng(opt.seed);

  rec.residual("conjugated_modular", conjugated_modular_residual(omega, h, t));
  if (h.is_real() && omega.hermitian().is_real()) {
    const auto tr = time_reversal_residuals(omega, h, t);
    rec.residual("time_reversal_theta", tr.implements_theta);
    rec.residual("time_reversal_cone", tr.fixes_cone);
    rec.residual("time_reversal_j", tr.commutes_with_j);
    rec.residual("time_reversal_liouvillean", tr.commutes_with_liouvillean);
    rec.residual("time_reversal_modular", tr.reverses_modular);
  } else {
    rec.note("model is not real in the product basis; time reversal skipped");
  }

  const DensityMatrix third = random_mixed_state(d, rng);
  if (third.faithful(1e-10)) {
    rec.residual("cocycle_chain", cocycle_chain_residual(ctx.omega_back(), omega, third, 1.0));
  } else {
    rec.residual("cocycle_chain", cocycle_chain_residual(ctx.omega_back(), omega, omega, 1.0));
  }
  rec.residual("j_flip", j_flip_residual(ctx.omega_back(), omega));
  rec.residual("cocycle_certificate", connes_cocycle(ctx.omega_back(), omega, 1.0).max_residual());

  const DensityMatrix nu = random_mixed_state(d, rng);
  const DensityMatrix nu_bar = dephase(nu, ctx.resolution());
  rec.residual("dephase_idempotent",
               max_abs(dephase(nu_bar, ctx.resolution()).matrix() - nu_bar.matrix()));
  rec.residual("dephase_commutes",
               max_abs(nu_bar.matrix() * omega.matrix() - omega.matrix() * nu_bar.matrix()));

  double kms = 0.0;
  const DensityMatrix thermal = gibbs(h, 1.0);
  for (double s : {0.0, 1.0, -1.0}) {
    const Matrix a = random_observable(d, rng), b = random_observable(d, rng);
    kms = std::max(kms, kms_check(thermal, h, 1.0, a, b, s));
  }
  for (std::size_t j = 0; j < model.reservoir_hamiltonians.size(); ++j) {
    const auto& hj = model.reservoir_hamiltonians[j];
    const double beta = model.spec.reservoirs[j].beta;
    for (double s : {0.0, 1.0, -1.0}) {
      const Matrix a = random_observable(hj.dim(), rng), b = random_observable(hj.dim(), rng);
      kms = std::max(kms, kms_check(model.reservoir_states[j], hj, beta, a, b, s));
    }
  }
  rec.residual("kms", kms);
  return rec.finish();
}

CheckReport check_route_equivalence(const Snapshot& snap, const RouteOptions& ropt,
                                    const CheckOptions& opt,
                                    const std::vector<DensityMatrix>& extra_states) {
  const Model& model = snap.model;
  Recorder rec("route_equivalence", opt, model.dim());
  rec.params()["t"] = snap.t;
  rec.params()["alpha_points"] = ropt.alpha_points;
  rec.params()["max_imag"] = ropt.max_imag;
  rec.params()["seed"] = opt.seed;

  std::vector<std::pair<std::string, DensityMatrix>> states{{"reference", model.omega}};
  if (model.system_dim() > 1) {
    states.emplace_back("product", model.product_state(default_system_state(model.system_dim())));
  }
  Rng rng(opt.seed);
  for (int k = 0; k < ropt.random_states; ++k) {
    states.emplace_back("mixed-random", random_mixed_state(model.dim(), rng));
  }
  for (const auto& s : extra_states) states.emplace_back("extra", s);

  const auto alphas = imaginary_grid(ropt.max_imag, ropt.alpha_points);
  const auto subset = spread_indices(alphas.size(), ropt.matrix_route_points);
  std::vector<Complex> sub_alphas;
  for (auto i : subset) sub_alphas.push_back(alphas[i]);
  rec.params()["matrix_route_points"] = sub_alphas.size();

  // Matrix-route factors do not depend on the state.
  std::vector<MatrixRouteKernel> kernels;
  for (Complex a : sub_alphas) kernels.push_back(matrix_route_kernel(snap.ctx, a));

  double worst = 0.0, atomwise = 0.0, normalization = 0.0;
  for (const auto& [label, nu] : states) {
    const AtomicMeasure q_direct = snap.measure(nu, opt.merge_tol);
    const AtomicMeasure q_spectral = ep_measure_spectral_dephased(nu, snap.ctx, opt.merge_tol);
    std::vector<Complex> direct;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      direct.push_back(cf_eval(q_direct, alphas[i]));
      worst = std::max(worst, std::abs(cf_eval(q_spectral, alphas[i]) - direct[i]));
      if (alphas[i] == Complex(0.0, 0.0)) {
        normalization = std::max(normalization, std::abs(direct[i] - 1.0));
      }
    }
    const DensityMatrix nu_bar = dephase(nu, snap.ctx.resolution());
    for (std::size_t k = 0; k < subset.size(); ++k) {
      const Complex ref = direct[subset[k]];
      worst = std::max(worst, std::abs(char_function_trace(kernels[k], nu_bar) - ref));
      worst = std::max(worst, std::abs(char_function_cocycle_product(kernels[k], nu_bar) - ref));
      if (label == "reference") {
        worst = std::max(worst, std::abs(char_function_reference(kernels[k], snap.ctx) - ref));
      }
    }
    atomwise = std::max(atomwise, max_atom_discrepancy(q_direct, q_spectral, opt.merge_tol));
  }
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& s : states) labels.push_back(s.first);
  rec.params()["states"] = labels;
  rec.residual("char_function", worst);
  rec.residual("atomwise", atomwise);
  rec.residual("normalization", normalization);
  return rec.finish();
}

CheckReport check_route_equivalence(const Model& model, double t, const RouteOptions& ropt,
                                    const CheckOptions& opt) {
  const Snapshot snap(model, t, opt.cluster_tol);
  return check_route_equivalence(snap, ropt, opt);
}

CheckReport check_entropy_decomposition(const Model& model, double t, const CheckOptions& opt) {
  Recorder rec("entropy_decomposition", opt, model.dim());
  rec.params()["t"] = t;
  if (!model.open_system) {
    rec.fail("entropy decomposition needs an open-system model");
    return rec.finish();
  }
  const Snapshot snap(model, t, opt.cluster_tol);
  Rng rng(opt.seed);
  double worst = 0.0;
  for (const auto& nu : {model.omega, random_mixed_state(model.dim(), rng)}) {
    const auto report = entropy_decomposition_check(model, snap.ctx.resolution(),
                                                    snap.protocol.joint_distribution(nu));
    worst = std::max(worst, report.residual);
    for (const auto& s : report.skipped) rec.note(s);
  }
  rec.residual("entropy_vs_heat", worst);
  return rec.finish();
}

std::vector<CheckJob> battery(const Model& model, double t, const CheckOptions& opt) {
  std::vector<CheckJob> jobs{
      {"route_equivalence", [&model, t, opt] { return check_route_equivalence(model, t, {}, opt); }},
      {"mean_entropy", [&model, t, opt] { return check_mean_entropy(model, t, opt); }},
      {"strip_symmetry", [&model, t, opt] { return check_strip_symmetry(model, t, {}, opt); }},
      {"transpose_relation", [&model, t, opt] { return check_transpose_relation(model, t, opt); }},
      {"dephasing_invariance",
       [&model, t, opt] { return check_dephasing_invariance(model, t, {}, opt); }},
      {"product_state_theorem",
       [&model, t, opt] { return check_product_state_theorem(model, t, std::nullopt, opt); }},
      {"modular_identities", [&model, t, opt] { return check_modular_identities(model, t, opt); }},
  };
  if (model.open_system) {
    jobs.push_back({"entropy_decomposition",
                    [&model, t, opt] { return check_entropy_decomposition(model, t, opt); }});
  }
  return jobs;
}

std::vector<CheckReport> run_jobs(const std::vector<CheckJob>& jobs, int workers) {
  std::vector<CheckReport> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = jobs[i].run();
      } catch (const std::exception& e) {
        CheckReport r;
        r.check = jobs[i].name;
        r.pass = false;
        r.residual_max = std::numeric_limits<double>::infinity();
        r.notes.push_back(std::string("error: ") + e.what());
        out[i] = std::move(r);
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, int(jobs.size())));
  if (n == 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  pool.clear();
  return out;
}

bool ScalingRow::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.pass; });
}

std::vector<ScalingRow> scaling_study(const OpenSystemSpec& base, const ScalingOptions& sopt,
                                      const CheckOptions& opt,
                                      const std::function<void(const ScalingRow&)>& progress) {
  std::vector<ScalingRow> rows;
  for (int n : sopt.chain_lengths) {
    const auto start = Clock::now();
    OpenSystemSpec spec = base;
    for (auto& r : spec.reservoirs) r.chain_length = n;
    const Model model = build_open_system(spec, sopt.dim_cap, "scaling-n" + std::to_string(n));
    if (sopt.perturbed_reservoir >= spec.reservoirs.size()) {
      throw ShapeError("scaling study: perturbed reservoir index out of range");
    }
    const DensityMatrix sys = sopt.nu_s ? *sopt.nu_s : default_system_state(model.system_dim());
    const double beta = spec.reservoirs[sopt.perturbed_reservoir].beta;
    const DensityMatrix reference = model.product_state(sys);
    const DensityMatrix perturbed =
        perturbed_gibbs_state(model, sys, sopt.perturbed_reservoir, sopt.beta_ratio * beta);

    const Snapshot snap(model, sopt.t, opt.cluster_tol);
    const AtomicMeasure q_ref = snap.measure(reference, opt.merge_tol);
    const AtomicMeasure q_pert = snap.measure(perturbed, opt.merge_tol);

    ScalingRow row;
    row.n = n;
    row.dim = model.dim();
    row.w1 = distance_w1(q_pert, q_ref);
    row.tv = distance_tv(q_pert, q_ref, opt.merge_tol);

    const bool large = model.dim() > 512;
    RouteOptions ropt;
    ropt.random_states = 0;
    ropt.matrix_route_points = large ? 5 : 0;
    row.checks.push_back(check_route_equivalence(snap, ropt, opt, {perturbed}));
    DephasingOptions dopt;
    dopt.samples = large ? 3 : 6;
    dopt.cesaro = false;
    row.checks.push_back(check_dephasing_invariance(snap, dopt, opt));
    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (progress) progress(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tmep
